# config/config.py -*- coding: utf-8 -*-
import os
from dotenv import load_dotenv

# -----------------------------------------------------------------------------
# Cargar .env de forma robusta
# - Por defecto busca el .env en la raíz del proyecto (carpeta padre de /config)
# - Si defines DOTENV_PATH, usará esa ruta explícita
# -----------------------------------------------------------------------------
PROJECT_DIR = os.path.abspath(os.path.dirname(os.path.dirname(__file__)))
DEFAULT_ENV_PATH = os.path.join(PROJECT_DIR, ".env")
ENV_PATH = os.getenv("DOTENV_PATH", DEFAULT_ENV_PATH)

# override=False para no pisar variables ya definidas en el sistema
load_dotenv(ENV_PATH, override=False)


def _env_bool(name, default):
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "y", "si")


class Config:
    """Configuración base del solucionador"""

    ENV = "development"

    # -------------------------------------------------------------------------
    # Oráculo de fuerza bruta
    # -------------------------------------------------------------------------
    ORACLE_MAX_STATES = int(os.getenv("EFX_ORACLE_MAX_STATES", "2000000"))
    ORACLE_MAX_AGENTS = int(os.getenv("EFX_ORACLE_MAX_AGENTS", "6"))
    ORACLE_MAX_ITEMS = int(os.getenv("EFX_ORACLE_MAX_ITEMS", "10"))

    # -------------------------------------------------------------------------
    # Búsqueda de conjuntos de aristas PI
    # -------------------------------------------------------------------------
    PI_NODE_BUDGET = int(os.getenv("EFX_PI_NODE_BUDGET", "200000"))
    PI_MAX_CYCLES = int(os.getenv("EFX_PI_MAX_CYCLES", "3"))
    PI_MAX_EDGES_FACTOR = int(os.getenv("EFX_PI_MAX_EDGES_FACTOR", "2"))

    # -------------------------------------------------------------------------
    # Grafo de campeones
    # -------------------------------------------------------------------------
    MAX_DISCARD_VARIANTS = int(os.getenv("EFX_MAX_DISCARD_VARIANTS", "3"))
    CHAMPION_SUBSET_LIMIT = int(os.getenv("EFX_CHAMPION_SUBSET_LIMIT", "16"))

    # -------------------------------------------------------------------------
    # Respaldo exhaustivo y verificaciones
    # -------------------------------------------------------------------------
    FALLBACK_MAX_STATES = int(os.getenv("EFX_FALLBACK_MAX_STATES", "5000000"))
    STRICT_CHECKS = _env_bool("EFX_STRICT", "false")
    STRICT_PROOF_COVERAGE = _env_bool("EFX_STRICT_COVERAGE", "false")

    # -------------------------------------------------------------------------
    # Archivos / esquemas
    # -------------------------------------------------------------------------
    INSTANCE_SCHEMA_VERSION = "efx-instance/1"
    CERTIFICATE_SCHEMA_VERSION = "efx-certificate/1"
    INSTANCE_EXTENSIONS = {"json"}

    # -------------------------------------------------------------------------
    # Logs y reportes
    # -------------------------------------------------------------------------
    BASE_DIR = PROJECT_DIR
    LOG_LEVEL = os.getenv("EFX_LOG_LEVEL", "INFO").strip().upper()
    LOG_DIR = os.getenv("EFX_LOG_DIR", "logs")
    LOG_FILE = "efx.log"
    REPORTS_FOLDER = os.getenv("EFX_REPORTS_FOLDER", "reportes")
    FIXTURES_FOLDER = os.path.join(BASE_DIR, "fixtures")


class DevelopmentConfig(Config):
    """Configuración para desarrollo"""

    ENV = "development"
    LOG_LEVEL = os.getenv("EFX_LOG_LEVEL", "DEBUG").strip().upper()


class ProductionConfig(Config):
    """Configuración para corridas por lotes"""

    ENV = "production"
    LOG_LEVEL = os.getenv("EFX_LOG_LEVEL", "WARNING").strip().upper()


class TestingConfig(Config):
    """Configuración para testing"""

    ENV = "testing"
    STRICT_CHECKS = True
    ORACLE_MAX_STATES = 500000
    FALLBACK_MAX_STATES = 2000000


# Configuración por entorno
config = {
    "development": DevelopmentConfig,
    "production": ProductionConfig,
    "testing": TestingConfig,
    "default": DevelopmentConfig,
}


def get_config(name=None):
    """Devuelve la clase de configuración activa (EFX_ENV o 'default')"""
    env_name = (name or os.getenv("EFX_ENV", "default")).strip().lower()
    return config.get(env_name, config["default"])
