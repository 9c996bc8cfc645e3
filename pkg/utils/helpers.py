import os
import logging
from datetime import datetime
from config.config import Config

logger = logging.getLogger(__name__)


def allowed_file(filename):
    """Valida si la extensión del archivo de instancia está permitida según configuración"""
    if not filename or '.' not in filename:
        return False
    extension = filename.rsplit('.', 1)[1].lower()
    return extension in Config.INSTANCE_EXTENSIONS


def listar_instancias(directorio):
    """
    Lista los archivos de instancia de un directorio en orden alfabético.
    Los archivos con extensión no permitida se ignoran con una advertencia.
    """
    if not directorio or not os.path.isdir(directorio):
        raise ValueError(f"No es un directorio: {directorio}")

    rutas = []
    for nombre in sorted(os.listdir(directorio)):
        ruta = os.path.join(directorio, nombre)
        if not os.path.isfile(ruta):
            continue
        if not allowed_file(nombre):
            logger.warning("[WARN] Archivo ignorado por extensión: %s", sanitizar_log_text(nombre))
            continue
        rutas.append(ruta)
    return rutas


def format_duration(seconds):
    """Formatea una duración en segundos como texto corto"""
    if seconds is None:
        return "-"
    try:
        if seconds < 1:
            return f"{seconds * 1000:.0f} ms"
        return f"{seconds:.2f} s"
    except (TypeError, ValueError):
        logger.warning("Error formateando duración")
        return "-"


def format_date(date_value=None, format_str='%Y-%m-%d %H:%M:%S'):
    """Formatea un datetime (por defecto el actual) según formato especificado"""
    if date_value is None:
        date_value = datetime.now()
    try:
        if isinstance(date_value, str):
            return date_value
        return date_value.strftime(format_str)
    except (AttributeError, ValueError):
        logger.warning("Error formateando fecha")
        return "{0}".format(date_value)


def format_flag(value):
    """Sí/No para banderas booleanas en reportes"""
    if value is None:
        return "-"
    return "Sí" if value else "No"


def timestamp_archivo():
    """Marca de tiempo para nombres de archivo"""
    return datetime.now().strftime('%Y%m%d_%H%M%S')


# ==================== FUNCIONES DE SANITIZACIÓN PARA LOGS ====================

def sanitizar_log_text(value, max_len=500):
    """
    Neutraliza caracteres de control para evitar Log Injection (CWE-117).
    - Reemplaza CR/LF/TAB por secuencias visibles.
    - Elimina otros caracteres de control ASCII (< 32), excepto espacio.
    - Trunca a max_len.
    """
    if value is None:
        return ''

    if isinstance(value, BaseException):
        return '[error]'
    try:
        s = "{0}".format(value)
    except Exception:
        return '[texto-protegido]'

    s = s.replace('\r', '\\r').replace('\n', '\\n').replace('\t', '\\t')
    s = ''.join(ch for ch in s if (ord(ch) >= 32) or ch == ' ')

    if max_len and len(s) > max_len:
        s = s[:max_len] + '...'
    return s


__all__ = [
    'allowed_file', 'listar_instancias', 'format_duration', 'format_date',
    'format_flag', 'timestamp_archivo', 'sanitizar_log_text',
]
