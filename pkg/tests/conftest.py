# tests/conftest.py
import os

import pytest
from click.testing import CliRunner

from config.config import Config
from models.instance import Instance
from models.valuations import ValuationDescriptor, ValuationKind
from services.instance_io import load_fixture

A, B, C, D, E, F, G = range(7)


def fixture_path(nombre):
    return os.path.join(Config.FIXTURES_FOLDER, nombre)


def additive_instance(*filas, **kwargs):
    """Instancia aditiva a partir de una lista de valores por agente"""
    m = len(filas[0])
    return Instance(num_items=m, agents=tuple(ValuationDescriptor(ValuationKind.ADDITIVE, fila) for fila in filas),
                    **kwargs)


@pytest.fixture(autouse=True)
def entorno_testing(monkeypatch):
    """Toda la suite corre con TestingConfig (verificaciones estrictas)"""
    monkeypatch.setenv("EFX_ENV", "testing")


@pytest.fixture
def ejemplo():
    """Instancia de tres agentes y siete ítems con su asignación X1={a,b,c}, X2={d}, X3={e,f}, U={g}"""
    instance, alloc = load_fixture(fixture_path("ejemplo_tres_agentes.json"))
    return instance, alloc


@pytest.fixture
def submodular_sin_proxy():
    instance, _ = load_fixture(fixture_path("submodular_sin_proxy.json"))
    return instance.agents[0]


@pytest.fixture
def runner():
    return CliRunner()
