# tests/test_cli.py
import json
import shutil

from app import cli
from services.instance_io import parse_instance

from tests.conftest import fixture_path
from tests.test_champion_graph import EJEMPLO_DOT

EJEMPLO = fixture_path("ejemplo_tres_agentes.json")


def _invocar(runner, *args):
    return runner.invoke(cli, list(args))


def test_solve_then_verify(runner, tmp_path):
    cert = tmp_path / "cert.json"
    resultado = _invocar(runner, "solve", EJEMPLO, "--out", str(cert))
    assert resultado.exit_code == 0, resultado.output
    assert "[OK] three" in resultado.output

    resultado = _invocar(runner, "verify", EJEMPLO, str(cert))
    assert resultado.exit_code == 0, resultado.output
    assert "verificación superada" in resultado.output


def test_verify_rejects_tampered_certificate(runner, tmp_path):
    cert = tmp_path / "cert.json"
    assert _invocar(runner, "solve", EJEMPLO, "--out", str(cert)).exit_code == 0
    data = json.loads(cert.read_text(encoding="utf-8"))
    data["final"] = data["initial"]
    cert.write_text(json.dumps(data), encoding="utf-8")

    resultado = _invocar(runner, "verify", EJEMPLO, str(cert))
    assert resultado.exit_code != 0
    assert "final" in resultado.output


def test_verify_loose_allocation_with_solver_postcondition(runner, tmp_path):
    suelta = tmp_path / "alloc.json"
    suelta.write_text(json.dumps({"bundles": [[0, 1, 2], [3], [4, 5]]}), encoding="utf-8")
    assert _invocar(runner, "verify", EJEMPLO, str(suelta)).exit_code == 0
    resultado = _invocar(runner, "verify", EJEMPLO, str(suelta), "--solver", "three")
    assert resultado.exit_code != 0
    assert "complete" in resultado.output


def test_graph_dot_with_generalized_edge(runner):
    resultado = _invocar(runner, "graph", EJEMPLO, "--dot", "--generalized", "2:0,1:4")
    assert resultado.exit_code == 0, resultado.output
    assert resultado.stdout == EJEMPLO_DOT


def test_graph_rejects_bad_generalized_format(runner):
    resultado = _invocar(runner, "graph", EJEMPLO, "--generalized", "2:0,1")
    assert resultado.exit_code != 0


def test_gen_output_parses(runner):
    resultado = _invocar(runner, "gen", "--seed", "3", "-n", "3", "-m", "4")
    assert resultado.exit_code == 0, resultado.output
    instance = parse_instance(resultado.stdout)
    assert instance.n == 3
    assert instance.num_items == 4


def test_brute_lists_allocations(runner):
    resultado = _invocar(runner, "brute", EJEMPLO, "--max-unallocated", "1", "--limit", "2")
    assert resultado.exit_code == 0, resultado.output
    assert "asignaciones EFX" in resultado.output


def test_batch_solve_with_excel(runner, tmp_path):
    lote = tmp_path / "lote"
    assert _invocar(runner, "gen", "--seed", "10", "-n", "3", "-m", "3", "--count", "2",
                    "--out", str(lote)).exit_code == 0
    shutil.copy(EJEMPLO, lote / "ejemplo_tres_agentes.json")
    excel = tmp_path / "lote.xlsx"
    resultado = _invocar(runner, "solve", "--batch", str(lote), "--excel", str(excel))
    assert resultado.exit_code == 0, resultado.output
    assert "Instancias: 3, errores: 0" in resultado.output
    assert excel.exists()


def test_batch_reports_failures(runner, tmp_path):
    lote = tmp_path / "lote"
    lote.mkdir()
    (lote / "roto.json").write_text("{", encoding="utf-8")
    resultado = _invocar(runner, "solve", "--batch", str(lote))
    assert resultado.exit_code != 0
    assert "errores: 1" in resultado.output


def test_malformed_instance_is_a_usage_error(runner, tmp_path):
    rota = tmp_path / "rota.json"
    rota.write_text('{"schema": "efx-instance/1", "num_items": 1, "agents": []}', encoding="utf-8")
    resultado = _invocar(runner, "solve", str(rota))
    assert resultado.exit_code == 1
    assert "agents" in resultado.output


def test_report_writes_pdf(runner, tmp_path):
    pdf = tmp_path / "cert.pdf"
    resultado = _invocar(runner, "report", EJEMPLO, "--out", str(pdf))
    assert resultado.exit_code == 0, resultado.output
    assert pdf.read_bytes().startswith(b"%PDF")


def test_env_option_selects_configuration(runner, monkeypatch):
    monkeypatch.setenv("EFX_ENV", "development")
    resultado = _invocar(runner, "--env", "production", "brute", EJEMPLO, "--limit", "0")
    assert resultado.exit_code == 0, resultado.output
    assert "asignaciones EFX" in resultado.output
