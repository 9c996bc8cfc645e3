# tests/test_report_service.py
from io import BytesIO

import pandas as pd

from services.report_service import batch_excel, batch_rows, certificate_pdf, fallback_rate, write_certificate_pdf
from services.solvers import solve


def test_certificate_pdf_is_a_pdf(ejemplo):
    instance, _ = ejemplo
    contenido = certificate_pdf(solve(instance))
    assert contenido.startswith(b"%PDF")


def test_write_certificate_pdf_creates_directories(ejemplo, tmp_path):
    instance, _ = ejemplo
    ruta = tmp_path / "reportes" / "cert.pdf"
    write_certificate_pdf(solve(instance), str(ruta))
    assert ruta.read_bytes().startswith(b"%PDF")


def test_batch_rows_and_fallback_rate(ejemplo):
    instance, _ = ejemplo
    report = solve(instance)
    filas = batch_rows([("ejemplo_tres_agentes.json", report)])
    assert filas[0]["Instancia"] == "ejemplo_tres_agentes.json"
    assert filas[0]["Solucionador"] == "three"
    assert filas[0]["Sin asignar"] == 0
    assert filas[0]["Pasos PI"] == report.pi_steps
    assert filas[0]["Pasos genéricos"] == 0
    assert fallback_rate([]) == 0.0
    assert 0.0 <= fallback_rate([("ejemplo_tres_agentes.json", report)]) <= 1.0


def test_batch_excel_sheets(ejemplo):
    instance, _ = ejemplo
    report = solve(instance)
    contenido = batch_excel([("ejemplo_tres_agentes.json", report)], [("roto.json", "JSON inválido")])
    hojas = pd.read_excel(BytesIO(contenido), sheet_name=None, engine="openpyxl")
    assert set(hojas) == {"Corridas", "Resumen", "Errores"}
    assert list(hojas["Corridas"]["Instancia"]) == ["ejemplo_tres_agentes.json"]
    assert list(hojas["Errores"]["Instancia"]) == ["roto.json"]
