# services/report_service.py
"""
Reportes de corridas: PDF del certificado (reportlab) y resumen por lotes
en Excel (pandas + openpyxl).
"""
import logging
import os
from io import BytesIO
from typing import List, Optional, Sequence
from xml.sax.saxutils import escape

import pandas as pd
from reportlab.lib import colors
from reportlab.lib.enums import TA_CENTER
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from models.certificate import SolverReport
from utils.helpers import format_date, format_duration, format_flag
from utils.itemsets import format_items

logger = logging.getLogger(__name__)

COLOR_PRINCIPAL = colors.HexColor('#2E4A7D')
COLOR_TEXTO = colors.HexColor('#58595B')
COLOR_FONDO = colors.HexColor('#F8F9FA')
COLOR_BORDE = colors.HexColor('#DEE2E6')


def _estilo_tabla(encabezado: bool = True) -> TableStyle:
    comandos = [
        ('ALIGN', (0, 0), (-1, -1), 'LEFT'),
        ('FONTNAME', (0, 0), (-1, -1), 'Helvetica'),
        ('FONTSIZE', (0, 0), (-1, -1), 9),
        ('TEXTCOLOR', (0, 0), (-1, -1), COLOR_TEXTO),
        ('BOTTOMPADDING', (0, 0), (-1, -1), 5),
        ('TOPPADDING', (0, 0), (-1, -1), 5),
        ('GRID', (0, 0), (-1, -1), 0.5, COLOR_BORDE),
        ('VALIGN', (0, 0), (-1, -1), 'MIDDLE'),
    ]
    if encabezado:
        comandos += [
            ('BACKGROUND', (0, 0), (-1, 0), COLOR_PRINCIPAL),
            ('TEXTCOLOR', (0, 0), (-1, 0), colors.white),
            ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
        ]
    else:
        comandos += [
            ('BACKGROUND', (0, 0), (0, -1), COLOR_FONDO),
            ('FONTNAME', (0, 0), (0, -1), 'Helvetica-Bold'),
        ]
    return TableStyle(comandos)


def _pie(canvas, doc):
    canvas.saveState()
    canvas.setStrokeColor(COLOR_PRINCIPAL)
    canvas.setLineWidth(2)
    canvas.line(0.5 * inch, 0.5 * inch, letter[0] - 0.5 * inch, 0.5 * inch)
    canvas.setFont('Helvetica', 8)
    canvas.setFillColor(COLOR_TEXTO)
    canvas.drawCentredString(letter[0] / 2, 0.3 * inch, f"Página {doc.page}")
    canvas.restoreState()


def _filas_asignacion(report: SolverReport) -> List[List[str]]:
    alloc = report.allocation
    instance = alloc.instance
    nombres = instance.item_names
    filas = [["Agente", "Bundle", "Valor"]]
    for agente, bundle in enumerate(alloc.bundles):
        filas.append([
            instance.agent_label(agente),
            format_items(bundle, nombres),
            str(instance.agents[agente].value(bundle)),
        ])
    filas.append(["U (caridad)", format_items(alloc.unallocated, nombres), "-"])
    return filas


def certificate_pdf(report: SolverReport) -> bytes:
    """PDF con el resumen de la instancia, un renglón por paso y la asignación final"""
    buffer = BytesIO()
    doc = SimpleDocTemplate(
        buffer,
        pagesize=letter,
        rightMargin=0.75 * inch,
        leftMargin=0.75 * inch,
        topMargin=0.75 * inch,
        bottomMargin=0.75 * inch,
    )
    styles = getSampleStyleSheet()
    titulo = ParagraphStyle('Titulo', parent=styles['Heading1'], fontSize=16,
                            textColor=COLOR_PRINCIPAL, alignment=TA_CENTER, fontName='Helvetica-Bold')
    subtitulo = ParagraphStyle('Subtitulo', parent=styles['Heading2'], fontSize=12,
                               textColor=COLOR_PRINCIPAL, spaceBefore=8, spaceAfter=6,
                               fontName='Helvetica-Bold', backColor=COLOR_FONDO)

    instance = report.allocation.instance
    certificado = report.certificate
    elements = [Paragraph("CERTIFICADO DE ASIGNACIÓN EFX", titulo), Spacer(1, 0.2 * inch)]

    # ========== RESUMEN ==========
    elements.append(Paragraph("RESUMEN DE LA CORRIDA", subtitulo))
    resumen = [
        ["Solucionador:", report.solver],
        ["Agentes / ítems:", f"{instance.n} / {instance.num_items}"],
        ["Orden de agentes:", ", ".join(instance.agent_label(a) for a in certificado.ordering)],
        ["Pasos:", str(report.step_count)],
        ["Sin asignar:", str(report.unallocated_count)],
        ["Caridad envidiada:", format_flag(report.charity_envied)],
        ["Respaldo exhaustivo:", format_flag(report.fallback_used)],
        ["Duración:", format_duration(report.elapsed_seconds)],
        ["Generado:", format_date()],
    ]
    tabla = Table(resumen, colWidths=[2.0 * inch, 4.5 * inch])
    tabla.setStyle(_estilo_tabla(encabezado=False))
    elements += [tabla, Spacer(1, 0.2 * inch)]

    # ========== PASOS ==========
    elements.append(Paragraph("PASOS DE PROGRESO", subtitulo))
    pasos = [["#", "Tipo", "Construcción", "EFX", "Domina", "Pareto"]]
    for pos, step in enumerate(certificado.steps, start=1):
        pasos.append([
            str(pos),
            step.kind.value,
            Paragraph(escape(step.construction or "-"), styles['BodyText']),
            format_flag(step.efx_after),
            format_flag(step.dominates),
            format_flag(step.pareto_dominates),
        ])
    tabla = Table(pasos, colWidths=[0.4 * inch, 1.5 * inch, 2.9 * inch, 0.55 * inch, 0.6 * inch, 0.6 * inch],
                  repeatRows=1)
    tabla.setStyle(_estilo_tabla())
    elements += [tabla, Spacer(1, 0.2 * inch)]

    # ========== ASIGNACIÓN FINAL ==========
    elements.append(Paragraph("ASIGNACIÓN FINAL", subtitulo))
    tabla = Table(_filas_asignacion(report), colWidths=[1.5 * inch, 4.0 * inch, 1.0 * inch])
    tabla.setStyle(_estilo_tabla())
    elements.append(tabla)

    doc.build(elements, onFirstPage=_pie, onLaterPages=_pie)
    logger.info("[OK] PDF del certificado generado (%s pasos)", report.step_count)
    return buffer.getvalue()


def write_certificate_pdf(report: SolverReport, path: str) -> str:
    directorio = os.path.dirname(path)
    if directorio:
        os.makedirs(directorio, exist_ok=True)
    with open(path, "wb") as f:
        f.write(certificate_pdf(report))
    return path


# ============================================================================
# RESUMEN POR LOTES
# ============================================================================

def batch_rows(entries: Sequence[tuple]) -> List[dict]:
    """``entries`` son pares (nombre de archivo, SolverReport)"""
    filas = []
    for nombre, report in entries:
        instance = report.allocation.instance
        filas.append({
            'Instancia': nombre,
            'Solucionador': report.solver,
            'n': instance.n,
            'm': instance.num_items,
            'Pasos': report.step_count,
            'Sin asignar': report.unallocated_count,
            'Caridad envidiada': format_flag(report.charity_envied),
            'Respaldo': format_flag(report.fallback_used),
            'Pasos de respaldo': report.fallback_steps,
            'Respaldos sin envidia': report.envy_free_fallbacks,
            'Presupuesto agotado': report.fallback_budget_exhausted,
            'Violaciones de observaciones': report.observation_violations,
            'Desvíos de estructura': report.structure_deviations,
            'Pasos PI': report.pi_steps,
            'Pasos de candidatos': report.candidate_steps,
            'Pasos genéricos': report.generic_steps,
            'Segundos': round(report.elapsed_seconds, 4),
        })
    return filas


def fallback_rate(entries: Sequence[tuple]) -> float:
    pasos = sum(report.step_count for _, report in entries)
    respaldos = sum(report.fallback_steps for _, report in entries)
    return respaldos / pasos if pasos else 0.0


def _ajustar_columnas(worksheet):
    for column in worksheet.columns:
        max_length = 0
        column_letter = column[0].column_letter
        for cell in column:
            if cell.value is not None and len(str(cell.value)) > max_length:
                max_length = len(str(cell.value))
        worksheet.column_dimensions[column_letter].width = min(max_length + 2, 50)


def batch_excel(entries: Sequence[tuple], errores: Optional[Sequence[tuple]] = None) -> bytes:
    """Hoja 'Corridas' con un renglón por instancia más una hoja 'Resumen'"""
    df = pd.DataFrame(batch_rows(entries))
    output = BytesIO()
    with pd.ExcelWriter(output, engine='openpyxl') as writer:
        df.to_excel(writer, sheet_name='Corridas', index=False)
        _ajustar_columnas(writer.sheets['Corridas'])

        summary_data = {
            'Resumen': [
                f'Total instancias: {len(entries)}',
                f'Con ítems sin asignar: {sum(1 for _, r in entries if r.unallocated_count)}',
                f'Con respaldo exhaustivo: {sum(1 for _, r in entries if r.fallback_used)}',
                f'Tasa de respaldo por paso: {fallback_rate(entries):.4f}',
                f'Errores: {len(errores or [])}',
                f'Fecha generación: {format_date()}',
            ]
        }
        pd.DataFrame(summary_data).to_excel(writer, sheet_name='Resumen', index=False)
        _ajustar_columnas(writer.sheets['Resumen'])

        if errores:
            df_errores = pd.DataFrame([{'Instancia': n, 'Error': e} for n, e in errores])
            df_errores.to_excel(writer, sheet_name='Errores', index=False)
            _ajustar_columnas(writer.sheets['Errores'])

    logger.info("[OK] Resumen Excel generado: %s instancias", len(entries))
    return output.getvalue()
