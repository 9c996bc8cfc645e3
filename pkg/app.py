# app.py
"""
Punto de entrada de la línea de comandos.

    python app.py solve fixtures/ejemplo_tres_agentes.json --out cert.json
    python app.py verify fixtures/ejemplo_tres_agentes.json cert.json
    python app.py graph fixtures/ejemplo_tres_agentes.json --dot
"""
import logging
import os
import sys

import click

from config.config import get_config
from models.allocation import Allocation
from services.champion_graph import build_basic_graph, export_dot, generalized_edges
from services.generator import generate
from services.instance_io import (
    load_fixture, load_instance, load_json, parse_allocation, parse_certificate, serialize_certificate,
    serialize_instance, verify_allocation, verify_certificate,
)
from services.oracle import enumerate_efx
from services.report_service import batch_excel, fallback_rate, write_certificate_pdf
from services.solvers import SOLVERS, solve
from utils.errors import EFXError
from utils.helpers import listar_instancias, sanitizar_log_text, timestamp_archivo
from utils.itemsets import item_list, mask_of

logger = logging.getLogger("efx")


# ============================================================================
# LOGGING
# ============================================================================

def configurar_logging(cfg):
    log_dir = cfg.LOG_DIR if os.path.isabs(cfg.LOG_DIR) else os.path.join(cfg.BASE_DIR, cfg.LOG_DIR)
    os.makedirs(log_dir, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, cfg.LOG_LEVEL, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.path.join(log_dir, cfg.LOG_FILE), encoding='utf-8'),
            logging.StreamHandler(),
        ]
    )


# ============================================================================
# AUXILIARES
# ============================================================================

def _ordering(texto):
    if not texto:
        return None
    try:
        return tuple(int(x) for x in texto.split(","))
    except ValueError:
        raise click.BadParameter("use índices separados por comas, p. ej. 2,0,1", param_hint="--ordering")


def _items(texto):
    return [int(x) for x in texto.split(",") if x.strip()] if texto else []


def _leer(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


def _resumen(report):
    return (f"[OK] {report.solver}: {report.step_count} pasos, {report.unallocated_count} sin asignar, "
            f"caridad envidiada={report.charity_envied}, respaldo={report.fallback_used}")


class EFXGroup(click.Group):
    """Convierte cualquier EFXError en un código de salida distinto de cero"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except EFXError as e:
            logger.error("[ERROR] %s", sanitizar_log_text(str(e)))
            raise click.ClickException(str(e))


@click.group(cls=EFXGroup)
@click.option("--env", "env_name", default=None, help="Entorno de configuración (development, production, testing)")
@click.pass_context
def cli(ctx, env_name):
    """Solucionador EFX con certificados verificables."""
    if env_name:
        os.environ["EFX_ENV"] = env_name
    cfg = get_config(env_name)
    configurar_logging(cfg)
    ctx.obj = cfg


# ============================================================================
# SOLVE
# ============================================================================

@cli.command("solve")
@click.argument("instance_path", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--solver", "solver_name", default="auto", type=click.Choice(["auto", *SOLVERS]), show_default=True)
@click.option("--ordering", default=None, help="Orden de agentes 0-based, separado por comas")
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False), help="Archivo JSON del certificado")
@click.option("--pdf", "pdf_path", default=None, type=click.Path(dir_okay=False), help="Reporte PDF del certificado")
@click.option("--batch", "batch_dir", default=None, type=click.Path(exists=True, file_okay=False))
@click.option("--excel", "excel_path", default=None, type=click.Path(dir_okay=False), help="Resumen Excel del lote")
def solve_command(instance_path, solver_name, ordering, out_path, pdf_path, batch_dir, excel_path):
    """Resuelve una instancia (o un directorio con --batch)."""
    if batch_dir:
        _solve_batch(batch_dir, solver_name, excel_path)
        return
    if not instance_path:
        raise click.UsageError("indique una instancia o --batch DIR")

    instance = load_instance(instance_path)
    report = solve(instance, solver_name, _ordering(ordering))
    click.echo(_resumen(report))
    click.echo(report.allocation.describe())
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(serialize_certificate(report.certificate))
        click.echo(f"Certificado escrito en {out_path}")
    if pdf_path:
        write_certificate_pdf(report, pdf_path)
        click.echo(f"Reporte PDF escrito en {pdf_path}")


def _solve_batch(batch_dir, solver_name, excel_path):
    """Las instancias se resuelven en orden alfabético, una tras otra"""
    corridas, errores = [], []
    for ruta in listar_instancias(batch_dir):
        nombre = os.path.basename(ruta)
        try:
            report = solve(load_instance(ruta), solver_name)
        except EFXError as e:
            logger.error("[ERROR] %s: %s", sanitizar_log_text(nombre), sanitizar_log_text(str(e)))
            errores.append((nombre, str(e)))
            continue
        corridas.append((nombre, report))
        click.echo(f"{nombre}: {_resumen(report)}")

    click.echo(f"Instancias: {len(corridas)}, errores: {len(errores)}, "
               f"tasa de respaldo: {fallback_rate(corridas):.4f}")
    if excel_path:
        with open(excel_path, "wb") as f:
            f.write(batch_excel(corridas, errores))
        click.echo(f"Resumen Excel escrito en {excel_path}")
    if errores:
        raise click.ClickException(f"{len(errores)} instancias fallaron")


# ============================================================================
# VERIFY
# ============================================================================

@cli.command("verify")
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("document_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--solver", "solver_name", default=None, type=click.Choice(list(SOLVERS)),
              help="Postcondición a verificar para una asignación suelta")
def verify_command(instance_path, document_path, solver_name):
    """Verifica una asignación o un certificado contra la instancia."""
    instance = load_instance(instance_path)
    texto = _leer(document_path)
    if "steps" in load_json(texto):
        resultado = verify_certificate(instance, parse_certificate(instance, texto))
    else:
        resultado = verify_allocation(instance, parse_allocation(instance, texto), solver_name)
    if not resultado.ok:
        raise click.ClickException(str(resultado))
    click.echo("[OK] verificación superada")


# ============================================================================
# BRUTE
# ============================================================================

@cli.command("brute")
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--max-unallocated", default=0, show_default=True, type=click.IntRange(min=0))
@click.option("--limit", default=20, show_default=True, type=click.IntRange(min=0), help="Asignaciones a mostrar")
def brute_command(instance_path, max_unallocated, limit):
    """Enumera las asignaciones EFX por fuerza bruta."""
    instance = load_instance(instance_path)
    asignaciones = enumerate_efx(instance, max_unallocated)
    click.echo(f"{len(asignaciones)} asignaciones EFX con |U| <= {max_unallocated}")
    for alloc in asignaciones[:limit]:
        click.echo(alloc.describe())


# ============================================================================
# GRAPH
# ============================================================================

def _aristas_generalizadas(graph, textos):
    aristas = []
    for texto in textos:
        partes = texto.split(":")
        if len(partes) != 3:
            raise click.BadParameter("formato OBJETIVO:H:S, p. ej. 2:0,1:4", param_hint="--generalized")
        try:
            objetivo, agregados, quitados = int(partes[0]), mask_of(_items(partes[1])), mask_of(_items(partes[2]))
        except ValueError:
            raise click.BadParameter(f"índices no numéricos en {texto!r}", param_hint="--generalized")
        aristas += generalized_edges(graph, objetivo, agregados, quitados)
    return aristas


@cli.command("graph")
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("allocation_path", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--dot", "as_dot", is_flag=True, help="Exporta el grafo de campeones en formato DOT")
@click.option("--generalized", multiple=True, help="Arista generalizada OBJETIVO:H:S con índices 0-based")
def graph_command(instance_path, allocation_path, as_dot, generalized):
    """Grafo de campeones de una asignación."""
    instance, alloc = load_fixture(instance_path)
    if allocation_path:
        alloc = parse_allocation(instance, _leer(allocation_path))
    if alloc is None:
        alloc = Allocation.empty(instance)
    graph = build_basic_graph(alloc)
    aristas = list(graph.edges) + _aristas_generalizadas(graph, generalized)
    if as_dot:
        click.echo(export_dot(graph, aristas), nl=False)
        return
    for edge in aristas:
        click.echo(f"{instance.agent_label(edge.source)} -> {instance.agent_label(edge.target)} "
                   f"{edge.kind.value} {edge.label(instance.item_names)}")


# ============================================================================
# GEN
# ============================================================================

@cli.command("gen")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("-n", "--agents", "n", default=4, show_default=True, type=click.IntRange(min=1))
@click.option("-m", "--items", "m", default=6, show_default=True, type=click.IntRange(min=0))
@click.option("--classes", default=None, help="Clases separadas por comas (additive,unit_demand,...)")
@click.option("--bound", default=20, show_default=True, type=click.IntRange(min=1))
@click.option("--two-types", is_flag=True)
@click.option("--count", default=1, show_default=True, type=click.IntRange(min=1))
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False),
              help="Directorio de salida; sin él la instancia se imprime")
def gen_command(seed, n, m, classes, bound, two_types, count, out_dir):
    """Genera instancias aleatorias deterministas por semilla."""
    mezcla = classes.split(",") if classes else None
    for k in range(count):
        texto = serialize_instance(generate(seed + k, n, m, mezcla, bound, two_types))
        if out_dir is None:
            click.echo(texto, nl=False)
            continue
        os.makedirs(out_dir, exist_ok=True)
        ruta = os.path.join(out_dir, f"inst_{seed + k:05d}.json")
        with open(ruta, "w", encoding="utf-8") as f:
            f.write(texto)
    if out_dir:
        click.echo(f"[OK] {count} instancias escritas en {out_dir}")


# ============================================================================
# REPORT
# ============================================================================

@cli.command("report")
@click.argument("instance_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--solver", "solver_name", default="auto", type=click.Choice(["auto", *SOLVERS]))
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False))
@click.pass_obj
def report_command(cfg, instance_path, solver_name, out_path):
    """Resuelve la instancia y genera el reporte PDF del certificado."""
    instance = load_instance(instance_path)
    report = solve(instance, solver_name)
    if out_path is None:
        out_path = os.path.join(cfg.REPORTS_FOLDER, f"certificado_{timestamp_archivo()}.pdf")
    write_certificate_pdf(report, out_path)
    click.echo(_resumen(report))
    click.echo(f"Reporte PDF escrito en {out_path}")
    click.echo("Bundles finales: " + "; ".join(
        f"{instance.agent_label(a)}={item_list(b)}" for a, b in enumerate(report.allocation.bundles)))


if __name__ == "__main__":
    sys.exit(cli())
