"""
Command Line Interface
Obrauer - Cyclotomic Oriented Brauer Engine

Reports go to stdout; logs go to stderr. Exit codes: 0 success, 1 failed
verification, 2 usage or input error.
"""

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from app.core.config import Settings, build_settings, configure_settings
from app.core.exceptions import ObrauerError, UsageError
from app.core.logging_config import ContextLogger, LoggingConfig
from app.core.metrics import COMMAND_DURATION, write_metrics
from app.schemas.diagram import DiagramIn, LayerWordIn, MorphismIn, MorphismOut, TermOut
from app.schemas.report import (
    CharacterRowOut,
    EigenRowOut,
    KTermOut,
    RelationCheckOut,
    SemisimpleOut,
    WeightOut,
)
from app.services.batch import run_cases_sync
from app.services.combinatorics import Side, character_std, parse_shape, paths_to
from app.services.diagrams import NormalDiagram, check_dots, hom_dim
from app.services.ground import Params, bubble_value
from app.services.hecke import (
    check_hecke_relations,
    corner_word,
    hecke_span_rank,
    jm_spectrum,
    jucys_murphy,
)
from app.services.ktheory import (
    KVector,
    Op,
    Sector,
    apply_op,
    commutator_check,
    orbit_decomposition,
    residue_window,
    semisimple_check,
    wt,
)
from app.services.planar import Gen, Layer, LayerWord, PlanarDiagram
from app.services.straighten import Engine, Morphism, relation_catalog, slice_diagram
from app.services.towers import corner_algebra, eigen_profile, std_dim
from app.services.words import parse_word

COMMANDS = (
    "normalize",
    "hom-basis",
    "hom-dim",
    "compose",
    "verify-relations",
    "corner",
    "hecke-check",
    "bubble",
    "eigenprofile",
    "character",
    "std-dim",
    "paths",
    "k-apply",
    "commutator-check",
    "semisimple-check",
    "orbits",
    "tau",
    "slice",
    "jucys-murphy",
    "bimodule-check",
    "weight",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class Report:
    data: Any = None
    rows: Optional[List[Dict[str, Any]]] = None
    text: Optional[str] = None
    passed: bool = True


@dataclass
class Context:
    args: argparse.Namespace
    settings: Settings
    params: Params
    engine: Engine
    log: ContextLogger


# ============== Input helpers ==============


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _diagram_from(model: DiagramIn) -> NormalDiagram:
    record: Dict[str, Any] = {"src": model.src, "dst": model.dst, "pairs": model.pairs}
    if model.dots:
        record["dots"] = model.dots
    return NormalDiagram.from_dict(record)


def _layer_word_from(model: LayerWordIn) -> LayerWord:
    layers = []
    for layer in model.layers:
        try:
            layers.append(Layer(layer.position, Gen(layer.generator)))
        except ValueError as exc:
            raise UsageError(f"unknown generator {layer.generator!r}") from exc
    return LayerWord(model.src, tuple(layers))


def load_morphism(data: Any, ctx: Context, direct: bool = False) -> Morphism:
    """A morphism from a diagram, layer word or term-list record."""
    if not isinstance(data, dict):
        raise UsageError("expected a JSON object")
    engine, params = ctx.engine, ctx.params
    try:
        if "terms" in data:
            model = MorphismIn.model_validate(data)
            mapping: Dict[NormalDiagram, Any] = {}
            for term in model.terms:
                diagram = check_dots(_diagram_from(term.diagram), params.level)
                coeff = params.scalar(term.coeff)
                mapping[diagram] = mapping.get(diagram, params.zero) + coeff
            return Morphism.build(model.src, model.dst, mapping)
        if "pairs" in data:
            return engine.from_diagram(_diagram_from(DiagramIn.model_validate(data)))
        if "layers" in data:
            layer_word = _layer_word_from(LayerWordIn.model_validate(data))
            if direct:
                return engine.normalize(PlanarDiagram.from_layer_word(layer_word))
            return engine.eval(layer_word)
    except ValidationError as exc:
        raise UsageError(f"malformed input: {exc.errors()[0]['msg']}") from exc
    raise UsageError("input needs 'terms', 'pairs' or 'layers'")


def _files(ctx: Context, count: int) -> List[str]:
    files = ctx.args.diagram or []
    if len(files) != count:
        raise UsageError(f"{ctx.args.command} expects {count} --diagram file(s)")
    return files


def _shape(ctx: Context):
    return parse_shape(ctx.args.shape, ctx.params.level)


def _residue(ctx: Context, required: bool = True):
    if ctx.args.residue is None:
        if required:
            raise UsageError("--residue is required")
        return None
    return ctx.params.scalar(ctx.args.residue)


def _rs(ctx: Context):
    if ctx.args.r is None or ctx.args.s is None:
        raise UsageError("--r and --s are required")
    return ctx.args.r, ctx.args.s


# ============== Output helpers ==============


def morphism_out(morphism: Morphism, params: Params) -> Dict[str, Any]:
    return MorphismOut(
        src=morphism.src,
        dst=morphism.dst,
        terms=[TermOut(diagram=d.to_dict(), coeff=params.fmt(c)) for d, c in morphism.terms],
    ).model_dump()


def _morphism_rows(morphism: Morphism, params: Params) -> List[Dict[str, Any]]:
    return [
        {"diagram": json.dumps(d.to_dict(), separators=(",", ":")), "coeff": params.fmt(c)}
        for d, c in morphism.terms
    ]


def _check_rows(checks) -> List[Dict[str, Any]]:
    return [
        RelationCheckOut(relation=c.relation, context=c.context, passed=c.passed).model_dump(
            by_alias=True
        )
        for c in checks
    ]


def _colors(values, params: Params) -> List[str]:
    return [params.fmt(v) for v in values]


def _spectrum(table: Dict[Any, int], params: Params) -> List[Dict[str, Any]]:
    keys = sorted(table, key=params.sort_key)
    return [{"eigenvalue": params.fmt(k), "multiplicity": table[k]} for k in keys]


# ============== Commands ==============


def cmd_normalize(ctx: Context) -> Report:
    (path,) = _files(ctx, 1)
    morphism = load_morphism(_read_json(path), ctx, direct=True)
    return Report(
        data=morphism_out(morphism, ctx.params), rows=_morphism_rows(morphism, ctx.params)
    )


def cmd_hom_basis(ctx: Context) -> Report:
    src, dst = parse_word(ctx.args.src), parse_word(ctx.args.dst)
    basis = ctx.engine.basis(src, dst)
    rows = [
        {"index": k, "diagram": json.dumps(d.to_dict(), separators=(",", ":"))}
        for k, d in enumerate(basis)
    ]
    return Report(data=[d.to_dict() for d in basis], rows=rows)


def cmd_hom_dim(ctx: Context) -> Report:
    src, dst = parse_word(ctx.args.src), parse_word(ctx.args.dst)
    return Report(text=str(hom_dim(src, dst, ctx.params.level)))


def cmd_compose(ctx: Context) -> Report:
    outer_path, inner_path = _files(ctx, 2)
    outer = load_morphism(_read_json(outer_path), ctx)
    inner = load_morphism(_read_json(inner_path), ctx)
    result = ctx.engine.compose(outer, inner)
    return Report(data=morphism_out(result, ctx.params), rows=_morphism_rows(result, ctx.params))


def cmd_verify_relations(ctx: Context) -> Report:
    relation_ids = ctx.args.relation or relation_catalog()
    engine = ctx.engine

    def verify(relation_id: str):
        return engine.verify_relations(
            [relation_id], ctx.args.max_context, ctx.args.sample, ctx.settings.seed
        )

    batches = run_cases_sync(relation_ids, verify, ctx.settings.max_workers)
    checks = [check for batch in batches for check in batch]
    rows = _check_rows(checks)
    return Report(data=rows, rows=rows, passed=all(c.passed for c in checks))


def cmd_corner(ctx: Context) -> Report:
    if ctx.args.r is not None and ctx.args.s is not None:
        word = corner_word(ctx.args.r, ctx.args.s)
    else:
        word = parse_word(ctx.args.dst)
    algebra = corner_algebra(word, ctx.engine)
    data = {
        "word": word,
        "dim": algebra.dim,
        "commutative": algebra.is_commutative(),
        "associative": algebra.is_associative(ctx.args.sample, ctx.settings.seed),
        "basis": [d.to_dict() for d in algebra.basis],
    }
    row = {k: data[k] for k in ("word", "dim", "commutative", "associative")}
    return Report(data=data, rows=[row])


def cmd_hecke_check(ctx: Context) -> Report:
    r, s = _rs(ctx)
    checks = check_hecke_relations(r, s, ctx.engine)
    span = hecke_span_rank(r, s, ctx.engine)
    rows = _check_rows(checks)
    passed = all(c.passed for c in checks) and span["rank"] == span["dim"]
    return Report(data={"relations": rows, "span": span}, rows=rows, passed=passed)


def cmd_bubble(ctx: Context) -> Report:
    dots = ctx.args.dots
    if dots is None or dots < 0:
        raise UsageError("--dots must be a non-negative integer")
    value = bubble_value(ctx.params, dots, clockwise=ctx.args.clockwise)
    return Report(text=ctx.params.fmt(value))


def cmd_eigenprofile(ctx: Context) -> Report:
    a, b = parse_word(ctx.args.dst), parse_word(ctx.args.src)
    profile = eigen_profile(a, b, ctx.engine)
    ordered = sorted(profile.table.items(), key=lambda kv: [ctx.params.sort_key(c) for c in kv[0]])
    rows = [
        EigenRowOut(word=a, colors=_colors(colors, ctx.params), multiplicity=m).model_dump()
        for colors, m in ordered
    ]
    return Report(data=rows, rows=_csv_colors(rows))


def _csv_colors(rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    return [{**row, "colors": ";".join(row["colors"])} for row in rows]


def _character_rows(table, params: Params) -> List[Dict[str, Any]]:
    def key(item):
        (word, colors), _ = item
        return (len(word), word, [params.sort_key(c) for c in colors])

    return [
        CharacterRowOut(word=word, colors=_colors(colors, params), multiplicity=m).model_dump()
        for (word, colors), m in sorted(table.items(), key=key)
    ]


def cmd_character(ctx: Context) -> Report:
    table = character_std(_shape(ctx), ctx.args.max_len, ctx.params)
    rows = _character_rows(table, ctx.params)
    return Report(data=rows, rows=_csv_colors(rows))


def cmd_std_dim(ctx: Context) -> Report:
    word = parse_word(ctx.args.dst)
    return Report(text=str(std_dim(_shape(ctx), word, ctx.engine)))


def cmd_paths(ctx: Context) -> Report:
    found = paths_to(_shape(ctx), ctx.args.max_len, ctx.params)
    data = [p.to_dict(ctx.params) for p in found]
    rows = [{"word": p["word"], "colors": ";".join(p["colors"])} for p in data]
    return Report(data=data, rows=rows)


def cmd_k_apply(ctx: Context) -> Report:
    residue = _residue(ctx)
    vector = KVector.basis(_shape(ctx))
    op, sector = Op(ctx.args.op), Sector(ctx.args.sector)
    result = apply_op(op, sector, residue, vector, ctx.params, ctx.settings.truncation)
    rows = [KTermOut(**term).model_dump() for term in result.to_list()]
    data = {"terms": rows, "truncated": result.truncated}
    csv_rows = [{"shape": json.dumps(r["shape"]), "coeff": r["coeff"]} for r in rows]
    return Report(data=data, rows=csv_rows)


def cmd_commutator_check(ctx: Context) -> Report:
    params = ctx.params
    truncation = ctx.settings.truncation
    given = _residue(ctx, required=False)
    window = [given] if given is not None else residue_window(params, truncation)
    pairs = [(i, j) for i in window for j in window]
    sector = Sector(ctx.args.sector)

    def check(pair):
        return commutator_check(pair[0], pair[1], truncation, params, sector)

    results = run_cases_sync(pairs, check, ctx.settings.max_workers)
    rows = [
        {"i": r["i"], "j": r["j"], "checked": r["checked"], "pass": r["passed"]} for r in results
    ]
    return Report(data=results, rows=rows, passed=all(r["passed"] for r in results))


def cmd_semisimple_check(ctx: Context) -> Report:
    verdict = SemisimpleOut(**semisimple_check(ctx.params)).model_dump()
    row = {**verdict, "reasons": "; ".join(verdict["reasons"])}
    return Report(data=verdict, rows=[row])


def cmd_orbits(ctx: Context) -> Report:
    data = orbit_decomposition(ctx.params)
    rows = [
        {"members": ";".join(o["members"]), "values": ";".join(o["values"])}
        for o in data["orbits"]
    ]
    return Report(data=data, rows=rows)


def cmd_tau(ctx: Context) -> Report:
    (path,) = _files(ctx, 1)
    result = ctx.engine.apply_tau(load_morphism(_read_json(path), ctx))
    return Report(data=morphism_out(result, ctx.params), rows=_morphism_rows(result, ctx.params))


def cmd_slice(ctx: Context) -> Report:
    (path,) = _files(ctx, 1)
    data = _read_json(path)
    try:
        diagram = _diagram_from(DiagramIn.model_validate(data))
    except ValidationError as exc:
        raise UsageError(f"malformed diagram: {exc.errors()[0]['msg']}") from exc
    layer_word = slice_diagram(diagram)
    rows = [layer.to_dict() for layer in layer_word.layers]
    return Report(data=layer_word.to_dict(), rows=rows)


def cmd_jucys_murphy(ctx: Context) -> Report:
    r, s = _rs(ctx)
    side = Side(ctx.args.side)
    element = jucys_murphy(ctx.args.index, r, s, side, ctx.engine)
    spectrum = _spectrum(jm_spectrum(ctx.args.index, r, s, side, ctx.engine), ctx.params)
    data = {"element": morphism_out(element, ctx.params), "spectrum": spectrum}
    return Report(data=data, rows=spectrum)


def cmd_bimodule_check(ctx: Context) -> Report:
    a, b = parse_word(ctx.args.dst), parse_word(ctx.args.src)
    report = ctx.engine.bimodule_iso_check(a, b)
    rows = [{"direction": k, "pass": v} for k, v in report.items()]
    return Report(data=rows, rows=rows, passed=all(report.values()))


def cmd_weight(ctx: Context) -> Report:
    down, up = wt(_shape(ctx), ctx.params)
    parts = (("down", down), ("up", up), ("total", down + up))
    data = {name: WeightOut(**w.to_dict(ctx.params)).model_dump() for name, w in parts}
    rows = [
        {"part": name, "fund": json.dumps(w["fund"]), "roots": json.dumps(w["roots"])}
        for name, w in data.items()
    ]
    return Report(data=data, rows=rows)


HANDLERS: Dict[str, Callable[[Context], Report]] = {
    "normalize": cmd_normalize,
    "hom-basis": cmd_hom_basis,
    "hom-dim": cmd_hom_dim,
    "compose": cmd_compose,
    "verify-relations": cmd_verify_relations,
    "corner": cmd_corner,
    "hecke-check": cmd_hecke_check,
    "bubble": cmd_bubble,
    "eigenprofile": cmd_eigenprofile,
    "character": cmd_character,
    "std-dim": cmd_std_dim,
    "paths": cmd_paths,
    "k-apply": cmd_k_apply,
    "commutator-check": cmd_commutator_check,
    "semisimple-check": cmd_semisimple_check,
    "orbits": cmd_orbits,
    "tau": cmd_tau,
    "slice": cmd_slice,
    "jucys-murphy": cmd_jucys_murphy,
    "bimodule-check": cmd_bimodule_check,
    "weight": cmd_weight,
}

# verification commands whose failure maps to exit code 1
VERIFYING = {"verify-relations", "hecke-check", "commutator-check", "bimodule-check"}


# ============== Parser and rendering ==============


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="obrauer", description="Cyclotomic oriented Brauer engine")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config")
    parser.add_argument("--format", dest="output", choices=["json", "csv"])
    parser.add_argument("--metrics")
    parser.add_argument("--log-level")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--level", type=int)
    parser.add_argument("--char", type=int)
    parser.add_argument("--u")
    parser.add_argument("--uprime")
    parser.add_argument("--size-limit", type=int)
    parser.add_argument("--truncation", type=int)
    parser.add_argument("--max-workers", type=int)

    parser.add_argument("--src", default="")
    parser.add_argument("--dst", default="")
    parser.add_argument("--diagram", action="append")
    parser.add_argument("--shape", default="empty")
    parser.add_argument("--max-len", type=int, default=4)
    parser.add_argument("--dots", type=int, default=0)
    direction = parser.add_mutually_exclusive_group()
    direction.add_argument("--clockwise", dest="clockwise", action="store_true", default=True)
    direction.add_argument("--counterclockwise", dest="clockwise", action="store_false")
    parser.add_argument("--sector", choices=[s.value for s in Sector], default="total")
    parser.add_argument("--op", choices=[o.value for o in Op], default="f")
    parser.add_argument("--residue")
    parser.add_argument("--side", choices=[s.value for s in Side], default="up")
    parser.add_argument("-i", "--index", type=int, default=1)
    parser.add_argument("--r", type=int)
    parser.add_argument("--s", type=int)
    parser.add_argument("--relation", action="append")
    parser.add_argument("--max-context", type=int, default=2)
    parser.add_argument("--sample", type=int)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    keys = (
        "output",
        "log_level",
        "seed",
        "level",
        "char",
        "u",
        "uprime",
        "size_limit",
        "truncation",
        "max_workers",
    )
    return {key: getattr(args, key) for key in keys}


def render(report: Report, output: str) -> str:
    if report.text is not None:
        return report.text + "\n"
    if output == "csv" and report.rows is not None:
        buffer = io.StringIO()
        if report.rows:
            writer = csv.DictWriter(
                buffer, fieldnames=list(report.rows[0].keys()), lineterminator="\n"
            )
            writer.writeheader()
            writer.writerows(report.rows)
        return buffer.getvalue()
    return json.dumps(report.data, indent=2, ensure_ascii=False) + "\n"


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        settings = configure_settings(build_settings(args.config, _overrides(args)))
    except ObrauerError as exc:
        sys.stderr.write(f"error: {exc.detail}\n")
        return 2

    LoggingConfig(
        log_level=settings.log_level,
        log_format=settings.log_format,
        log_dir=settings.log_dir,
        enable_file_logging=settings.enable_file_logging,
        enable_console_logging=settings.enable_console_logging,
        max_file_size=settings.log_max_file_size,
        backup_count=settings.log_backup_count,
    ).setup()
    log = ContextLogger("obrauer.cli")

    start = time.time()
    try:
        params = settings.to_params()
        log.bind(command=args.command, params_id=params.describe())
        engine = Engine(params, size_limit=settings.size_limit)
        ctx = Context(args=args, settings=settings, params=params, engine=engine, log=log)
        with COMMAND_DURATION.labels(command=args.command).time():
            report = HANDLERS[args.command](ctx)
    except ObrauerError as exc:
        log.error("Command failed", extra={"error": exc.detail})
        sys.stderr.write(f"error: {exc.detail}\n")
        return 2

    stdout.write(render(report, settings.output))
    log.info(
        "Command completed",
        extra={"passed": report.passed, "duration_ms": int((time.time() - start) * 1000)},
    )
    if args.metrics:
        write_metrics(args.metrics)
    if args.command in VERIFYING and not report.passed:
        return 1
    return 0
