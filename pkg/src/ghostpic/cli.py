"""Command-line entry point.

Subcommands: catalog | chambers | mgs | ghosts | hn | path | picture | verify.
Catalog sources are --type-a N --orient WORD, --builtin NAME, or --catalog
FILE; classes are comma-separated brick names.  All randomness is seeded, so
identical invocations produce byte-identical outputs.  Exit codes: 0 success,
1 invariant violation or failed verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from ghostpic.catalog import (
    BUILTINS,
    BrickCatalog,
    ModuleClass,
    dump_catalog,
    generate_type_a,
    load_catalog,
)
from ghostpic.errors import (
    CatalogError,
    GhostpicError,
    GuardExceededError,
    InternalConsistencyError,
    NonGenericPathError,
    RankError,
)
from ghostpic.ghosts import classify_bifurcations, enumerate_ghosts, format_schedule
from ghostpic.greenpaths import (
    LinearPath,
    count_mgs,
    crossing_schedule,
    enumerate_mgs,
    find_linear_path,
    hn_stratification,
    resolve_mgs,
)
from ghostpic.render import (
    REPORT_SCHEMA,
    RenderOptions,
    export_report,
    render_picture,
)
from ghostpic.stability import chamber_graph
from ghostpic.verify import run_verify


def _add_source_args(parser: argparse.ArgumentParser):
    parser.add_argument("--type-a", type=int, metavar="N", dest="type_a")
    parser.add_argument("--orient", type=str, default=None)
    parser.add_argument("--builtin", type=str, default=None)
    parser.add_argument("--catalog", type=str, default=None, metavar="FILE")


def _catalog_from_args(args) -> BrickCatalog:
    chosen = [x for x in (args.type_a, args.builtin, args.catalog) if x is not None]
    if len(chosen) != 1:
        raise CatalogError(
            "choose exactly one catalog source: --type-a N --orient WORD, "
            "--builtin NAME, or --catalog FILE"
        )
    if args.type_a is not None:
        if args.orient is None and args.type_a == 1:
            args.orient = ""
        if args.orient is None:
            raise CatalogError("--type-a needs --orient WORD (letters L/R)")
        return generate_type_a(args.type_a, args.orient)
    if args.builtin is not None:
        if args.builtin not in BUILTINS:
            raise CatalogError(f"unknown builtin {args.builtin!r}; have: {sorted(BUILTINS)}")
        return BUILTINS[args.builtin]()
    with open(args.catalog, "r", encoding="utf-8") as fh:
        return load_catalog(fh.read())


def _class_from_args(args, catalog: BrickCatalog) -> ModuleClass:
    if args.cls:
        names = [x.strip() for x in args.cls.split(",") if x.strip()]
    else:
        names = [m.id for m in catalog.indecs]
    return ModuleClass(catalog, names)


def _parse_vec(text: str, n: int, flag: str):
    parts = [x.strip() for x in text.split(",")]
    if len(parts) != n:
        raise CatalogError(f"{flag} needs {n} comma-separated rationals")
    return tuple(Fraction(x) for x in parts)


def _emit(args, payload: str):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
        if not payload.endswith("\n"):
            sys.stdout.write("\n")


def _frac_str_vec(v):
    return [str(Fraction(x)) for x in v]


def cmd_catalog(args) -> int:
    catalog = _catalog_from_args(args)
    _emit(args, dump_catalog(catalog))
    return 0


def cmd_chambers(args) -> int:
    cls = _class_from_args(args, _catalog_from_args(args))
    graph = chamber_graph(cls)
    doc = {
        "schema": "ghostpic-chambers/1",
        "class": list(cls.bricks),
        "chambers": [
            {
                "id": c.id,
                "label": c.label.sorted(cls),
                "sample": _frac_str_vec(c.sample),
            }
            for c in graph.chambers
        ],
        "edges": [
            {"from": e.src, "to": e.dst, "wall": e.wall_brick} for e in graph.edges
        ],
        "source": graph.source,
        "sink": graph.sink,
    }
    _emit(args, json.dumps(doc, indent=1, sort_keys=True))
    return 0


def cmd_mgs(args) -> int:
    cls = _class_from_args(args, _catalog_from_args(args))
    graph = chamber_graph(cls)
    if not args.all:
        doc = {"schema": "ghostpic-mgs/1", "mgs_count": count_mgs(graph)}
        _emit(args, json.dumps(doc, indent=1, sort_keys=True))
        return 0
    sequences = []
    for mgs in enumerate_mgs(cls, graph):
        path = find_linear_path(cls, mgs.walls, radius=4)
        sequences.append(
            {
                "mgs": list(mgs.walls),
                "linear_realization": (
                    None
                    if path is None
                    else {"h": _frac_str_vec(path.h), "k": _frac_str_vec(path.k)}
                ),
                "chamber_path": list(mgs.chamber_ids),
            }
        )
    doc = {"schema": "ghostpic-mgs/1", "sequences": sequences}
    _emit(args, json.dumps(doc, indent=1, sort_keys=True))
    return 0


def cmd_ghosts(args) -> int:
    cls = _class_from_args(args, _catalog_from_args(args))
    ghosts = enumerate_ghosts(cls)
    report = classify_bifurcations(cls, ghosts)
    doc = {
        "schema": "ghostpic-ghosts/1",
        "class": list(cls.bricks),
        "ghosts": [
            {
                "kind": g.kind,
                "sequence": [g.a, g.b, g.c],
                "missing": g.missing,
                "display": g.display(),
                "minimal": g.minimal,
                "domain": {
                    "equalities": [list(e) for e in g.domain.equalities],
                    "weak": [list(w) for w in g.domain.weak],
                },
                "warnings": list(g.warnings),
            }
            for g in ghosts
        ],
        "bifurcations": [
            {
                "child": list(b.child),
                "parent": list(b.parent),
                "case": b.case,
                "splitting_wall": b.splitting_wall,
                "wall_kind": b.wall_kind,
            }
            for b in report.bifurcations
        ],
        "extension_links": [
            {
                "child": list(l.child),
                "parent": list(l.parent),
                "splitting_wall": l.splitting_wall,
            }
            for l in report.extension_links
        ],
        "unclassified": [
            {"child": list(c), "case": case, "reason": reason}
            for c, case, reason in report.unclassified
        ],
        "pathological": [
            {"child": list(a), "other": list(b)} for a, b in report.pathological
        ],
    }
    _emit(args, json.dumps(doc, indent=1, sort_keys=True))
    return 0


def cmd_hn(args) -> int:
    cls = _class_from_args(args, _catalog_from_args(args))
    if not args.mgs or not args.module:
        raise CatalogError("hn needs --mgs CSV and --module NAME")
    graph = chamber_graph(cls)
    walls = [x.strip() for x in args.mgs.split(",") if x.strip()]
    mgs = resolve_mgs(graph, [cls.catalog.indec(w).id for w in walls])
    from ghostpic.catalog import ModuleSum

    target = ModuleSum([cls.catalog.indec(x.strip()).id for x in args.module.split("+")])
    hn = hn_stratification(cls, graph, mgs, target)
    doc = {
        "schema": "ghostpic-hn/1",
        "mgs": list(mgs.walls),
        "module": list(target.ids),
        "layers": [
            {"index": i, "brick": mgs.walls[i - 1], "multiplicity": mult}
            for i, mult in hn.layers
        ],
        "witnesses": [
            {"component": comp, "layer": layer, "pair": tag}
            for comp, layer, tag in hn.witnesses
        ],
    }
    _emit(args, json.dumps(doc, indent=1, sort_keys=True))
    return 0


def cmd_path(args) -> int:
    cls = _class_from_args(args, _catalog_from_args(args))
    n = cls.catalog.quiver.n
    if not args.h or not args.k:
        raise CatalogError("path needs --h CSV and --k CSV")
    path = LinearPath(_parse_vec(args.h, n, "--h"), _parse_vec(args.k, n, "--k"))
    schedule = crossing_schedule(cls, path, include_ghosts=not args.no_ghosts)
    doc = {
        "schema": "ghostpic-path/1",
        "h": _frac_str_vec(path.h),
        "k": _frac_str_vec(path.k),
        "events": [
            {
                "t": str(e.t),
                "kind": e.kind,
                "label": e.label,
                "stable": e.stable,
                "concurrent": e.concurrent,
            }
            for e in schedule.events
        ],
        "tokens": format_schedule(schedule),
    }
    _emit(args, json.dumps(doc, indent=1, sort_keys=True))
    return 0


def cmd_picture(args) -> int:
    cls = _class_from_args(args, _catalog_from_args(args))
    if args.report:
        _emit(args, export_report(cls))
        return 0
    if cls.catalog.quiver.n != 3:
        raise RankError(
            "rank-3-only: the SVG picture needs exactly three simples; "
            "run with --report for the JSON report instead"
        )
    options = RenderOptions(include_extension_ghosts=args.ext_ghosts)
    _emit(args, render_picture(cls, options))
    return 0


def cmd_verify(args) -> int:
    results = run_verify(paths_per_fixture=args.paths, seed=args.seed)
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    _emit(args, "\n".join(lines) + "\n")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghostpic",
        description="Exact wall-and-chamber diagrams, green sequences and ghosts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_class=True):
        _add_source_args(p)
        if with_class:
            p.add_argument("--class", dest="cls", type=str, default=None, metavar="CSV")
        p.add_argument("--out", type=str, default=None, metavar="PATH")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("catalog", help="generate, validate or dump a catalog")
    common(p, with_class=False)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("chambers", help="chambers, labels and the green graph")
    common(p)
    p.set_defaults(func=cmd_chambers)

    p = sub.add_parser("mgs", help="maximal green sequences")
    common(p)
    p.add_argument("--all", action="store_true")
    p.set_defaults(func=cmd_mgs)

    p = sub.add_parser("ghosts", help="ghost census with domains and bifurcations")
    common(p)
    p.set_defaults(func=cmd_ghosts)

    p = sub.add_parser("hn", help="Harder-Narasimhan layers along an MGS")
    common(p)
    p.add_argument("--mgs", type=str, default=None, metavar="CSV")
    p.add_argument("--module", type=str, default=None, metavar="NAME")
    p.set_defaults(func=cmd_hn)

    p = sub.add_parser("path", help="crossing schedule of a linear path")
    common(p)
    p.add_argument("--h", type=str, default=None, metavar="CSV")
    p.add_argument("--k", type=str, default=None, metavar="CSV")
    p.add_argument("--no-ghosts", action="store_true")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("picture", help="rank-3 SVG picture or JSON report")
    common(p)
    p.add_argument("--report", action="store_true")
    p.add_argument("--ext-ghosts", action="store_true")
    p.set_defaults(func=cmd_picture)

    p = sub.add_parser("verify", help="run the full property suite")
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None, metavar="PATH")
    p.set_defaults(func=cmd_verify)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (CatalogError, RankError, NonGenericPathError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GuardExceededError as exc:
        summary = {"error": "guard-exceeded", "detail": str(exc)}
        if exc.count is not None:
            summary["count"] = exc.count
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)
        return 1
    except (InternalConsistencyError, GhostpicError) as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
