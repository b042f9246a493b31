"""Command-line front end.

Every subcommand takes a substitution file (``LETTER -> WORD`` per line).
Recognizability of the rule is assumed, not checked.

Exit codes: 0 ok, 2 invalid substitution/config, 3 numeric non-convergence,
4 assumption violated, 5 cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path


from . import __version__
from .address import domain, parent_set
from .errors import ConfigError, IIETError, SubstitutionError
from .iet import (
    DEFAULT_MAX_PIECES,
    build_approximant,
    exact_step,
    merge_adjacent,
    power,
    search_configurations,
)
from .partition import (
    DEFAULT_MAX_ADDRESSES,
    config_from_json,
    count_dual_orders,
    describe_config,
    enumerate_dual_orders,
    self_similar_config,
)
from .render import RenderSpec, flow_view_csv, flow_view_svg, iet_graph_csv, iet_graph_svg
from .spectral import coincidence_check, convergence_diagnostic, self_similarity_check, spectral_coefficient
from .subst import DEFAULT_MAX_WORD, load_system, parse_substitution, primitivity_check


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def _vec(v) -> str:
    return "(" + ", ".join(_fmt(float(x)) for x in v) + ")"


def _load(args):
    try:
        text = Path(args.rule).read_text()
    except OSError as exc:
        raise SubstitutionError(f"cannot read rule file: {exc}") from exc
    rule = parse_substitution(text)
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    assume = args.assume_minimal or bool(data.get("assume_minimal", False))
    system = load_system(rule, assume_minimal=assume)
    config = config_from_json(rule, system.perron, data)
    return system, config


def _write(args, text: str) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")


def _parse_exps(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(e) for e in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse exponent range {text!r}; expected E1..E2") from exc


def _parse_powers(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"cannot parse powers {text!r}; expected J1,J2,...") from exc


def cmd_analyze(args) -> int:
    system, config = _load(args)
    rule, m, perron = system.rule, system.matrix, system.perron
    primitive, k = primitivity_check(m)
    print(f"substitution: {rule}")
    print("transition matrix M:")
    for row in m.tolist():
        print("  " + " ".join(f"{v:3d}" for v in row))
    print(f"expansion factor lambda = {_fmt(perron.lam)}")
    print(f"frequencies r = {_vec(perron.r)}")
    print(f"natural lengths l = {_vec(perron.l)}")
    print(f"primitive: {'yes (M^' + str(k) + ' > 0)' if primitive else 'no (minimality asserted by user)'}")
    print(f"|alphabet| = {rule.size}, |domain| = {len(domain(rule))}")
    for a in rule.alphabet:
        print(f"  T_{a} = {{{', '.join(map(str, parent_set(rule, a)))}}}")
    print(f"dual substitution choices: {count_dual_orders(rule)}")
    print(describe_config(config))
    print("recognizability: assumed (not verified)")
    return 0


def cmd_iet(args) -> int:
    _, config = _load(args)
    f = build_approximant(config, args.level)
    if args.power != 1:
        f = power(f, args.power, args.max_pieces)
    if args.merge is not None:
        f = merge_adjacent(f, args.merge)
    _write(args, f.to_csv())
    print(f"{len(f)} pieces", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    _, config = _load(args)
    x = args.x
    for step in range(1, args.power + 1):
        x, depth = exact_step(config, x, args.max_depth)
        print(f"step {step}: {x:.17g} (address increased at level {depth})")
    print(f"{x:.17g}")
    return 0


def cmd_flowview(args) -> int:
    _, config = _load(args)
    spec = RenderSpec(
        level=args.level,
        window=args.window,
        width=args.width,
        height=args.height,
        lengths="natural" if args.natural else "unit",
        max_addresses=args.max_addresses,
        max_word=args.max_word,
    )
    _write(args, flow_view_csv(config, spec) if args.format == "csv" else flow_view_svg(config, spec))
    return 0


def cmd_ietgraph(args) -> int:
    _, config = _load(args)
    f = build_approximant(config, args.level)
    if args.power != 1:
        f = power(f, args.power, args.max_pieces)
    spec = RenderSpec(width=args.size, height=args.size, connectors=not args.no_connectors)
    _write(args, iet_graph_csv(f) if args.format == "csv" else iet_graph_svg(f, spec))
    return 0


def cmd_spectral(args) -> int:
    _, config = _load(args)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["j", "value", "error_bound", "level"])
    for j in _parse_powers(args.powers):
        est = spectral_coefficient(config, args.level, j, args.centered, args.max_pieces)
        writer.writerow([est.j, f"{est.value:.17g}", f"{est.error_bound:.17g}", est.level])
    _write(args, buf.getvalue())
    return 0


def cmd_coincidence(args) -> int:
    system, _ = _load(args)
    w = coincidence_check(system.rule)
    if w is None:
        print("no coincidence")
    else:
        print(f"coincidence at N={w.power}, j={w.position} (letter {w.letter})")
    return 0


def cmd_convergence(args) -> int:
    _, config = _load(args)
    table = convergence_diagnostic(
        config, args.samples, _parse_exps(args.exps), cluster_radius=args.radius, max_pieces=args.max_pieces
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "exponent", "power", "value", "distance"])
    for x, e, j, v, d in table.rows():
        writer.writerow([f"{x:.17g}", e, j, f"{v:.17g}", f"{d:.17g}"])
    _write(args, buf.getvalue())
    for e, j, n, med in zip(table.exponents, table.powers, table.levels, table.medians()):
        print(f"e={e} power={j} level={n} median distance={med:.6g}", file=sys.stderr)
    counts = table.cluster_counts()
    print(f"clusters per sample at radius {args.radius}: max {counts.max()}", file=sys.stderr)
    return 0


def cmd_selfsim(args) -> int:
    system, _ = _load(args)
    config, kappa = self_similar_config(system.rule, system.perron)
    report = self_similarity_check(config, kappa, args.level, args.grid, args.tol)
    print(describe_config(config))
    print(report.summary())
    return 0


def cmd_duals(args) -> int:
    system, _ = _load(args)
    rule = system.rule
    count, orders = enumerate_dual_orders(rule, cap=args.max_duals)
    print(f"dual substitution choices: {count}")
    if args.enumerate:
        for i, order in enumerate(orders, start=1):
            parts = ", ".join(f"{a} -> {''.join(b.letter for b in order[a])} [{' '.join(map(str, order[a]))}]"
                              for a in rule.alphabet)
            print(f"  {i}: {parts}")
    if args.fib2_search:
        sq = rule.square()
        sq_system = load_system(sq, assume_minimal=True)
        results = search_configurations(sq, sq_system.perron, args.search_level, args.merge_tol)
        print(f"search over squared rule {sq}: level {args.search_level}, merge tolerance {args.merge_tol:g}")
        for r in results:
            print(f"  {r.config.identity()}  pieces {r.pieces} merged {r.merged_pieces}")
        best = results[0]
        print(f"minimum merged piece count: {best.merged_pieces} ({best.config.identity()})")
        # how deep the best configuration must go before its end pieces merge too
        for n in range(args.search_level + 1, args.search_level + 41):
            merged = len(merge_adjacent(build_approximant(best.config, n), args.merge_tol))
            if merged < best.merged_pieces:
                print(f"  best configuration reaches {merged} merged pieces at level {n}")
                if merged <= 2:
                    break
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iietlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("rule", help="substitution file, one 'LETTER -> WORD' per line")
    common.add_argument("--config", help="JSON file with initial_order, dual_order, assume_minimal")
    common.add_argument("--assume-minimal", action="store_true", help="accept a non-primitive rule as minimal")
    common.add_argument("--max-addresses", type=int, default=DEFAULT_MAX_ADDRESSES)
    common.add_argument("--max-word", type=int, default=DEFAULT_MAX_WORD)
    common.add_argument("--max-pieces", type=int, default=DEFAULT_MAX_PIECES)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="matrix, Perron data, parent sets")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("iet", parents=[common], help="approximant piece table as CSV")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--merge", type=float, default=None, metavar="TOL")
    p.add_argument("--out")
    p.set_defaults(func=cmd_iet)

    p = sub.add_parser("eval", parents=[common], help="exact orbit of a point")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--max-depth", type=int, default=64)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("flowview", parents=[common], help="flow view figure")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--window", type=float, default=10.0)
    p.add_argument("--natural", action="store_true", help="natural tile lengths from the left eigenvector")
    p.add_argument("--width", type=int, default=800)
    p.add_argument("--height", type=int, default=600)
    p.add_argument("--format", choices=("svg", "csv"), default="svg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_flowview)

    p = sub.add_parser("ietgraph", parents=[common], help="graph of an approximant or its power")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--size", type=int, default=600)
    p.add_argument("--no-connectors", action="store_true")
    p.add_argument("--format", choices=("svg", "csv"), default="svg")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ietgraph)

    p = sub.add_parser("spectral", parents=[common], help="spectral coefficients with error bounds")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--powers", required=True, metavar="J1,J2,...")
    p.add_argument("--centered", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("coincidence", parents=[common], help="coincidence search (constant length)")
    p.set_defaults(func=cmd_coincidence)

    p = sub.add_parser("convergence", parents=[common], help="distances |F^j(x) - x| along a power schedule")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--exps", required=True, metavar="E1..E2")
    p.add_argument("--radius", type=float, default=0.02)
    p.add_argument("--out")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("selfsim", parents=[common], help="self-similarity check")
    p.add_argument("--level", type=int, default=25)
    p.add_argument("--grid", type=int, default=10**4)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_selfsim)

    p = sub.add_parser("duals", parents=[common], help="dual substitution choices")
    p.add_argument("--enumerate", action="store_true")
    p.add_argument("--fib2-search", action="store_true",
                   help="search all initial/dual orders of the squared rule for the fewest merged pieces")
    p.add_argument("--search-level", type=int, default=8)
    p.add_argument("--merge-tol", type=float, default=1e-9)
    p.add_argument("--max-duals", type=int, default=10**6)
    p.set_defaults(func=cmd_duals)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        precision = os.environ.get("IIETLAB_PRECISION", "binary64")
        if precision not in ("", "binary64"):
            raise ConfigError(f"IIETLAB_PRECISION={precision!r} is not supported; only binary64")
        return args.func(args)
    except IIETError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
