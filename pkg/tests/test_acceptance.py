"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or ``python tests/test_acceptance.py``.
"""

import re
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np

from iietlab.address import (
    Label,
    first_increasable,
    format_address,
    parent_set,
    parse_address,
    shift_oracle,
    vershik,
)
from iietlab.errors import MaxDepthExceeded
from iietlab.iet import build_approximant, disagreement, evaluate, exact_step
from iietlab.partition import enumerate_addresses, phi_n, self_similar_config
from iietlab.render import RenderSpec, flow_view_svg, iet_graph_svg
from iietlab.spectral import (
    coincidence_check,
    convergence_diagnostic,
    sample_grid,
    self_similarity_check,
    spectral_coefficient,
)
from iietlab.subst import load_system, parse_substitution, supertile

from conftest import FIVE, RULES, config_of, rule_of, system_of

NS = "{http://www.w3.org/2000/svg}"


def report(number, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


def test_c01_period_doubling_golden_values():
    s = system_of("pd")
    cfg = config_of("pd")
    phi1 = {str(p[0]): phi_n(cfg, p) for p in enumerate_addresses(s.rule, 1)}
    want = {"A1": 0.0, "B1": 1 / 3, "B2": 1 / 2, "A2": 2 / 3}
    errs = [
        abs(s.lam - 2.0),
        *np.abs(s.perron.r - [2 / 3, 1 / 3]),
        *(abs(phi1[k] - v) for k, v in want.items()),
    ]
    sets_ok = parent_set(s.rule, "A") == (Label("A", 1), Label("B", 1), Label("B", 2)) and parent_set(
        s.rule, "B"
    ) == (Label("A", 2),)
    report(1, sets_ok and max(errs) <= 1e-12, f"max error {max(errs):.2e}, parent sets {'ok' if sets_ok else 'wrong'}")


def test_c02_vershik_golden_case():
    rule = rule_of("pd")
    p = parse_address("B2.A2.A1")
    v, o = vershik(rule, p), shift_oracle(rule, p)
    want = parse_address("A1.B1.A2")
    report(2, v == want and o == want, f"V(B2.A2.A1) = {format_address(v)}, oracle {format_address(o)}")


def test_c03_vershik_oracle_exhaustive():
    checked, mismatches = 0, []
    for name in FIVE:
        rule = rule_of(name)
        for n in range(1, 7):
            for p in enumerate_addresses(rule, n):
                if first_increasable(rule, p) is None:
                    continue
                checked += 1
                if vershik(rule, p) != shift_oracle(rule, p):
                    mismatches.append((name, format_address(p)))
    report(3, not mismatches, f"{checked} addresses checked, {len(mismatches)} mismatches {mismatches[:3]}")


def test_c04_approximant_piece_law_and_tilings():
    bad, worst = [], 0.0
    for name in FIVE:
        cfg = config_of(name)
        labels = sum(len(w) for w in cfg.rule.images.values())
        k = cfg.rule.size
        for n in range(1, 13):
            f = build_approximant(cfg, n)
            if len(f) != n * (labels - k) + k:
                bad.append((name, n, len(f)))
            worst = max(worst, *f.tiling_errors())
    report(4, not bad and worst <= 1e-10, f"piece-count mismatches {bad}, worst tiling error {worst:.2e}")


def test_c05_disagreement_bound():
    worst_slack, failures = -np.inf, []
    for name in FIVE:
        cfg = config_of(name)
        for n in range(1, 11):
            d = disagreement(build_approximant(cfg, n), build_approximant(cfg, n + 3))
            bound = cfg.lam**-n + 1e-10
            worst_slack = max(worst_slack, d - bound)
            if d > bound:
                failures.append((name, n, d, bound))
    report(5, not failures, f"max(d - bound) = {worst_slack:.3g}, failures {failures[:3]}")


def test_c06_exact_matches_approximant():
    n = 12
    xs = sample_grid(1000)
    used, worst = 0, 0.0
    for name in FIVE:
        cfg = config_of(name)
        f = build_approximant(cfg, n)
        for x in xs:
            try:
                y, depth = exact_step(cfg, float(x), max_depth=n)
            except MaxDepthExceeded:
                continue
            used += 1
            worst = max(worst, abs(y - evaluate(f, float(x))))
    report(6, worst <= 1e-12, f"{used} points with depth <= {n}, max |exact - approximant| = {worst:.2e}")


def test_c07_spectral_identities():
    cfg = config_of("pd")
    h0 = spectral_coefficient(cfg, 20, 0).value
    h0c = spectral_coefficient(cfg, 20, 0, centered=True).value
    f = build_approximant(cfg, 20)
    xs = sample_grid(10**6)
    errs = {}
    for j in (1, 5, 13):
        # oracle: iterate the piece table pointwise, then a midpoint Riemann sum
        y = xs
        for _ in range(j):
            y = evaluate(f, y)
        errs[j] = abs(spectral_coefficient(cfg, 20, j).value - float(np.mean(xs * y)))
    ok = abs(h0 - 1 / 3) <= 1e-12 and abs(h0c - 1 / 12) <= 1e-12 and max(errs.values()) <= 1e-5
    detail = f"h(0) err {abs(h0 - 1 / 3):.1e}, centered err {abs(h0c - 1 / 12):.1e}, oracle errs " + ", ".join(
        f"j={j}: {e:.1e}" for j, e in errs.items()
    )
    report(7, ok, detail)


def _brute_columns(rule, max_power=6):
    for n in range(1, max_power + 1):
        words = [supertile(rule, a, n) for a in rule.alphabet]
        for j in range(len(words[0])):
            if len({w[j] for w in words}) == 1:
                return n, j + 1
    return None


def test_c08_coincidence_classification():
    got = {}
    for name in ("pd", "tm", "rs"):
        w = coincidence_check(rule_of(name))
        got[name] = None if w is None else (w.power, w.position)
    brute = {name: _brute_columns(rule_of(name)) for name in got}
    ok = got == {"pd": (1, 1), "tm": None, "rs": None} and got == brute
    report(8, ok, f"search {got}, brute force {brute}")


def test_c09_convergence_dichotomy():
    exps = list(range(6, 13))
    pd = convergence_diagnostic(config_of("pd"), 200, exps)
    med = pd.medians()
    pd_ok = all(a >= b for a, b in zip(med, med[1:])) and med[-1] < 0.02
    tm = convergence_diagnostic(config_of("tm"), 200, exps)
    clusters = tm.cluster_counts()
    far = int(np.sum(tm.distances.min(axis=0) > 0.1))
    tm_ok = clusters.max() <= 2 and far >= 1
    report(
        9,
        pd_ok and tm_ok,
        f"PD medians {[f'{m:.2e}' for m in med]}; TM max clusters {clusters.max()}, {far} samples always > 0.1 away",
    )


def test_c10_self_similarity():
    s = load_system(parse_substitution("A -> BBA\nB -> BA\n"))
    cfg, kappa = self_similar_config(s.rule, s.perron)
    rep = self_similarity_check(cfg, kappa, 25, 10**4, 1e-6)
    ok = rep.plus_passes != rep.minus_passes
    report(
        10,
        ok,
        f"passing sign {rep.passing_sign}; deviations +: {rep.max_dev_plus:.2e}, -: {rep.max_dev_minus:.2e}",
    )


def test_c11_fibonacci_squared_search(tmp_path):
    path = tmp_path / "fib.txt"
    path.write_text(RULES["fib"])
    proc = subprocess.run(
        [sys.executable, "-m", "iietlab", "duals", str(path), "--fib2-search"], capture_output=True, text=True
    )
    counts = [int(m) for m in re.findall(r"merged (\d+)", proc.stdout)]
    minimum = re.search(r"minimum merged piece count: (\d+)", proc.stdout)
    ok = proc.returncode == 0 and len(counts) == 24 and minimum is not None and 2 in counts
    report(
        11,
        ok,
        f"{len(counts)} configurations reported, minimum merged count "
        f"{minimum.group(1) if minimum else '?'} (needs a configuration with exactly 2)",
    )


def _cli_bytes(tmp_path, argv, name):
    out = tmp_path / name
    subprocess.run([sys.executable, "-m", "iietlab", *argv, "--out", str(out)], check=True, capture_output=True)
    return out.read_bytes()


def test_c12_rendering(tmp_path):
    cfg = config_of("pd")
    svg = flow_view_svg(cfg, RenderSpec(level=2))
    bands = ET.fromstring(svg).findall(f"{NS}g[@class='band']")
    spans = sorted((float(b.get("data-y")), float(b.get("data-height"))) for b in bands)
    err = max(
        [abs(spans[0][0]), abs(spans[-1][0] + spans[-1][1] - 1.0)]
        + [abs(a[0] + a[1] - b[0]) for a, b in zip(spans, spans[1:])]
    )
    f = build_approximant(cfg, 5)
    graph = ET.fromstring(iet_graph_svg(f, RenderSpec()))
    pieces = len(graph.findall(f"{NS}line[@class='piece']"))
    rule = tmp_path / "pd.txt"
    rule.write_text(RULES["pd"])
    runs = [
        (
            _cli_bytes(tmp_path, ["flowview", str(rule), "--level", "2"], f"v{i}.svg"),
            _cli_bytes(tmp_path, ["ietgraph", str(rule), "--level", "5"], f"g{i}.svg"),
        )
        for i in range(2)
    ]
    for blob in runs[0]:
        ET.fromstring(blob)
    stable = runs[0] == runs[1]
    ok = len(bands) == 8 and err <= 1e-9 and pieces == len(f) and stable
    report(12, ok, f"{len(bands)} bands, tiling error {err:.1e}, {pieces}/{len(f)} pieces drawn, byte-stable {stable}")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-v", "-s"]))
