"""End-to-end acceptance suite.

Each test prints one ``ACCEPTANCE <n> PASS|FAIL: <detail>`` line (visible
with ``pytest -s`` or in the captured-output section of ``pytest -v``).
Run just this file with ``pytest tests/test_acceptance.py -v -s``.
"""
import random
import subprocess
import sys
import time
from fractions import Fraction
from math import comb, factorial

import pytest

from hx.bounds import closed_form_bounds, upper_bound_certificate
from hx.constructions import ConstructionParams, build_cancellative, build_union_free
from hx.core import Hypergraph, overlap_defect, to_mask
from hx.packing import DIRECT, audit_packing, greedy_conflict_free_packing
from hx.properties import (degree_spectrum, is_induced_packing, is_t_cancellative, is_t_cover_free,
                           is_t_union_free)
from hx.search import KINDS, SearchProblem, brute_force_oracle, erdos_matching_table, extremal_search

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}")
    return emit


def random_graph(rng, n, r, m):
    pool = [to_mask(rng.sample(range(n), r)) for _ in range(m)]
    return Hypergraph(n, r, tuple(sorted(set(pool))))


# 1 ---------------------------------------------------------------------------

KNOWN = [(5, 2, 6), (6, 2, 9), (7, 2, 12), (6, 3, 8)]


def test_1_known_extremal_values(report):
    lines, ok = [], True
    for n, r, expected in KNOWN:
        start = time.monotonic()
        res = extremal_search(SearchProblem("cancellative", 1, n, r))
        took = time.monotonic() - start
        good = res.proved and res.optimum == expected and took <= 60
        ok &= good
        lines.append(f"C1({n},{r})={res.optimum}/{expected} in {took:.2f}s")
    report(1, ok, "; ".join(lines))
    assert ok


# 2 ---------------------------------------------------------------------------

def test_2_erdos_matching_rows(report):
    start = time.monotonic()
    rows = {(row.n, row.k, row.nu): row for row in erdos_matching_table(2, 4)}
    took = time.monotonic() - start
    a, b = rows[(4, 2, 1)], rows[(6, 2, 2)]
    ok = (a.searched, a.formula, b.searched, b.formula) == (3, 3, 10, 10) and took <= 60
    report(2, ok, f"m(4,2,1)={a.searched} (formula {a.formula}), m(6,2,2)={b.searched} "
                  f"(formula {b.formula}) in {took:.2f}s")
    assert ok


# 3 ---------------------------------------------------------------------------

def _oracle_instances():
    out = []
    for kind in KINDS:
        ts = (0, 1, 2) if kind == "matching" else (1, 2, 3)
        for n in range(1, 21):
            for r in range(1, n + 1):
                if comb(n, r) <= 20:
                    out.extend((kind, t, n, r) for t in ts)
    return out


def test_3_oracle_equivalence(report):
    instances = _oracle_instances()
    bad = []
    for kind, t, n, r in instances:
        p = SearchProblem(kind, t, n, r)
        if extremal_search(p).optimum != brute_force_oracle(p):
            bad.append((kind, t, n, r))
    ok = len(instances) >= 30 and not bad
    report(3, ok, f"{len(instances)} instances, {len(bad)} disagreements {bad[:5]}")
    assert ok


# 4 ---------------------------------------------------------------------------

def test_4_degree_sum_identity(report):
    rng = random.Random(4)
    failures, total = 0, 0
    for t, k in [(2, 2), (2, 3), (3, 2)]:
        r = t * k
        for _ in range(100):
            n = rng.randint(r, r + 6)
            h = random_graph(rng, n, r, rng.randint(1, 25))
            spectrum = degree_spectrum(h, k)
            lhs = sum(s * c for s, c in spectrum.counts.items())
            failures += lhs != comb(r, k) * len(h) or not spectrum.identity_holds()
            total += 1
    report(4, failures == 0, f"{total} random tk-graphs, {failures} identity failures")
    assert failures == 0


# 5 ---------------------------------------------------------------------------

def test_5_upper_bound_consistency(report):
    lines, ok = [], True
    for n in range(4, 9):
        res = extremal_search(SearchProblem("cancellative", 2, n, 4, max_candidates=80))
        bound = Fraction(comb(n, 2), 3)
        cert = upper_bound_certificate(res.witness, 2, 2)
        good = (res.proved and res.optimum <= bound and cert.verdicts["degree_sum_identity"]
                and cert.verdicts["excess_bound"] and cert.passed)
        ok &= good
        lines.append(f"C2({n},4)={res.optimum}<={float(bound):.2f} cert={'ok' if cert.passed else 'bad'}")
    report(5, ok, "; ".join(lines))
    assert ok


# 6 ---------------------------------------------------------------------------

def test_6_construction_soundness(report):
    failures, slowest, sizes = [], 0.0, []
    for i in range(20):
        n = (25, 30)[i % 2]
        start = time.monotonic()
        res = build_cancellative(ConstructionParams(t=2, k=2, n=n, m0=8, seed=100 + i))
        slowest = max(slowest, time.monotonic() - start)
        sizes.append(len(res.H))
        if not is_t_cancellative(res.H, 2).holds:
            failures.append(("cancellative", n, 100 + i))
    for i in range(10):
        start = time.monotonic()
        res = build_union_free(ConstructionParams(t=2, k=2, n=25, m0=6, seed=200 + i))
        slowest = max(slowest, time.monotonic() - start)
        h = res.H
        sizes.append(len(h))
        if len(h) > 25 or not is_t_union_free(h, 3).holds or not is_t_cover_free(h, 2).holds:
            failures.append(("union-free", 25, 200 + i))
    ok = not failures and slowest <= 300
    report(6, ok, f"30 runs, |H| in [{min(sizes)},{max(sizes)}], slowest {slowest:.1f}s, failures {failures}")
    assert ok


# 7 ---------------------------------------------------------------------------

def test_7_packing_soundness(report):
    rng = random.Random(7)
    failures, copies = 0, 0
    for run in range(50):
        k = rng.choice((2, 3))
        m = rng.randint(k + 1, k + 4)
        template = random_graph(rng, m, k, rng.randint(1, 2 * m))
        e = rng.randint(2, 4)
        n = rng.randint(m + 2, 30)
        rec = greedy_conflict_free_packing(template, n, k, e, strategy=DIRECT, seed=run, budget=400)
        copies += len(rec.copies)
        audit = audit_packing(rec, e)
        failures += not (is_induced_packing(rec, k).holds and all(audit.values()))
    report(7, failures == 0, f"50 packings, {copies} copies, {failures} failures")
    assert failures == 0


# 8 ---------------------------------------------------------------------------

def test_8_fact_chain(report):
    rng = random.Random(8)
    violations = 0
    for _ in range(200):
        r = rng.choice((2, 3, 4))
        n = rng.randint(r, 8)
        h = random_graph(rng, n, r, rng.randint(1, 15))
        t = rng.choice((2, 3))
        if is_t_cover_free(h, t).holds and not is_t_union_free(h, t).holds:
            violations += 1
        if is_t_union_free(h, t).holds and not is_t_cover_free(h, t - 1).holds:
            violations += 1
    report(8, violations == 0, f"200 random hypergraphs, {violations} implication violations")
    assert violations == 0


# 9 ---------------------------------------------------------------------------

def test_9_overlap_defect_monotone(report):
    rng = random.Random(9)
    drops = 0
    for _ in range(500):
        sets = [rng.getrandbits(12) | 1 << rng.randrange(12) for _ in range(rng.randint(1, 6))]
        grown = list(sets)
        i = rng.randrange(len(grown))
        grown[i] |= rng.getrandbits(14)
        drops += overlap_defect(grown) < overlap_defect(sets)
    report(9, drops == 0, f"500 superset perturbations, {drops} decreases")
    assert drops == 0


# 10 --------------------------------------------------------------------------

def test_10_density_trend(report):
    """Reported, not asserted: the numbers are printed for inspection."""
    budgets = (500, 2000, 8000, 20000)
    by_budget = []
    for b in budgets:
        res = build_cancellative(ConstructionParams(t=2, k=2, n=50, m0=8, seed=1, packing_budget=b))
        by_budget.append(res.report.density_ratio)
    monotone = all(x <= y for x, y in zip(by_budget, by_budget[1:]))
    limit = closed_form_bounds(2, 4, 25, k=2).get("limit").value
    lines = ["  n    |H|   |H|/n^2   limit*2!C(n,2)/n^2   ratio"]
    for n in (25, 50, 100, 200):
        res = build_cancellative(ConstructionParams(t=2, k=2, n=n, m0=8, seed=1, packing_budget=3000))
        h = len(res.H)
        target = limit * factorial(2) * comb(n, 2) / n ** 2
        ratio = res.report.density_ratio
        bar = "#" * round(40 * float(ratio))
        lines.append(f"{n:>4} {h:>6} {h / n**2:>9.4f} {float(target):>20.4f} {float(ratio):>7.3f} |{bar}")
    lines.append(f"  (ratio 1.0 = {'#' * 40})")
    detail = (f"ratio vs budget {budgets} at n=50: {[round(float(x), 4) for x in by_budget]} "
              f"nondecreasing={monotone}\n" + "\n".join(lines))
    report(10, monotone, detail)


# 11 --------------------------------------------------------------------------

K3 = "3 2 3\n0 1\n0 2\n1 2\n"
SUBCOMMANDS = {
    "construct": ["construct", "cancellative", "--t", "2", "--k", "2", "--n", "20", "--m0", "6", "--budget", "300",
                  "--out", "{out}/run"],
    "verify": ["verify", "--property", "cancellative", "--t", "1", "{k3}", "--out", "{out}/verdict.json"],
    "search": ["search", "--kind", "cancellative", "--t", "1", "--n", "5", "--r", "2", "--out", "{out}/r.json"],
    "pack": ["pack", "--template", "{k3}", "--n", "15", "--k", "2", "--e", "3", "--budget", "500",
             "--out", "{out}/p.json"],
    "bounds": ["bounds", "--t", "2", "--k", "2", "--n", "40", "--out", "{out}/b.csv"],
    "certify": ["certify", "--t", "2", "--k", "2", "{h4}", "--out", "{out}/c.json"],
}


def _tree(path):
    return {p.relative_to(path).as_posix(): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def test_11_determinism(report, tmp_path):
    k3 = tmp_path / "k3.hg"
    k3.write_text(K3)
    h4 = tmp_path / "h4.hg"
    h4.write_text("6 4 2\n0 1 2 3\n0 1 4 5\n")
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 5\n")
    mismatched = []
    for name, args in sorted(SUBCOMMANDS.items()):
        runs = []
        for attempt in ("a", "b"):
            out = tmp_path / name / attempt
            out.mkdir(parents=True)
            argv = [sys.executable, "-m", "hx.cli", "--deterministic", "--config", str(cfg)]
            argv += [a.format(out=out, k3=k3, h4=h4) for a in args]
            proc = subprocess.run(argv, capture_output=True, cwd=tmp_path)
            runs.append((proc.returncode, proc.stdout, _tree(out)))
        if runs[0] != runs[1] or not runs[0][2] or runs[0][0] not in (0, 1):
            mismatched.append(name)
    ok = not mismatched
    report(11, ok, f"{len(SUBCOMMANDS)} subcommands run twice, mismatched {mismatched}")
    assert ok
