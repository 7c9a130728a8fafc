"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the ``acceptance criteria`` section of the pytest
terminal summary.
"""

import math
import time

import mpmath
import numpy as np
import pytest
import sympy

from teichlen import algint, bounds, fields, fn_geometry, words
from teichlen.cli import run
from teichlen.precision import oracle_precision

UNIT_GRID = [(m, X) for m in (1, 2) for X in (1, 2, 3, 5)]


@pytest.fixture(scope="module")
def bolza():
    return words.bolza_generators()


@pytest.fixture(scope="module")
def unit_runs():
    start = time.perf_counter()
    runs = {key: algint.enumerate_reciprocal_units(*key) for key in UNIT_GRID}
    return runs, time.perf_counter() - start


@pytest.fixture(scope="module")
def seeded_pieces():
    rng = np.random.default_rng(20240601)
    return [fn_geometry.random_xpiece(rng, twist=0.0) for _ in range(50)]


def _bolza_systole_oracle():
    with oracle_precision():
        return float(2 * mpmath.acosh(1 + mpmath.sqrt(2)))


def test_ac01_bolza_systole(acceptance, capsys, tmp_path):
    out = tmp_path / "systole.json"
    start = time.perf_counter()
    code = run(["systole", "--preset", "bolza", "--max-word-len", "8", "--out", str(out)])
    elapsed = time.perf_counter() - start
    capsys.readouterr()
    import json

    value = json.loads(out.read_text())["systole"]
    err = abs(value - _bolza_systole_oracle())
    ok = code == 0 and err < 1e-9 and elapsed < 60
    acceptance("AC01 bolza systole", ok, f"value={value!r} |err|={err:.2e} time={elapsed:.1f}s")
    assert ok


def test_ac02_systole_lower_bound(acceptance, bolza):
    s = words.systole(bolza, 6)
    lower = algint.systole_lower_bound(2, 1)
    ok = s >= lower and lower == pytest.approx(math.log(2) / 8, rel=1e-15)
    acceptance("AC02 systole >= log2/(4dL)", ok, f"{s:.6f} >= {lower:.7f}")
    assert ok


def _sympy_units_m1(X):
    x = sympy.Symbol("x")
    found = {((1, -1), 1.0), ((1, 1), -1.0)}
    b = math.floor(2 * X)
    for a in range(-b, b + 1):
        P = sympy.Poly([1, a, 1], x)
        if P.is_irreducible and max(abs(complex(r)) for r in P.nroots()) <= X * (1 + 1e-12):
            for r in P.real_roots():
                found.add(((1, a, 1), round(float(r), 9)))
    return found


def test_ac03_counting_by_house(acceptance, unit_runs):
    runs, elapsed = unit_runs
    sizes = {k: len(v) for k, v in runs.items()}
    within = all(sizes[k] <= algint.count_bound(*k) for k in UNIT_GRID)
    brute = _sympy_units_m1(3)
    got = {(u.min_poly.coeffs, round(u.real_root, 9)) for u in runs[(1, 3)]}
    ok = within and sizes[(1, 3)] == 6 and got == brute and elapsed < 300
    detail = " ".join(f"U{m}({X})={n}<={algint.count_bound(m, X):g}" for (m, X), n in sizes.items())
    acceptance("AC03 |U_m(X)| <= 2m(4mX)^(m^2)", ok, f"{detail} time={elapsed:.1f}s")
    assert ok


def test_ac04_dimitrov_sweep(acceptance, unit_runs):
    runs, _ = unit_runs
    checked = violations = 0
    for units in runs.values():
        for u in units:
            if abs(u.house - 1.0) <= algint.HOUSE_TOL:
                continue
            checked += 1
            violations += not algint.check_dimitrov(u, u.degree // 2).passed
    ok = violations == 0 and checked > 0
    acceptance("AC04 house > 2^(1/(4d))", ok, f"checked={checked} violations={violations}")
    assert ok


def test_ac05_trace_gap(acceptance, bolza):
    field = fields.field_preset("x^2-2")
    elements = fields.harvest_traces(bolza, 6, field, tol=1e-5)
    for t in elements:
        fields.check_window(t)
    res = fields.gap_sweep(elements)
    ok = res["violations"] == 0 and res["pairs"] > 0 and res["min_gap"] > 0.25
    acceptance(
        "AC05 |t^2-t'^2| > 1/4 on Bolza traces",
        ok,
        f"traces={len(elements)} pairs={res['pairs']} violations={res['violations']} min_gap={res['min_gap']:.4f}",
    )
    assert ok


def test_ac06_eta_delta_shift(acceptance, seeded_pieces):
    worst = 0.0
    for x in seeded_pieces:
        for a in np.linspace(0.0, x.gluing, 100, endpoint=False):
            _, le = fn_geometry.xpiece_cross_lengths(x.with_twist(float(a)))
            ld, _ = fn_geometry.xpiece_cross_lengths(x.with_twist(float(a) + x.gluing))
            worst = max(worst, abs(le - ld))
    ok = worst < 1e-9
    acceptance("AC06 l(eta(a)) = l(delta(a + l_gamma))", ok, f"pieces=50 twists=100 max_err={worst:.2e}")
    assert ok


def test_ac07_twist_recovery(acceptance, seeded_pieces):
    rng = np.random.default_rng(7)
    total = good = 0
    worst = 0.0
    for x in seeded_pieces:
        for a in rng.uniform(0.0, x.gluing, 10):
            xa = x.with_twist(float(a))
            ld, le = fn_geometry.xpiece_cross_lengths(xa)
            got = fn_geometry.twist_recover(x.gluing, x.y1.l2, x.y2.l2, x.y1.l3, x.y2.l3, ld, le)
            err = abs(got - xa.twist)
            worst = max(worst, err)
            total += 1
            good += err < 1e-6
    ok = good == total == 500
    acceptance("AC07 twist round trip", ok, f"recovered={good}/{total} max_err={worst:.2e}")
    assert ok


def test_ac08_delta_bound(acceptance):
    rng = np.random.default_rng(8)
    reports = [fn_geometry.delta_bound_check(fn_geometry.random_xpiece(rng, 1.0, 4.0)) for _ in range(100)]
    passed = sum(r.passed for r in reports)
    ok = passed == 100
    acceptance("AC08 l(delta) < l1+l2+2l(gamma)+2l(a1)+2l(a2)", ok, f"pass={passed}/100 min_margin={min(r.margin for r in reports):.4f}")
    assert ok


def _fd(x):
    with oracle_precision() as mp:
        X = mp.mpf(x)
        h = min(X * mp.mpf("1e-6"), (X - 4) * mp.mpf("1e-4"))

        def L(v):
            return mp.log(mp.acosh((v - 2) / 2))

        return float((L(X + h) - L(X - h)) / (2 * h))


def test_ac09_calculus_lemma(acceptance):
    grid = 4 + np.logspace(-6, math.log10(1e9 - 4), 10_000)
    below = worst = 0
    for x in grid:
        x = float(x)
        d = bounds.teich_L_prime(x)
        below += not d > 1 / x**2
        worst = max(worst, abs(d / _fd(x) - 1))
    ok = below == 0 and worst < 1e-5
    acceptance("AC09 L'(x) > 1/x^2 and finite differences", ok, f"points=10000 violations={below} max_rel_fd_err={worst:.2e}")
    assert ok


def test_ac10_loop_domination(acceptance):
    gs = list(range(2, 1001)) + [10**4, 10**5, 10**6]
    bad = [g for g in gs if not bounds.minimal_loop_bound(g) < 2 * math.log(4 * g)]
    ok = not bad
    acceptance("AC10 minimal loop < 2log(4g)", ok, f"genera={len(gs)} violations={len(bad)}")
    assert ok


def test_ac11_counting_coherence(acceptance):
    rows, U, reports = bounds.counting_sweep(range(2, 1001), [2, 3, 4], [1.0, 2.0])
    failed = sum(not r.passed for r in reports)
    worst = 0.0
    for d in (2, 3, 4):
        for L in (1.0, 2.0):
            for g in range(2, 51):
                inp = bounds.CountingInputs.with_defaults(g, d, L)
                worst = max(worst, abs(bounds.sa_counting_bounds(inp).log_upper - bounds.sa_upper_direct(inp)))
    example = bounds.CountingInputs(g=3, d=2, L=1.0, sigma=1.0, B=math.e)
    worst = max(worst, abs(bounds.sa_counting_bounds(example).log_upper - bounds.sa_upper_direct(example)))
    ok = failed == 0 and worst < 1e-9
    acceptance("AC11 counting rate <= C <= U L d^2", ok, f"checks={len(reports)} failed={failed} U={U:.4f} max_log_err={worst:.2e}")
    assert ok


def test_ac12_short_system(acceptance, bolza):
    rep = words.short_system_check(bolza, 2, 0.0866, 6)
    bound = 20 * math.log(8) + 8 * math.asinh(1 / math.sinh(0.0433))
    ok = rep.passed and rep.lhs >= 15 and f"bound = {bound!r}" in rep.notes
    acceptance("AC12 >= 15 classes below the length bound", ok, f"found={rep.lhs} required={rep.rhs} bound={bound:.4f}")
    assert ok


DETERMINISM_RUNS = [
    ["spectrum", "--max-word-len", "5", "--cutoff", "7"],
    ["systole", "--max-word-len", "8"],
    ["enumerate-units", "--m", "2", "--X", "3"],
    ["exp-length", "--length", "0.9624236501192069", "--d", "1"],
    ["trace-gap", "--max-word-len", "4"],
    ["xpiece", "--count", "10", "--twists", "20", "--seed", "5"],
    ["twist-recover", "--count", "5", "--twists", "3", "--seed", "5"],
    ["bounds", "--sweep", "g=2..200"],
    ["counting", "--g-max", "100"],
    ["distance-bound", "--g", "4", "--d", "3"],
]


def test_ac13_determinism(acceptance, tmp_path, capsys):
    same = 0
    for i, argv in enumerate(DETERMINISM_RUNS):
        outs = []
        for k in range(2):
            path = tmp_path / f"{i}-{k}.out"
            run(argv + ["--out", str(path)])
            outs.append(path.read_bytes())
        same += outs[0] == outs[1] and len(outs[0]) > 0
    capsys.readouterr()
    ok = same == len(DETERMINISM_RUNS)
    acceptance("AC13 byte-identical reruns", ok, f"commands={same}/{len(DETERMINISM_RUNS)}")
    assert ok
