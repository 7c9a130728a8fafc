import math

import mpmath
import numpy as np
import pytest

from teichlen.errors import NoConsistentTwist
from teichlen.fn_geometry import (
    XPiece,
    YPiece,
    chain_length_bound_check,
    delta_bound_check,
    delta_length_curve,
    delta_length_oracle,
    hexagon_solve,
    random_xpiece,
    twist_recover,
    xpiece_cross_lengths,
    ypiece_group,
)
from teichlen.isometry import compose, translation_length
from teichlen.precision import ENV_VAR


def recover(x):
    ld, le = xpiece_cross_lengths(x)
    return twist_recover(x.gluing, x.y1.l2, x.y2.l2, x.y1.l3, x.y2.l3, ld, le)


def test_hexagon_symmetric():
    a, b, c = hexagon_solve(1.0, 1.0, 1.0)
    assert a == b == c


def test_hexagon_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(500):
        sides = tuple(rng.uniform(0.05, 5.0, 3))
        back = hexagon_solve(*hexagon_solve(*sides))
        assert back == pytest.approx(sides, abs=1e-10)


def test_hexagon_against_extended_precision():
    for sides in [(1.0, 1.0, 1.0), (0.3, 1.7, 2.2), (4.0, 0.1, 0.5)]:
        got = hexagon_solve(*sides)
        with mpmath.workdps(40):
            a, b, c = map(mpmath.mpf, sides)
            ref = mpmath.acosh((mpmath.cosh(c) + mpmath.cosh(a) * mpmath.cosh(b)) / (mpmath.sinh(a) * mpmath.sinh(b)))
        assert got[2] == pytest.approx(float(ref), abs=1e-12)


def test_hexagon_rejects_nonpositive():
    with pytest.raises(ValueError):
        hexagon_solve(0.0, 1.0, 1.0)


def check_pants(l1, l2, l3, tol=1e-9):
    A, B = ypiece_group(YPiece(l1, l2, l3))
    assert translation_length(A) == pytest.approx(l1, abs=tol)
    assert translation_length(B) == pytest.approx(l2, abs=tol)
    assert translation_length(compose(A, B).inverse()) == pytest.approx(l3, abs=tol)
    assert A.trace > 2 and B.trace > 2 and compose(A, B).trace < -2
    return A, B


def test_ypiece_symmetric():
    A, B = check_pants(2.0, 2.0, 2.0)
    for T in (A, B, compose(A, B)):
        assert abs(T.trace) == pytest.approx(2 * math.cosh(1.0), abs=1e-12)


def test_ypiece_lengths():
    check_pants(2.0, 3.0, 4.0)
    A, B = check_pants(0.01, 0.01, 0.01, tol=1e-7)
    assert abs(A.trace) == pytest.approx(2.0, abs=1e-4)


def test_ypiece_random_triples():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        check_pants(*rng.uniform(0.1, 10.0, 3), tol=1e-9)


def test_ypiece_validation():
    with pytest.raises(ValueError):
        YPiece(1.0, 2.0, 150.0)
    with pytest.raises(ValueError):
        YPiece(0.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        XPiece(1.0, YPiece(1.0, 2.0, 2.0), YPiece(1.5, 2.0, 2.0))


def test_eta_is_delta_shifted_by_full_turn():
    rng = np.random.default_rng(2)
    for _ in range(3):
        x = random_xpiece(rng)
        worst = 0.0
        for a in np.linspace(-x.gluing, 2 * x.gluing, 100):
            _, le = xpiece_cross_lengths(x.with_twist(a))
            ld, _ = xpiece_cross_lengths(x.with_twist(a + x.gluing))
            worst = max(worst, abs(le - ld))
        assert worst < 1e-9


def test_vectorized_curve_matches_matrix_words():
    x = random_xpiece(np.random.default_rng(9))
    alphas = np.linspace(-2, 2, 17)
    curve = delta_length_curve(x, alphas)
    for a, v in zip(alphas, curve):
        assert v == pytest.approx(xpiece_cross_lengths(x.with_twist(a))[0], abs=1e-11)


def test_symmetric_piece_minimum_at_zero_twist():
    x = XPiece.from_lengths(1.0, 2.0, 2.0, 2.0, 2.0)
    alphas = np.linspace(-1.0, 1.0, 2001)
    curve = delta_length_curve(x, alphas)
    assert alphas[np.argmin(curve)] == pytest.approx(0.0, abs=1e-12)
    assert curve == pytest.approx(curve[::-1], abs=1e-12)


def test_delta_at_zero_twist_against_oracle():
    x = XPiece.from_lengths(2.0, 2.0, 2.0, 2.0, 2.0)
    assert xpiece_cross_lengths(x)[0] == pytest.approx(delta_length_oracle(x), abs=1e-12)
    rng = np.random.default_rng(4)
    for _ in range(10):
        x = random_xpiece(rng)
        assert xpiece_cross_lengths(x)[0] == pytest.approx(delta_length_oracle(x), abs=1e-10)


def test_oracle_in_double_mode(monkeypatch):
    monkeypatch.setenv(ENV_VAR, "double")
    x = XPiece.from_lengths(1.5, 2.0, 2.5, 1.2, 3.0, 0.4)
    assert delta_length_oracle(x) == pytest.approx(xpiece_cross_lengths(x)[0], abs=1e-12)


def test_delta_piecewise_monotone():
    rng = np.random.default_rng(8)
    for _ in range(20):
        x = random_xpiece(rng)
        curve = delta_length_curve(x, np.linspace(-x.gluing / 2, x.gluing / 2, 10_001))
        slopes = np.sign(np.diff(curve))
        slopes = slopes[slopes != 0]
        assert np.count_nonzero(slopes[1:] != slopes[:-1]) <= 2


def test_twist_recover_fixed_point():
    x = XPiece.from_lengths(1.5, 2.0, 2.5, 1.2, 3.0, 0.0)
    assert recover(x) == pytest.approx(0.0, abs=1e-6)
    sym = XPiece.from_lengths(1.0, 2.0, 2.0, 2.0, 2.0, 0.0)
    assert recover(sym) == pytest.approx(0.0, abs=1e-6)


def test_twist_recover_round_trip():
    rng = np.random.default_rng(21)
    for _ in range(10):
        x = random_xpiece(rng, twist=0.0)
        for frac in (0.37, 0.01, 0.5, 0.99):
            xa = x.with_twist(frac * x.gluing)
            assert recover(xa) == pytest.approx(xa.twist, abs=1e-6)


def test_twist_recover_infeasible():
    x = XPiece.from_lengths(1.5, 2.0, 2.5, 1.2, 3.0, 0.0)
    ld, le = xpiece_cross_lengths(x)
    with pytest.raises(NoConsistentTwist):
        twist_recover(1.5, 2.0, 2.5, 1.2, 3.0, ld - 0.1, le)
    with pytest.raises(NoConsistentTwist):
        twist_recover(1.5, 2.0, 2.5, 1.2, 3.0, ld, le + 0.5)


def test_chain_length_bound_on_constructed_pieces():
    rng = np.random.default_rng(13)
    for _ in range(50):
        x = random_xpiece(rng)
        a1, a2 = x.perpendicular_arcs()
        ld, _ = xpiece_cross_lengths(x)
        arc = a1 + a2 + abs(x.twist)
        assert chain_length_bound_check(arc, x.y1.l2, x.y2.l2, ld).passed


def test_chain_length_bound_edges():
    assert chain_length_bound_check(1.0, 2.0, 3.0, 7.0).passed
    assert not chain_length_bound_check(1.0, 2.0, 3.0, 7.0 + 1e-6).passed
    with pytest.raises(ValueError):
        chain_length_bound_check(0.0, 2.0, 3.0, 1.0)


def test_delta_bound():
    sym = XPiece.from_lengths(2.0, 2.0, 2.0, 2.0, 2.0, 1.0)
    rep = delta_bound_check(sym)
    assert rep.passed and rep.margin > 0
    thin = XPiece.from_lengths(0.05, 2.0, 2.0, 2.0, 2.0, 0.02)
    assert delta_bound_check(thin).passed
    rng = np.random.default_rng(17)
    for _ in range(100):
        assert delta_bound_check(random_xpiece(rng, 1.0, 4.0)).passed
