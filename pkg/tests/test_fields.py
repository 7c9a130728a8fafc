import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from teichlen.errors import ArithmeticityViolated, NonIntegral, SameAbsTrace
from teichlen.fields import (
    LatticeRoundingError,
    RealField,
    embed_all,
    field_norm,
    field_preset,
    gap_constant,
    gap_sweep,
    harvest_traces,
    round_to_lattice,
    verify_gap,
)
from teichlen.words import bolza_generators

S2 = math.sqrt(2)


@pytest.fixture(scope="module")
def q2():
    return field_preset("x^2-2")


@pytest.fixture(scope="module")
def bolza_traces(q2):
    return harvest_traces(bolza_generators(), 6, q2)


def test_field_construction():
    f = field_preset("x^3-3x-1")
    assert f.degree == 3 and len(f.roots) == 3
    with pytest.raises(ValueError):
        RealField.from_poly((1, 0, 1))  # not totally real
    with pytest.raises(ValueError):
        RealField.from_poly((1, 0, -4))  # reducible
    with pytest.raises(ValueError):
        field_preset("nope")


def test_embeddings(q2):
    assert embed_all(q2.theta()) == pytest.approx([S2, -S2])
    assert embed_all(q2(3)) == pytest.approx([3, 3])
    assert embed_all(q2.element([1, 1])) == pytest.approx([1 + S2, 1 - S2], abs=1e-15)


def test_arithmetic(q2):
    t = q2.theta()
    assert (t * t).coords == (Fraction(2), Fraction(0))
    x = q2.element([1, 1])
    assert (x * (2 - t * 0) - x - x).is_zero()
    cubic = field_preset("x^3-3x-1")
    th = cubic.theta()
    # theta^3 = 3 theta + 1
    assert (th * th * th).coords == (Fraction(1), Fraction(3), Fraction(0))


def test_norms(q2):
    assert field_norm(q2.element([1, 1])) == pytest.approx(-1)
    assert field_norm(q2(3)) == pytest.approx(9)
    assert field_norm(q2.theta()) == pytest.approx(-2)
    assert q2.element([1, 1]).norm_exact() == -1
    with pytest.warns(NonIntegral):
        field_norm(q2.element([Fraction(1, 2), 0]))


def test_norm_of_random_integers_at_least_one():
    rng = np.random.default_rng(3)
    for name in ("x^2-2", "x^2-5", "x^3-3x-1"):
        f = field_preset(name)
        for _ in range(300):
            x = f.element(rng.integers(-6, 7, f.degree))
            if x.is_zero():
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("error")
                n = field_norm(x)
            assert abs(n) >= 1 - 1e-6
            assert abs(n - round(n)) < 1e-6
            assert round(n) == x.norm_exact()


def test_gap_constant():
    assert gap_constant(1) == 1
    assert gap_constant(2) == Fraction(1, 4)
    assert gap_constant(3) == Fraction(1, 16)
    for d in range(1, 9):
        assert gap_constant(d) * 4 ** (d - 1) == 1


def test_verify_gap_rational():
    Q = field_preset("Q")
    rep = verify_gap(Q(3), Q(4))
    assert rep.passed and rep.lhs == pytest.approx(7) and rep.rhs == 1
    with pytest.raises(SameAbsTrace):
        verify_gap(Q(3), Q(-3))


def test_verify_gap_window_violation(q2):
    t = q2.element([2, 1])  # 2 + sqrt2: conjugate of t^2 - 2 is in [-2, 2]
    bad = q2.element([0, 2])  # 2 sqrt2: conjugate of t^2 - 2 equals 6
    with pytest.raises(ArithmeticityViolated) as exc:
        verify_gap(t, bad)
    assert exc.value.value == pytest.approx(6)


def test_verify_gap_non_integral(q2):
    with pytest.raises(ValueError):
        verify_gap(q2.element([Fraction(1, 2)]), q2.element([2, 1]))


def test_round_to_lattice(q2):
    x = round_to_lattice(q2, [3 + 2 * S2 + 1e-9, 3 - 2 * S2])
    assert x.coords == (3, 2)
    with pytest.raises(LatticeRoundingError):
        round_to_lattice(q2, [3.3, 2.1])


def test_bolza_harvest(bolza_traces, q2):
    assert len(bolza_traces) > 100
    for t in bolza_traces[:50]:
        assert t.is_integral()
        e = embed_all(t)
        assert e[0] > 2 and abs(e[1] ** 2 - 2) <= 2 + 1e-9


def test_bolza_gap_sweep(bolza_traces):
    res = gap_sweep(bolza_traces)
    assert res["violations"] == 0
    assert res["pairs"] > 10_000
    assert res["min_gap"] > 0.25


def test_verify_gap_on_harvested_pairs(bolza_traces):
    for a, b in zip(bolza_traces[:40], bolza_traces[1:41]):
        assert verify_gap(a, b).passed
