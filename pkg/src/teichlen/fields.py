"""Totally real number fields, power-basis elements and trace separation.

A field is given by an irreducible monic integer polynomial with only real
roots; element coordinates are exact rationals in the power basis of a root
``theta``.  Embedding ``i`` sends ``theta`` to the ``i``-th real root.

Traces of an arithmetic Fuchsian group with invariant trace field F of
degree d are separated: ``|tr(T)^2 - tr(T')^2| > 4^-(d-1)`` whenever
``|tr T| != |tr T'|``, because the norm of ``tr(T^2) - tr(T'^2)`` is a nonzero
integer while every nontrivial embedding of a squared trace lies in [-2, 2].
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np
import sympy

from .algint import IntPolynomial, is_irreducible, isolate_real_roots
from .errors import ArithmeticityViolated, NonIntegral, SameAbsTrace, TeichlenError
from .report import compare

INTEGRALITY_TOL = 1e-6
HARVEST_TOL = 1e-5
WINDOW_TOL = 1e-9
SAME_ABS_TOL = 1e-9


class LatticeRoundingError(TeichlenError):
    """A harvested trace is farther than the tolerance from the lattice Z[theta]."""


@dataclass(frozen=True)
class RealField:
    defining_poly: IntPolynomial
    identity_index: int
    roots: tuple[float, ...]
    name: str = ""

    @classmethod
    def from_poly(cls, coeffs: Sequence[int], identity: str | int = "largest", name: str = "") -> RealField:
        P = IntPolynomial(tuple(coeffs))
        if P.degree > 8:
            raise ValueError("fields are limited to degree <= 8")
        if not is_irreducible(P):
            raise ValueError(f"{P} is reducible")
        roots = tuple(isolate_real_roots(P.coeffs))
        if len(roots) != P.degree:
            raise ValueError(f"{P} is not totally real")
        if any(b - a <= 1e-10 for a, b in zip(roots, roots[1:])):
            raise ValueError("roots are not separated")
        idx = len(roots) - 1 if identity == "largest" else int(identity)
        return cls(P, idx, roots, name or str(P))

    @property
    def degree(self) -> int:
        return self.defining_poly.degree

    def embedding_order(self) -> list[int]:
        """Embedding indices with the identity first."""
        return [self.identity_index] + [i for i in range(self.degree) if i != self.identity_index]

    def mp_roots(self, dps: int = 40) -> list:
        """Roots refined to ``dps`` digits, in embedding order."""
        with mpmath.workdps(dps):
            f = lambda x: mpmath.polyval(list(self.defining_poly.coeffs), x)
            return [mpmath.findroot(f, mpmath.mpf(self.roots[i])) for i in self.embedding_order()]

    def element(self, coords: Iterable) -> FieldElement:
        cs = []
        for c in coords:
            f = Fraction(c)
            cs.append(Fraction(int(f.numerator), int(f.denominator)))
        if len(cs) > self.degree:
            raise ValueError("too many coordinates")
        cs += [Fraction(0)] * (self.degree - len(cs))
        return FieldElement(tuple(cs), self)

    def __call__(self, value) -> FieldElement:
        return self.element([value])

    def theta(self) -> FieldElement:
        return self.element([0, 1])


PRESET_FIELDS = {
    "Q": (1, 0),
    "x^2-2": (1, 0, -2),
    "x^2-5": (1, 0, -5),
    "x^3-3x-1": (1, 0, -3, -1),
}


def field_preset(name: str) -> RealField:
    try:
        coeffs = PRESET_FIELDS[name]
    except KeyError:
        raise ValueError(f"unknown field {name!r}; choose from {sorted(PRESET_FIELDS)}") from None
    return RealField.from_poly(coeffs, name=name)


@dataclass(frozen=True)
class FieldElement:
    """``sum coords[j] * theta^j`` with exact rational coordinates."""

    coords: tuple[Fraction, ...]
    field: RealField

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        if other.field != self.field:
            raise ValueError("elements of different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(tuple(a + b for a, b in zip(self.coords, other.coords)), self.field)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(tuple(-a for a in self.coords), self.field)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    prod[i + j] += a * b
        # reduce with theta^d = -(c_1 theta^(d-1) + ... + c_d)
        low = self.field.defining_poly.coeffs[1:]
        for k in range(2 * d - 2, d - 1, -1):
            top = prod[k]
            if top:
                prod[k] = Fraction(0)
                for j, c in enumerate(low):
                    prod[k - 1 - j] -= top * c
        return FieldElement(tuple(prod[:d]), self.field)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def multiplication_matrix(self) -> list[list[Fraction]]:
        """Matrix of ``y -> self * y`` on the power basis (columns = images)."""
        d = self.field.degree
        cols = [(self * self.field.element([0] * j + [1])).coords for j in range(d)]
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def charpoly(self) -> list[Fraction]:
        """Characteristic polynomial of multiplication by ``self``, leading first."""
        M = sympy.Matrix(self.multiplication_matrix())
        x = sympy.Symbol("x")
        return [Fraction(int(c.p), int(c.q)) for c in M.charpoly(x).all_coeffs()]

    def is_integral(self) -> bool:
        return all(
            abs(float(c) - round(float(c))) <= INTEGRALITY_TOL for c in self.charpoly()
        )

    def norm_exact(self) -> Fraction:
        cp = self.charpoly()
        return cp[-1] * (-1) ** self.field.degree


def embed_all(x: FieldElement) -> list[float]:
    """Values of ``x`` under every embedding, identity first."""
    return [float(v) for v in _embed_mp(x)]


def _embed_mp(x: FieldElement, dps: int = 40):
    with mpmath.workdps(dps):
        out = []
        for r in x.field.mp_roots(dps):
            acc = mpmath.mpf(0)
            for c in reversed(x.coords):
                acc = acc * r + mpmath.mpf(c.numerator) / c.denominator
            out.append(acc)
        return out


def field_norm(x: FieldElement) -> float:
    """Product of all embeddings of a nonzero element."""
    if x.is_zero():
        raise ValueError("norm of zero")
    if not x.is_integral():
        warnings.warn(f"{x.coords} is not integral", NonIntegral, stacklevel=2)
    with mpmath.workdps(40):
        return float(mpmath.fprod(_embed_mp(x)))


def gap_constant(d: int) -> Fraction:
    """``4^-(d-1)``: squared traces of distinct absolute value differ by more."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return Fraction(1, 4 ** (d - 1))


def check_window(t: FieldElement) -> None:
    """Raise :class:`ArithmeticityViolated` unless every nontrivial embedding
    of ``t^2 - 2`` lies in [-2, 2]."""
    vals = embed_all(t * t - 2)
    order = t.field.embedding_order()
    for k, v in enumerate(vals[1:], start=1):
        if abs(v) > 2.0 + WINDOW_TOL:
            raise ArithmeticityViolated(order[k], v)


def verify_gap(t: FieldElement, t_prime: FieldElement):
    """Measure ``|t^2 - t'^2|`` against ``gap_constant(d)``."""
    field = t.field
    if t_prime.field != field:
        raise ValueError("traces from different fields")
    e, ep = embed_all(t)[0], embed_all(t_prime)[0]
    if abs(abs(e) - abs(ep)) <= SAME_ABS_TOL:
        raise SameAbsTrace(f"|t| = |t'| = {abs(e)!r}")
    for x in (t, t_prime):
        if not x.is_integral():
            raise ValueError(f"{x.coords} is not an algebraic integer")
        check_window(x)
    diff = t * t - t_prime * t_prime
    with mpmath.workdps(40):
        gap = float(abs(_embed_mp(diff)[0]))
    c = gap_constant(field.degree)
    return compare(
        "trace-separation",
        gap,
        ">",
        float(c),
        citation="minimal spacing of squared traces in arithmetic groups: |tr(T)^2 - tr(T')^2| > 4^-(d-1)",
        inputs={
            "field": field.name,
            "t": [str(a) for a in t.coords],
            "t_prime": [str(a) for a in t_prime.coords],
        },
    )


def round_to_lattice(field: RealField, values: Sequence[float], tol: float = HARVEST_TOL) -> FieldElement:
    """Nearest element of ``Z[theta]`` to the given embedding values.

    ``values`` are in embedding order (identity first).  Raises
    :class:`LatticeRoundingError` when the coordinate residual exceeds ``tol``.
    """
    order = field.embedding_order()
    roots = np.array([field.roots[i] for i in order])
    V = np.vander(roots, field.degree, increasing=True)
    coords = np.linalg.solve(V, np.asarray(values, dtype=float))
    rounded = np.round(coords)
    residual = float(np.max(np.abs(coords - rounded)))
    if residual > tol:
        raise LatticeRoundingError(f"residual {residual:.3g} > {tol:g} for values {list(values)}")
    return field.element(int(c) for c in rounded)


def harvest_traces(p, max_len: int, field: RealField, tol: float = HARVEST_TOL) -> list[FieldElement]:
    """Distinct absolute traces of words of length ``<= max_len`` as field elements.

    Needs a quadratic field and a presentation carrying Galois-conjugate
    generators, so that both embeddings of each trace are known.
    """
    from .words import word_traces

    if field.degree != 2:
        raise ValueError("harvesting needs a quadratic field")
    wt = word_traces(p, max_len, with_conjugates=True)
    t1 = wt.traces
    t2 = wt.conjugate_traces
    if np.max(np.abs(t2.imag)) > tol:
        raise LatticeRoundingError("conjugate traces are not real")
    sign = np.where(t1 < 0, -1.0, 1.0)
    vals = np.stack([t1 * sign, t2.real * sign], axis=1)
    seen = {}
    for v in vals:
        el = round_to_lattice(field, v, tol)
        seen.setdefault(el.coords, el)
    return [seen[k] for k in sorted(seen)]


def gap_sweep(elements: Sequence[FieldElement]) -> dict:
    """Check trace separation over all pairs with distinct absolute value.

    Squares are formed exactly; each difference is evaluated at 40 digits.
    Every element is checked for integrality and the arithmeticity window.
    """
    if not elements:
        return {"pairs": 0, "violations": 0, "min_gap": None, "bound": None}
    field = elements[0].field
    for x in elements:
        if not x.is_integral():
            raise ValueError(f"{x.coords} is not an algebraic integer")
        check_window(x)
    c = float(gap_constant(field.degree))
    with mpmath.workdps(40):
        roots = field.mp_roots()
        theta = roots[0]
        powers = [theta**j for j in range(field.degree)]
        ident = [float(sum(mpmath.mpf(a.numerator) / a.denominator * w for a, w in zip(x.coords, powers))) for x in elements]
        sq = [x * x for x in elements]
        sq_val = [
            sum(mpmath.mpf(a.numerator) / a.denominator * w for a, w in zip(s.coords, powers))
            for s in sq
        ]
    pairs = violations = 0
    min_gap = math.inf
    worst = None
    for i, j in itertools.combinations(range(len(elements)), 2):
        if abs(abs(ident[i]) - abs(ident[j])) <= SAME_ABS_TOL:
            continue
        pairs += 1
        with mpmath.workdps(40):
            g = float(abs(sq_val[i] - sq_val[j]))
        if g < min_gap:
            min_gap, worst = g, (i, j)
        if not g > c:
            violations += 1
    return {
        "pairs": pairs,
        "violations": violations,
        "min_gap": min_gap,
        "bound": c,
        "worst_pair": None if worst is None else [[str(a) for a in elements[k].coords] for k in worst],
    }
