"""Right-angled hexagons, pants groups, X-pieces and twist recovery.

Conventions
-----------
The gluing curve of an X-piece is the imaginary axis, oriented from 0 to
infinity.  The first pair of pants lies to its right and the second, after
the half-turn ``z -> -1/z``, to its left; both common perpendiculars from
the gluing axis to the other boundaries have their foot at ``i`` when the
twist is zero.  A twist ``alpha`` translates the second pants by ``alpha``
along the oriented gluing axis.

``delta`` is the closed geodesic homotopic to ``d * gamma_1 * d^-1 * gamma_2``,
where ``d`` runs along the two perpendiculars and the gluing axis.  ``eta``
is the image of ``delta`` under a full Dehn twist about the gluing curve,
realized here as the word ``B1 * A (B2') A^-1`` in the group at twist
``alpha``; its length equals that of ``delta`` at twist ``alpha + l_gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import NoConsistentTwist
from .isometry import Isometry, compose, translation_length
from .report import compare

MAX_LENGTH = 100.0
SCAN_POINTS = 10_000
MATCH_TOL = 1e-5


def hexagon_solve(a: float, b: float, c: float) -> tuple[float, float, float]:
    """Opposite sides of a right-angled hexagon with alternate sides a, b, c.

    The side opposite ``a`` satisfies
    ``cosh(a) = sinh(b) sinh(c) cosh(alpha) - cosh(b) cosh(c)``.
    Applying the map twice returns the input.
    """
    if min(a, b, c) <= 0:
        raise ValueError("hexagon sides must be positive")

    def opp(x, y, z):
        return math.acosh((math.cosh(x) + math.cosh(y) * math.cosh(z)) / (math.sinh(y) * math.sinh(z)))

    return opp(a, b, c), opp(b, c, a), opp(c, a, b)


@dataclass(frozen=True)
class YPiece:
    l1: float
    l2: float
    l3: float

    def __post_init__(self):
        for v in (self.l1, self.l2, self.l3):
            if not 0 < v < MAX_LENGTH:
                raise ValueError(f"boundary length {v!r} outside (0, {MAX_LENGTH})")

    def perpendicular(self, i: int, j: int) -> float:
        """Length of the common perpendicular between boundaries i and j (1-based)."""
        ls = {1: self.l1, 2: self.l2, 3: self.l3}
        k = ({1, 2, 3} - {i, j}).pop()
        return hexagon_solve(ls[k] / 2, ls[i] / 2, ls[j] / 2)[0]


def _axis_translation(dist: float) -> Isometry:
    """Translation by ``dist`` along the geodesic from -1 to 1 (through i)."""
    h = 0.5 * dist
    return Isometry(math.cosh(h), math.sinh(h), math.sinh(h), math.cosh(h))


def ypiece_group(y: YPiece) -> tuple[Isometry, Isometry]:
    """Generators A, B of the pants group with boundary lengths l1, l2, l3.

    ``A`` translates along the imaginary axis; the axis of ``B`` lies to the
    right at distance equal to the perpendicular between boundaries 1 and 2,
    with feet at ``i``.  ``tr A, tr B > 2`` and ``tr AB = -2 cosh(l3/2)``.
    """
    A = Isometry.translation(y.l1)
    R = _axis_translation(y.perpendicular(1, 2))
    B = Isometry.translation(y.l2).conjugate_by(R)
    if compose(A, B).trace > 0:
        B = Isometry.translation(-y.l2).conjugate_by(R)
    return A, B


_HALF_TURN = Isometry(0.0, -1.0, 1.0, 0.0)


@dataclass(frozen=True)
class XPiece:
    """Two pants glued along a curve of length ``gluing`` with twist ``twist``.

    ``y1 = (gluing, l_gamma1, l_chain1)`` and ``y2 = (gluing, l_gamma2, l_chain2)``.
    """

    gluing: float
    y1: YPiece
    y2: YPiece
    twist: float = 0.0

    def __post_init__(self):
        if not (self.y1.l1 == self.gluing == self.y2.l1):
            raise ValueError("glued boundaries must both have the gluing length")

    @classmethod
    def from_lengths(cls, gluing, l1, l2, chain1, chain2, twist=0.0) -> XPiece:
        return cls(gluing, YPiece(gluing, l1, chain1), YPiece(gluing, l2, chain2), twist)

    def with_twist(self, twist: float) -> XPiece:
        return XPiece(self.gluing, self.y1, self.y2, twist)

    def perpendicular_arcs(self) -> tuple[float, float]:
        """Perpendiculars from the gluing curve to gamma_1 and gamma_2."""
        return self.y1.perpendicular(1, 2), self.y2.perpendicular(1, 2)


@dataclass(frozen=True)
class _Frame:
    """Twist-independent data of an X-piece group."""

    A: Isometry
    B1: Isometry
    B2: Isometry  # second pants boundary, half-turned, oriented for delta


def _frame(x: XPiece) -> _Frame:
    A, B1 = ypiece_group(x.y1)
    _, B2 = ypiece_group(x.y2)
    B2 = B2.conjugate_by(_HALF_TURN)
    # orient gamma_2 so that B1 * B2 is the simple crossing curve (smaller |trace|)
    if abs(compose(B1, B2.inverse()).trace) < abs(compose(B1, B2).trace):
        B2 = B2.inverse()
    return _Frame(A, B1, B2)


def xpiece_group(x: XPiece) -> tuple[Isometry, Isometry, Isometry]:
    """``(A, B1, B2')``: gluing curve, gamma_1 and the twisted gamma_2."""
    f = _frame(x)
    return f.A, f.B1, f.B2.conjugate_by(Isometry.translation(x.twist))


def xpiece_cross_lengths(x: XPiece) -> tuple[float, float]:
    """Lengths of ``delta`` and ``eta`` at the X-piece's twist."""
    A, B1, B2t = xpiece_group(x)
    delta = compose(B1, B2t)
    eta = compose(B1, B2t.conjugate_by(A))
    return translation_length(delta), translation_length(eta)


def delta_length_curve(x: XPiece, twists) -> np.ndarray:
    """Vectorized ``length(delta)`` over an array of twists."""
    f = _frame(x)
    alphas = np.asarray(twists, dtype=float)
    e = np.exp(alphas)
    b, p = f.B1, f.B2
    # trace of B1 * T_a B2 T_a^-1 with T_a = diag(e^(a/2), e^(-a/2))
    tr = b.a * p.a + b.b * p.c / e + b.c * p.b * e + b.d * p.d
    return 2.0 * np.arccosh(0.5 * np.abs(tr))


def twist_recover(
    gluing: float,
    l1: float,
    l2: float,
    chain1: float,
    chain2: float,
    delta_target: float,
    eta_target: float,
) -> float:
    """Recover the twist in ``[0, gluing)`` from the lengths of delta and eta.

    ``length(delta)`` is scanned over ``[-gluing, gluing]``; every crossing of
    the target is bracketed and refined, tangencies are refined by
    minimization, and the candidate whose ``eta`` length also matches is
    returned (the smaller one if several match).
    """
    base = XPiece.from_lengths(gluing, l1, l2, chain1, chain2)
    n = 2 * SCAN_POINTS + 1
    grid = np.linspace(-gluing, gluing, n)
    f = delta_length_curve(base, grid) - delta_target

    def fd(a):
        return float(delta_length_curve(base, [a])[0] - delta_target)

    candidates = list(grid[f == 0.0])
    sign = np.sign(f)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        candidates.append(brentq(fd, grid[i], grid[i + 1], xtol=1e-13))
    # tangential contact: local minima of |f| not already bracketed
    af = np.abs(f)
    for i in range(1, n - 1):
        if af[i] <= af[i - 1] and af[i] <= af[i + 1] and sign[i - 1] == sign[i] == sign[i + 1]:
            res = minimize_scalar(
                lambda a: abs(fd(a)), bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                options={"xatol": 1e-12},
            )
            if abs(fd(res.x)) <= 1e-9:
                candidates.append(float(res.x))

    matches = []
    for a in sorted(candidates):
        ld, le = xpiece_cross_lengths(base.with_twist(a))
        if abs(ld - delta_target) <= MATCH_TOL and abs(le - eta_target) <= MATCH_TOL:
            matches.append(a)
    if not matches:
        raise NoConsistentTwist(
            f"no twist in [-{gluing}, {gluing}] matches delta={delta_target!r}, eta={eta_target!r}"
        )
    best = float(min(matches))
    return 0.0 if -1e-9 < best < 0.0 else best


def chain_length_bound_check(l_arc: float, l_g1: float, l_g2: float, l_chain: float):
    """``length(chain) <= 2 length(arc) + length(gamma') + length(gamma'')``."""
    if min(l_arc, l_g1, l_g2, l_chain) <= 0:
        raise ValueError("lengths must be positive")
    return compare(
        "chain-length-bound",
        l_chain,
        "<=",
        2 * l_arc + l_g1 + l_g2,
        citation="chain through an arc: l(gamma_a) <= 2 l(a) + l(gamma') + l(gamma'')",
        inputs={"arc": l_arc, "gamma1": l_g1, "gamma2": l_g2, "chain": l_chain},
        tol=1e-9,
    )


def delta_bound_check(x: XPiece, l_a1: float | None = None, l_a2: float | None = None):
    """Strict bound ``l(delta) < l1 + l2 + 2 l(gamma) + 2 l(a1) + 2 l(a2)``.

    The arcs default to the perpendiculars from the gluing curve.
    """
    if l_a1 is None or l_a2 is None:
        p1, p2 = x.perpendicular_arcs()
        l_a1 = p1 if l_a1 is None else l_a1
        l_a2 = p2 if l_a2 is None else l_a2
    ld, _ = xpiece_cross_lengths(x)
    rhs = x.y1.l2 + x.y2.l2 + 2 * x.gluing + 2 * l_a1 + 2 * l_a2
    return compare(
        "delta-length-bound",
        ld,
        "<",
        rhs,
        citation="crossing curve bound: l(delta) < l(gamma1) + l(gamma2) + 2l(gamma) + 2l(a1) + 2l(a2)",
        inputs={
            "gluing": x.gluing,
            "l1": x.y1.l2,
            "l2": x.y2.l2,
            "chain1": x.y1.l3,
            "chain2": x.y2.l3,
            "twist": x.twist,
            "a1": l_a1,
            "a2": l_a2,
        },
    )


def random_xpiece(rng: np.random.Generator, low: float = 0.5, high: float = 4.0, twist: float | None = None) -> XPiece:
    g, l1, l2, c1, c2 = rng.uniform(low, high, size=5)
    a = rng.uniform(0.0, g) if twist is None else twist
    return XPiece.from_lengths(float(g), float(l1), float(l2), float(c1), float(c2), float(a))


def delta_length_oracle(x: XPiece) -> float:
    """Independent extended-precision value of ``length(delta)``.

    Rebuilds both pants groups with mpmath matrices at the oracle precision
    and cross-checks against the axis-distance identity
    ``cosh(l/2) = sinh(l1/2) sinh(l2/2) cosh D - cosh(l1/2) cosh(l2/2)``,
    ``cosh D = cosh a1 cosh a2 + sinh a1 sinh a2 cosh(alpha)``.
    """
    import mpmath

    from .precision import oracle_precision

    with oracle_precision() as mp:

        def perp(lg, li, lk):
            h = [mp.mpf(v) / 2 for v in (lg, li, lk)]
            return mp.acosh((mp.cosh(h[2]) + mp.cosh(h[0]) * mp.cosh(h[1])) / (mp.sinh(h[0]) * mp.sinh(h[1])))

        def pants(lg, li, lk):
            d = perp(lg, li, lk)
            A = mp.matrix([[mp.exp(mp.mpf(lg) / 2), 0], [0, mp.exp(-mp.mpf(lg) / 2)]])
            R = mp.matrix([[mp.cosh(d / 2), mp.sinh(d / 2)], [mp.sinh(d / 2), mp.cosh(d / 2)]])
            for sgn in (1, -1):
                D = mp.matrix([[mp.exp(sgn * mp.mpf(li) / 2), 0], [0, mp.exp(-sgn * mp.mpf(li) / 2)]])
                B = R * D * R**-1
                if (A * B)[0, 0] + (A * B)[1, 1] < 0:
                    return B, d
            raise AssertionError("no orientation gives a pants group")

        B1, a1 = pants(x.gluing, x.y1.l2, x.y1.l3)
        B2, a2 = pants(x.gluing, x.y2.l2, x.y2.l3)
        S = mp.matrix([[0, -1], [1, 0]])
        T = mp.matrix([[mp.exp(mp.mpf(x.twist) / 2), 0], [0, mp.exp(-mp.mpf(x.twist) / 2)]])
        B2 = T * S * B2 * S**-1 * T**-1
        tr = min(abs(mpmath.fsum((B1 * M)[i, i] for i in range(2))) for M in (B2, B2**-1))
        matrix_value = 2 * mp.acosh(tr / 2)

        h1, h2 = mp.mpf(x.y1.l2) / 2, mp.mpf(x.y2.l2) / 2
        cD = mp.cosh(a1) * mp.cosh(a2) + mp.sinh(a1) * mp.sinh(a2) * mp.cosh(mp.mpf(x.twist))
        closed = 2 * mp.acosh(mp.sinh(h1) * mp.sinh(h2) * cD - mp.cosh(h1) * mp.cosh(h2))
        if abs(closed - matrix_value) > mp.mpf(10) ** (-mp.dps // 2):
            raise AssertionError(f"oracle disagreement {matrix_value} vs {closed}")
        return float(matrix_value)
