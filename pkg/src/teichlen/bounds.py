"""Closed-form length, distance and counting bounds.

Counting quantities are kept in natural-log space throughout; ``g^(6g)``
already overflows a double near g = 60.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .algint import systole_lower_bound
from .errors import DomainError, NonPositiveBound
from .fields import gap_constant
from .report import compare

UNSPECIFIED = "paper leaves unspecified"


def _check_genus(g: int) -> None:
    if int(g) != g or g < 2:
        raise ValueError(f"genus must be an integer >= 2, got {g!r}")


# -- loops and collars -------------------------------------------------------


def minimal_loop_bound(g: int) -> float:
    """Upper bound ``2 arccosh(1 / (2 sin(pi/(12g-6))))`` on a shortest loop."""
    _check_genus(g)
    return 2.0 * math.acosh(1.0 / (2.0 * math.sin(math.pi / (12 * g - 6))))


def collar_width(length: float) -> float:
    """Half-width ``arcsinh(1/sinh(l/2))`` of the standard collar."""
    if length <= 0:
        raise ValueError("length must be positive")
    return math.asinh(1.0 / math.sinh(0.5 * length))


def collar_distance_bound(loop_length: float) -> float:
    """``log(sinh(l/2))``: how far a loop of length l strays from a collar."""
    if loop_length < 2.0 * math.asinh(1.0):
        raise NonPositiveBound(f"loop length {loop_length!r} <= 2 arcsinh(1) gives no positive bound")
    return math.log(math.sinh(0.5 * loop_length))


def prop33_bounds(g: int, eps: float) -> tuple[float, float, float]:
    """Bounds on a short curve, its chain and the connecting arc.

    Returns ``(2 log 4g, 8 log 4g + 4w, 2 log 4g + 2w)`` with ``w`` the
    collar width of a curve of length ``eps``.
    """
    _check_genus(g)
    if eps <= 0:
        raise ValueError("eps must be positive")
    lg = math.log(4 * g)
    w = collar_width(eps)
    return 2 * lg, 8 * lg + 4 * w, 2 * lg + 2 * w


def main_bound(g: int, s: float) -> tuple[float, int]:
    """``(20 log 4g + 8 arcsinh(1/sinh(s/2)), 15g - 15)`` for systole >= s."""
    _check_genus(g)
    if s <= 0:
        raise ValueError("s must be positive")
    return 20 * math.log(4 * g) + 8 * collar_width(s), 15 * g - 15


def ksvv_sharpness_floor(g: int) -> float:
    """``(4/3) log g``: systoles of known sequences grow at least this fast."""
    if g < 2:
        raise ValueError("g must be >= 2")
    return 4.0 / 3.0 * math.log(g)


# -- the calculus lemma ------------------------------------------------------


def _acosh_shifted(x: float) -> float:
    """``arccosh((x-2)/2)`` computed through ``u = x - 4`` to keep digits near 4."""
    y = 0.5 * (x - 4.0)  # (x-2)/2 = 1 + y
    return math.log1p(y + math.sqrt(y * (2.0 + y)))


def teich_L(x: float) -> float:
    """``L(x) = log arccosh((x-2)/2)`` for x > 4."""
    if not x > 4:
        raise DomainError(f"L(x) needs x > 4, got {x!r}")
    return math.log(_acosh_shifted(x))


def teich_L_prime(x: float) -> float:
    """``L'(x) = 1 / (sqrt(x(x-4)) arccosh((x-2)/2))`` for x > 4."""
    if not x > 4:
        raise DomainError(f"L'(x) needs x > 4, got {x!r}")
    return 1.0 / (math.sqrt(x * (x - 4.0)) * _acosh_shifted(x))


# -- Teichmueller distance lower bound ---------------------------------------


def default_c_d(d: int, L: float = 1.0) -> float:
    """Additive constant c(d, L) = 20 log 4 + 8 arcsinh(1/sinh(s/2)), s = log2/(4dL)."""
    return 20 * math.log(4) + 8 * collar_width(systole_lower_bound(d, L))


@dataclass(frozen=True)
class DistanceBoundInputs:
    g: int
    d: int
    c_d: float
    C_d: float
    c_gap: float

    def __post_init__(self):
        _check_genus(self.g)
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if not math.isclose(self.C_d, math.exp(self.c_d), rel_tol=1e-12):
            raise ValueError("C_d must equal exp(c_d)")
        if self.c_gap <= 0:
            raise ValueError("c_gap must be positive")

    @classmethod
    def with_defaults(cls, g: int, d: int, c_d: float | None = None, c_gap: float | None = None):
        c_d = default_c_d(d) if c_d is None else c_d
        c_gap = float(gap_constant(d)) if c_gap is None else c_gap
        return cls(g=g, d=d, c_d=c_d, C_d=math.exp(c_d), c_gap=c_gap)


@dataclass(frozen=True)
class DistanceBound:
    log_value: float
    log_A: float
    log_theta_bound: float
    inputs: DistanceBoundInputs
    notes: tuple[str, ...] = field(default=())

    @property
    def value(self) -> float:
        return math.exp(self.log_value)  # underflows to 0.0 for large g

    def to_dict(self) -> dict:
        return {
            "name": "teichmueller-distance-lower-bound",
            "inputs": {k: getattr(self.inputs, k) for k in ("g", "d", "c_d", "C_d", "c_gap")},
            "log_value": self.log_value,
            "value": self.value,
            "log_A": self.log_A,
            "log_theta_bound": self.log_theta_bound,
            "citation": "d_T(S,S') >= A g^-240 with A = c/(16 C_d^4)",
            "notes": list(self.notes),
        }


def distance_lower_bound(inp: DistanceBoundInputs) -> DistanceBound:
    """``A g^-240`` with ``A = c_gap / (16 C_d^4)``, plus ``theta <= 4 C_d^2 g^120``."""
    log_A = math.log(inp.c_gap) - math.log(16) - 4 * inp.c_d
    return DistanceBound(
        log_value=log_A - 240 * math.log(inp.g),
        log_A=log_A,
        log_theta_bound=math.log(4) + 2 * inp.c_d + 120 * math.log(inp.g),
        inputs=inp,
        notes=("unconditional form; the small-distance case split is internal to the proof",),
    )


# -- counting ----------------------------------------------------------------


def topo_types_bound(g: int) -> float:
    """Log of ``(3g-3)(4g-4)^2 e^-6 (12^6/e^5)^(g-1) (g-1)^(6g-6)``."""
    _check_genus(g)
    return (
        math.log(3 * g - 3)
        + 2 * math.log(4 * g - 4)
        - 6
        + (g - 1) * (6 * math.log(12) - 5)
        + (6 * g - 6) * math.log(g - 1)
    )


def topo_types_base(g_max: int = 10**4) -> float:
    """Smallest B with the topological-type count <= B^g g^(6g) for 2 <= g <= g_max."""
    log_B = max((topo_types_bound(g) - 6 * g * math.log(g)) / g for g in range(2, g_max + 1))
    return math.exp(log_B)


@dataclass(frozen=True)
class CountingInputs:
    g: int
    d: int
    L: float
    sigma: float
    B: float
    b: float = 1.0

    def __post_init__(self):
        _check_genus(self.g)
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if self.sigma <= 0 or self.B <= 0 or self.b <= 0:
            raise ValueError("sigma, B and b must be positive")

    @classmethod
    def with_defaults(cls, g, d, L=1.0, sigma=None, B=None, b=1.0):
        sigma = default_sigma(d, L) if sigma is None else sigma
        B = _default_B() if B is None else B
        return cls(g=g, d=d, L=L, sigma=sigma, B=B, b=b)


def default_sigma(d: int, L: float) -> float:
    """``exp(c(d, L)/20)``, the recipe used when sigma is not supplied."""
    return math.exp(default_c_d(d, L) / 20)


_B_CACHE: dict[int, float] = {}


def _default_B(g_max: int = 10**4) -> float:
    if g_max not in _B_CACHE:
        _B_CACHE[g_max] = topo_types_base(g_max)
    return _B_CACHE[g_max]


def _chain_factor_log(d: int, L: float, sigma_g: float) -> float:
    """Log of ``2d (4d)^(d^2) (sigma g)^(20 L d^2)``."""
    return math.log(2 * d) + d * d * math.log(4 * d) + 20 * L * d * d * math.log(sigma_g)


@dataclass(frozen=True)
class CountingBounds:
    log_lower: float
    log_upper: float
    C: float
    log_B1: float
    B2: float
    inputs: CountingInputs

    def to_dict(self) -> dict:
        i = self.inputs
        return {
            "name": "semi-arithmetic-counting",
            "inputs": {"g": i.g, "d": i.d, "L": i.L, "sigma": i.sigma, "B": i.B, "b": i.b},
            "log_lower": self.log_lower,
            "log_upper": self.log_upper,
            "C": self.C,
            "log_B1": self.log_B1,
            "B2": self.B2,
            "citation": "(bg)^(2g) <= #SA[g,d,L] <= B^g g^(6g) [2d(4d)^(d^2)(sigma g)^(20Ld^2)]^(15(g-1))",
            "notes": [f"sigma, B, b: {UNSPECIFIED}"],
        }


def sa_counting_bounds(inp: CountingInputs) -> CountingBounds:
    g, d, L = inp.g, inp.d, inp.L
    k = 15 * (g - 1)
    w = k * 20 * d * d * L  # weight of log(sigma g)
    # expanded and summed exactly; each term carries a single rounding
    log_upper = math.fsum(
        [
            g * math.log(inp.B),
            6 * g * math.log(g),
            k * math.log(2 * d),
            k * d * d * math.log(4 * d),
            w * math.log(inp.sigma),
            w * math.log(g),
        ]
    )
    log_lower = 2 * g * math.log(inp.b * g)
    log_B1 = math.log(inp.B) + 15 * _chain_factor_log(d, L, inp.sigma)
    B2 = 6 + 300 * L * d * d
    C = log_B1 / math.log(2) + B2
    return CountingBounds(log_lower, log_upper, C, log_B1, B2, inp)


def sa_upper_direct(inp: CountingInputs) -> float:
    """Log of the upper counting bound, formed as a product at oracle precision."""
    from .precision import oracle_precision

    with oracle_precision() as mp:
        g, d, L = inp.g, inp.d, mp.mpf(inp.L)
        chain = 2 * d * mp.mpf(4 * d) ** (d * d) * (mp.mpf(inp.sigma) * g) ** (20 * L * d * d)
        value = mp.mpf(inp.B) ** g * mp.mpf(g) ** (6 * g) * chain ** (15 * (g - 1))
        return float(mp.log(value))


def counting_sweep(g_values, d_values, L_values, b: float = 1.0):
    """Evaluate the counting bounds on a grid.

    Returns ``(rows, U, reports)`` where ``U`` is the supremum of
    ``C / (L d^2)`` and each report checks ``log_upper / (g log g) <= C``.
    """
    rows, reports = [], []
    U = 0.0
    for d in d_values:
        for L in L_values:
            sigma = default_sigma(d, L)
            for g in g_values:
                cb = sa_counting_bounds(CountingInputs.with_defaults(g, d, L, sigma=sigma, b=b))
                rows.append(cb)
                U = max(U, cb.C / (L * d * d))
                reports.append(
                    compare(
                        "counting-rate",
                        cb.log_upper / (g * math.log(g)),
                        "<=",
                        cb.C,
                        citation="log(#SA)/(g log g) <= C = log(B1)/log 2 + B2",
                        inputs={"g": g, "d": d, "L": L},
                        notes=(f"sigma, B, b: {UNSPECIFIED}",),
                    )
                )
    for cb in rows:
        i = cb.inputs
        reports.append(
            compare(
                "counting-constant",
                cb.C,
                "<=",
                U * i.L * i.d * i.d,
                citation="C <= U L d^2",
                inputs={"g": i.g, "d": i.d, "L": i.L, "U": U},
                tol=1e-9 * abs(cb.C),
                notes=(f"U is the sweep supremum; {UNSPECIFIED}",),
            )
        )
    return rows, U, reports


def qc_length_distortion_check(K: float, before: float, after: float):
    """A K-quasiconformal map changes geodesic lengths by a factor in [1/K, K]."""
    if K < 1 or before <= 0 or after <= 0:
        raise ValueError("need K >= 1 and positive lengths")
    return compare(
        "qc-length-distortion",
        max(after / before, before / after),
        "<=",
        K,
        citation="(1/K) L(S) <= L(S') <= K L(S)",
        inputs={"K": K, "before": before, "after": after},
        tol=1e-12,
    )


def bounds_sweep(g_values) -> list:
    """Pass/fail reports for the loop, collar and calculus-lemma bounds."""
    reports = []
    for g in g_values:
        reports.append(
            compare(
                "minimal-loop-bound",
                minimal_loop_bound(g),
                "<",
                2 * math.log(4 * g),
                citation="shortest loop: 2arccosh(1/(2sin(pi/(12g-6)))) < 2log(4g)",
                inputs={"g": g},
            )
        )
        x = 4.0 + g  # one calculus-lemma sample per sweep point
        reports.append(
            compare(
                "teich-L-prime",
                teich_L_prime(x),
                ">",
                1.0 / (x * x),
                citation="L'(x) > 1/x^2",
                inputs={"x": x},
            )
        )
        eps = 1.0 / g
        _, chain, arc = prop33_bounds(g, eps)
        curve = 2 * math.log(4 * g)
        reports.append(
            compare(
                "collar-arc-identity",
                arc,
                "<=",
                curve + 2 * collar_width(eps),
                citation="arc bound = curve bound + 2 collar width",
                inputs={"g": g, "eps": eps},
                tol=1e-12 * arc,
            )
        )
    return reports
