"""Integer polynomials, real reciprocal algebraic integers and their houses.

The set U_m(X) of real reciprocal algebraic integers of degree at most
``2m`` and house at most ``X`` is enumerated exhaustively: for each even
degree ``2d <= 2m`` every palindromic monic coefficient vector with
``|a_i| <= C(2d, i) X^i`` is screened by house (batched companion
eigenvalues), then by having a real root, then by irreducibility.  The two
degree-one units +1 and -1 are always included.  Every real root of an
accepted polynomial is a distinct element of the set.
"""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapacityExceeded, RootOfUnity
from .report import INCONCLUSIVE, PASS, BoundReport, compare

#: Default cap on the number of candidate coefficient vectors.
DEFAULT_CAPACITY = 10**8
HOUSE_TOL = 1e-10
ROOT_REFINE_TOL = 4e-16
_BATCH = 200_000


@dataclass(frozen=True)
class IntPolynomial:
    """Monic integer polynomial, coefficients from the leading term down."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        cs = []
        for c in self.coeffs:
            if isinstance(c, bool) or not float(c).is_integer():
                raise ValueError(f"non-integer coefficient {c!r}")
            cs.append(int(c))
        if len(cs) < 2:
            raise ValueError("degree must be >= 1")
        if cs[0] != 1:
            raise ValueError("polynomial must be monic")
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def roots(self) -> np.ndarray:
        """All complex roots, Newton-polished in double precision."""
        return _polished_roots(self.coeffs)

    def real_roots(self) -> list[float]:
        return isolate_real_roots(self.coeffs)

    def __str__(self) -> str:
        terms = []
        n = self.degree
        for k, c in enumerate(self.coeffs):
            p = n - k
            if c == 0:
                continue
            mono = "" if p == 0 else ("x" if p == 1 else f"x^{p}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else "+"
            else:
                coef = f"{c:+d}"
            terms.append(f"{coef}{mono}")
        s = "".join(terms)
        return s[1:] if s.startswith("+") else s


def _polished_roots(coeffs: Sequence[int], start: np.ndarray | None = None) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    r = np.roots(c) if start is None else np.asarray(start, dtype=complex)
    dc = np.polyder(c)
    for _ in range(3):
        d = np.polyval(dc, r)
        ok = d != 0
        step = np.zeros_like(r)
        step[ok] = np.polyval(c, r[ok]) / d[ok]
        r = r - step
    return r


def _eval(c, x):
    acc = Fraction(0)
    for a in c:
        acc = acc * x + a
    return acc


def _poly_rem(a, b):
    a = list(a)
    while len(a) >= len(b) and a:
        q = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= q * b[i]
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return a


def _sturm_sequence(c):
    n = len(c) - 1
    seq = [c, [a * (n - k) for k, a in enumerate(c[:-1])]]
    while len(seq[-1]) > 1:
        rem = _poly_rem(seq[-2], seq[-1])
        if not rem:
            break
        seq.append([-x for x in rem])
    return seq


def _sign_changes(seq, x):
    signs = [v > 0 for v in (_eval(p, x) for p in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _horner(cf, x):
    acc = 0.0
    for a in cf:
        acc = acc * x + a
    return acc


def isolate_real_roots(
    coeffs: Sequence[int], tol: float = ROOT_REFINE_TOL, approx: np.ndarray | None = None
) -> list[float]:
    """Real roots of a squarefree integer polynomial, sorted.

    The number of real roots is fixed exactly by a Sturm sequence.  Each root
    is bracketed around its companion-matrix approximation and refined by
    bisection to ``tol`` relative to ``max(1, |root|)``; if the brackets do
    not separate the roots, the interval is split using Sturm counts instead.
    """
    c = [Fraction(int(x)) for x in coeffs]
    cf = [float(x) for x in coeffs]
    bound = 1 + max(abs(x) for x in c[1:]) / abs(c[0])
    approx = _polished_roots(coeffs) if approx is None else np.asarray(approx)
    seq = None
    rel_imag = np.abs(approx.imag) / np.maximum(1.0, np.abs(approx))
    if np.all((rel_imag < 1e-10) | (rel_imag > 1e-5)):
        # unambiguous split; non-real roots come in conjugate pairs
        nreal = int(np.sum(rel_imag < 1e-10))
    else:
        seq = _sturm_sequence(c)
        nreal = _sign_changes(seq, -bound) - _sign_changes(seq, bound)
    if nreal == 0:
        return []
    approx = sorted(approx[np.argsort(rel_imag, kind="stable")[:nreal]].real)
    roots = []
    for r in approx:
        r = float(r)
        delta = 1e-14 * max(1.0, abs(r))
        lo, hi = r - delta, r + delta
        flo, fhi = _horner(cf, lo), _horner(cf, hi)
        if flo != 0 and fhi != 0 and (flo > 0) != (fhi > 0):
            roots.append(r)
            continue
        delta = 1e-7 * max(1.0, abs(r))
        lo, hi = r - delta, r + delta
        flo, fhi = _horner(cf, lo), _horner(cf, hi)
        if flo == 0 or fhi == 0 or (flo > 0) == (fhi > 0):
            break
        roots.append(float(_refine(cf, lo, hi, tol)))
    if len(roots) == nreal and all(b - a > 2e-7 * max(1.0, abs(a)) for a, b in zip(roots, roots[1:])):
        return roots
    return _sturm_isolate(c, cf, seq or _sturm_sequence(c), bound, tol)


def _sturm_isolate(c, cf, seq, bound, tol):
    roots: list[float] = []
    stack = [(-bound, bound, _sign_changes(seq, -bound), _sign_changes(seq, bound))]
    while stack:
        lo, hi, vlo, vhi = stack.pop()
        k = vlo - vhi
        if k == 0:
            continue
        if k == 1:
            roots.append(float(_refine(cf, float(lo), float(hi), tol)))
            continue
        mid = (lo + hi) / 2
        if _eval(c, mid) == 0:
            mid += (hi - lo) / 2**30
        vmid = _sign_changes(seq, mid)
        stack.append((lo, mid, vlo, vmid))
        stack.append((mid, hi, vmid, vhi))
    return sorted(roots)


def _refine(cf, lo, hi, tol):
    flo = _horner(cf, lo)
    while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = _horner(cf, mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def is_reciprocal(P: IntPolynomial) -> bool:
    """Palindromic coefficient vector of even degree, or ``x - 1``, ``x + 1``."""
    if P.degree == 1:
        return P.coeffs in ((1, -1), (1, 1))
    return P.degree % 2 == 0 and P.coeffs == P.coeffs[::-1]


def house(P: IntPolynomial) -> float:
    """Largest modulus of a complex root of ``P``."""
    return float(np.max(np.abs(P.roots())))


def is_irreducible(P: IntPolynomial, roots: np.ndarray | None = None) -> bool:
    """Irreducibility over Q by trial factorization.

    Every monic integer factor of degree ``k <= n/2`` is the product of some
    ``k`` roots; candidate factors are formed from numerically computed
    roots, rounded, and confirmed by exact division.
    """
    n = P.degree
    if n == 1:
        return True
    coeffs = P.coeffs
    if coeffs[-1] == 0:
        return False
    if roots is None:
        roots = P.roots()
    roots = [complex(r) for r in roots]
    for k in range(1, n // 2 + 1):
        for subset in itertools.combinations(roots, k):
            f = _monic_from_roots(subset)
            scale = max(1.0, max(abs(x) for x in f))
            if any(abs(x.imag) > 1e-6 * scale for x in f):
                continue
            fr = [round(x.real) for x in f]
            if any(abs(x.real - y) > 1e-6 * scale for x, y in zip(f, fr)):
                continue
            if _divides(fr, coeffs):
                return False
    return True


def _monic_from_roots(roots):
    f = [1 + 0j]
    for r in roots:
        g = f + [0j]
        for i in range(1, len(g)):
            g[i] -= r * f[i - 1]
        f = g
    return f


def _divides(f: Sequence[int], p: Sequence[int]) -> bool:
    """Exact test that monic ``f`` divides ``p`` over Z."""
    rem = list(p)
    k = len(f) - 1
    for i in range(len(rem) - k):
        q = rem[i]
        if q:
            for j in range(1, k + 1):
                rem[i + j] -= q * f[j]
        rem[i] = 0
    return all(x == 0 for x in rem[-k:]) if k else True


@dataclass(frozen=True)
class ReciprocalUnit:
    """A real reciprocal algebraic integer: minimal polynomial plus a real root."""

    min_poly: IntPolynomial
    real_root: float
    house: float

    @property
    def degree(self) -> int:
        return self.min_poly.degree

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": list(self.min_poly.coeffs),
            "real_root": self.real_root,
            "house": self.house,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def coefficient_bound(degree_2d: int, i: int, X: float) -> float:
    """``binomial(2d, i) * X^i``, the bound on the ``i``-th coefficient."""
    return math.comb(degree_2d, i) * X**i


def count_bound(m: int, X: float) -> float:
    """``2m (4mX)^(m^2)``, evaluated in log space."""
    log_b = math.log(2 * m) + m * m * math.log(4 * m * X)
    return math.exp(log_b) if log_b < 709.0 else math.inf


def log_count_bound(m: int, X: float) -> float:
    return math.log(2 * m) + m * m * math.log(4 * m * X)


def _coefficient_ranges(d: int, X: float) -> list[range]:
    rngs = []
    for i in range(1, d + 1):
        b = math.floor(coefficient_bound(2 * d, i, X) + 1e-9)
        rngs.append(range(-b, b + 1))
    return rngs


def search_size(m: int, X: float) -> int:
    """Number of candidate palindromic coefficient vectors for U_m(X)."""
    total = 0
    for d in range(1, m + 1):
        total += math.prod(len(r) for r in _coefficient_ranges(d, X))
    return total


def _screen_degree(d: int, X: float, first_values: Sequence[int]):
    """Candidates of degree 2d with a_1 in ``first_values`` passing the house
    and real-root screens; returns a list of coefficient tuples."""
    rngs = _coefficient_ranges(d, X)
    rest = rngs[1:]
    out = []
    rest_grid = (
        np.array(list(itertools.product(*rest)), dtype=np.int64).reshape(-1, d - 1)
        if d > 1
        else np.zeros((1, 0), dtype=np.int64)
    )
    n = 2 * d
    for a1 in first_values:
        for start in range(0, len(rest_grid), _BATCH):
            block = rest_grid[start : start + _BATCH]
            half = np.concatenate(
                [np.full((len(block), 1), a1, dtype=np.int64), block], axis=1
            )
            full = np.concatenate(
                [np.ones((len(block), 1), dtype=np.int64), half, half[:, -2::-1], np.ones((len(block), 1), dtype=np.int64)],
                axis=1,
            )
            comp = np.zeros((len(block), n, n))
            comp[:, 0, :] = -full[:, 1:]
            comp[:, np.arange(1, n), np.arange(0, n - 1)] = 1.0
            eig = np.linalg.eigvals(comp)
            mod = np.abs(eig)
            ok = mod.max(axis=1) <= X * (1 + 1e-7)
            has_real = (np.abs(eig.imag) <= 1e-6 * np.maximum(1.0, mod)).any(axis=1)
            sel = ok & has_real
            for row, ev in zip(full[sel], eig[sel]):
                out.append((tuple(int(x) for x in row), ev))
    return out


def _accept(coeffs: tuple[int, ...], eig: np.ndarray, X: float) -> list[ReciprocalUnit]:
    P = IntPolynomial(coeffs)
    roots = _polished_roots(coeffs, eig)
    h = float(np.max(np.abs(roots)))
    if h > X * (1 + HOUSE_TOL):
        return []
    if not is_irreducible(P, roots):
        return []
    reals = isolate_real_roots(coeffs, approx=roots)
    return [ReciprocalUnit(P, r, max(h, abs(r))) for r in reals]


def _units_for_slice(d: int, X: float, first_values: Sequence[int]) -> list[ReciprocalUnit]:
    units = []
    for coeffs, eig in _screen_degree(d, X, first_values):
        units.extend(_accept(coeffs, eig, X))
    return units


def enumerate_reciprocal_units(
    m: int, X: float, capacity: int = DEFAULT_CAPACITY, workers: int = 1
) -> list[ReciprocalUnit]:
    """All elements of U_m(X), sorted by (degree, coefficients, root).

    Raises :class:`CapacityExceeded` if more than ``capacity`` coefficient
    vectors would have to be screened.  Ties ``house == X`` are included.
    """
    if m < 1 or X < 1:
        raise ValueError("need m >= 1 and X >= 1")
    size = search_size(m, X)
    if size > capacity:
        raise CapacityExceeded(f"search lattice has {size} candidates > capacity {capacity}")
    units = [
        ReciprocalUnit(IntPolynomial((1, 1)), -1.0, 1.0),
        ReciprocalUnit(IntPolynomial((1, -1)), 1.0, 1.0),
    ]
    jobs = []
    for d in range(1, m + 1):
        a1_range = list(_coefficient_ranges(d, X)[0])
        nparts = max(1, min(len(a1_range), 4 * workers))
        for k in range(nparts):
            jobs.append((d, X, a1_range[k::nparts]))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_units_for_slice, *zip(*jobs)))
    else:
        parts = [_units_for_slice(*job) for job in jobs]
    for part in parts:
        units.extend(part)
    units.sort(key=lambda u: (u.degree, u.min_poly.coeffs, u.real_root))
    return units


def check_dimitrov(u: ReciprocalUnit, d: int) -> BoundReport:
    """Compare ``house(u)`` with the Schinzel-Zassenhaus bound ``2^(1/(4d))``."""
    if abs(u.house - 1.0) <= HOUSE_TOL:
        raise RootOfUnity(f"{u.min_poly} has house 1")
    return compare(
        "dimitrov-house-bound",
        u.house,
        ">",
        2.0 ** (1.0 / (4 * d)),
        citation="Dimitrov: house of a non-root-of-unity reciprocal integer of degree <= 2d exceeds 2^(1/(4d))",
        inputs={"coeffs": list(u.min_poly.coeffs), "real_root": u.real_root, "d": d},
    )


def systole_lower_bound(d: int, L: float) -> float:
    """``log 2 / (4 d L)``: injectivity lower bound for trace-field degree d, stretch L."""
    if d < 1 or L < 1:
        raise ValueError("need d >= 1 and L >= 1")
    return math.log(2.0) / (4.0 * d * L)


def exp_length_is_unit(
    length: float,
    d: int,
    L: float,
    tolerance: float = 1e-9,
    capacity: int = DEFAULT_CAPACITY,
    workers: int = 1,
) -> BoundReport:
    """Look for ``exp(length)`` among reciprocal units of degree <= 2d and
    house <= exp(length * L).

    A match passes; no match is reported inconclusive, since a miss can come
    from tolerance or from inputs that are not lengths of a semi-arithmetic
    surface.
    """
    if length <= 0:
        raise ValueError("length must be positive")
    X = math.exp(length * L) * (1 + 1e-12)
    units = enumerate_reciprocal_units(d, X, capacity=capacity, workers=workers)
    best = None
    for u in units:
        if u.real_root <= 0:
            continue
        err = abs(math.log(u.real_root) - length)
        if best is None or err < best[0]:
            best = (err, u)
    inputs = {"length": length, "d": d, "L": L, "tolerance": tolerance}
    if best is not None and best[0] <= tolerance:
        err, u = best
        return BoundReport(
            name="exp-length-reciprocal-unit",
            inputs=inputs,
            lhs=err,
            rhs=tolerance,
            relation="<=",
            status=PASS,
            citation="exp(length) is a reciprocal algebraic integer of degree <= 2d and house <= exp(length*L)",
            notes=(f"minimal polynomial {u.min_poly}", f"coeffs {list(u.min_poly.coeffs)}", f"house {u.house!r}"),
        )
    return BoundReport(
        name="exp-length-reciprocal-unit",
        inputs=inputs,
        lhs=best[0] if best else math.inf,
        rhs=tolerance,
        relation="<=",
        status=INCONCLUSIVE,
        citation="exp(length) is a reciprocal algebraic integer of degree <= 2d and house <= exp(length*L)",
        notes=(f"no unit among {len(units)} candidates matches within tolerance",),
    )
