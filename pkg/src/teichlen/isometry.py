"""Orientation-preserving isometries of the hyperbolic plane as SL(2, R) matrices.

Traces are kept signed; absolute values are taken only where a length or a
classification needs ``|tr|``.  Lengths follow the dictionary

    length = 2 * arccosh(|tr T| / 2),   exp(length) = largest |eigenvalue| of T^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotHyperbolic

#: Tolerance on ``|trace| - 2`` used by :func:`classify`.
CLASSIFY_TOL = 1e-9
#: Tolerance on ``det - 1``, relative to the squared entry scale.
DET_TOL = 1e-12


class IsometryClass(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    IDENTITY = "identity-like"


@dataclass(frozen=True)
class Isometry:
    """A real 2x2 matrix ``[[a, b], [c, d]]`` with determinant one."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, float(getattr(self, name)))
        scale = max(1.0, abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if abs(self.det() - 1.0) > DET_TOL * scale * scale:
            raise ValueError(f"determinant {self.det()!r} is not 1")

    @classmethod
    def from_matrix(cls, m) -> Isometry:
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def projected(cls, a, b, c, d) -> Isometry:
        """Rescale an invertible matrix to determinant one.

        A negative determinant is fixed by negating the second column first.
        """
        det = a * d - b * c
        if det == 0:
            raise ValueError("singular matrix")
        if det < 0:
            b, d = -b, -d
            det = -det
        s = math.sqrt(det)
        return cls(a / s, b / s, c / s, d / s)

    @classmethod
    def identity(cls) -> Isometry:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def translation(cls, length: float) -> Isometry:
        """Translation by ``length`` along the imaginary axis."""
        h = 0.5 * length
        return cls(math.exp(h), 0.0, 0.0, math.exp(-h))

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def inverse(self) -> Isometry:
        return Isometry(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: Isometry) -> Isometry:
        return compose(self, other)

    def conjugate_by(self, s: Isometry) -> Isometry:
        """Return ``s * self * s^-1``."""
        return compose(compose(s, self), s.inverse())


def compose(A: Isometry, B: Isometry) -> Isometry:
    return Isometry(
        A.a * B.a + A.b * B.c,
        A.a * B.b + A.b * B.d,
        A.c * B.a + A.d * B.c,
        A.c * B.b + A.d * B.d,
    )


def classify(T: Isometry, tol: float = CLASSIFY_TOL) -> IsometryClass:
    t = abs(T.trace)
    if t > 2.0 + tol:
        return IsometryClass.HYPERBOLIC
    if t < 2.0 - tol:
        return IsometryClass.ELLIPTIC
    if max(abs(T.b), abs(T.c), abs(abs(T.a) - 1.0)) <= tol:
        return IsometryClass.IDENTITY
    return IsometryClass.PARABOLIC


def length_from_trace(trace: float) -> float:
    """Translation length ``2 arccosh(|trace|/2)`` of a hyperbolic trace."""
    t = abs(trace)
    if t <= 2.0 + CLASSIFY_TOL:
        raise NotHyperbolic(f"|trace| = {t!r} is not > 2")
    return 2.0 * math.acosh(0.5 * t)


def translation_length(T: Isometry) -> float:
    return length_from_trace(T.trace)


def eigen_lambda(T: Isometry) -> float:
    """Largest eigenvalue modulus of ``T^2``; equals ``exp(translation_length(T))``."""
    if classify(T) is not IsometryClass.HYPERBOLIC:
        raise NotHyperbolic(f"|trace| = {abs(T.trace)!r} is not > 2")
    t2 = abs(trace_of_square(T))
    # larger root of x^2 - t2 x + 1, written to avoid cancellation in the smaller one
    return 0.5 * (t2 + math.sqrt((t2 - 2.0) * (t2 + 2.0)))


def trace_of_square(T: Isometry) -> float:
    return T.a * T.a + 2.0 * T.b * T.c + T.d * T.d
