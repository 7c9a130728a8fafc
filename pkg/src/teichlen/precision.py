"""Working precision for the extended-precision oracles.

Library code runs in IEEE doubles.  Independent checks (hexagon and X-piece
oracles, finite differences, counting bounds evaluated as products) use
mpmath at a precision selected by the ``TEICHLEN_PRECISION`` environment
variable: ``extended`` (default, 40 decimal digits) or ``double``.
"""

import os
from contextlib import contextmanager

import mpmath

ENV_VAR = "TEICHLEN_PRECISION"
DIGITS = {"double": 17, "extended": 40}


def precision_mode():
    mode = os.environ.get(ENV_VAR, "extended").strip().lower()
    if mode not in DIGITS:
        raise ValueError(f"{ENV_VAR} must be one of {sorted(DIGITS)}, got {mode!r}")
    return mode


@contextmanager
def oracle_precision(mode=None):
    """Context in which ``mpmath.mp`` runs at the oracle precision."""
    mode = mode or precision_mode()
    with mpmath.workdps(DIGITS[mode]):
        yield mpmath.mp
