"""Hyperbolic surface length spectra, trace arithmetic and explicit bounds."""

from .bounds import main_bound, minimal_loop_bound
from .fn_geometry import XPiece, YPiece, twist_recover, xpiece_cross_lengths
from .isometry import Isometry, classify, translation_length
from .report import BoundReport
from .words import GroupPresentation, length_spectrum, preset, systole

__all__ = [
    "BoundReport",
    "GroupPresentation",
    "Isometry",
    "XPiece",
    "YPiece",
    "classify",
    "length_spectrum",
    "main_bound",
    "minimal_loop_bound",
    "preset",
    "systole",
    "translation_length",
    "twist_recover",
    "xpiece_cross_lengths",
]
