"""Harmonic analysis on two-step nilpotent Lie groups at desk scale.

Modules, bottom-up: ``nilgroup`` (algebras and the group law), ``symplectic``
(frames for B_lambda), ``hermite`` (Hermite and special Hermite functions),
``schrodinger_rep`` (pi_lambda, matrix coefficients, Fourier transforms),
``invariant_ops`` (left-invariant fields and the sublaplacian),
``eigenchain`` (eigenfunctions, chains, probes), ``mw_embedding`` and ``cli``.
"""
from .config import DEFAULTS, Defaults
from .errors import (DimensionError, GroupFileError, NilharmError, NondegeneracyError,
                     TruncationError)
from .nilgroup import (GroupElement, TwoStepAlgebra, group_from_name, is_mw, load_group_file,
                       make_free_two_step, make_heisenberg)
from .symplectic import SymplecticFrame, frame

__version__ = "0.1.0"

__all__ = [
    "DEFAULTS", "Defaults", "DimensionError", "GroupFileError", "NilharmError",
    "NondegeneracyError", "TruncationError", "GroupElement", "TwoStepAlgebra",
    "group_from_name", "is_mw", "load_group_file", "make_free_two_step", "make_heisenberg",
    "SymplecticFrame", "frame", "__version__",
]
