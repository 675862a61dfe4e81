"""Kalton-Peck centralizers on finite abelian groups.

Fourier analysis on products of cyclic groups, the Kalton-Peck maps they
induce, Riesz-product witnesses of non-triviality, Cantor-group subcube
machinery and the blockwise ``c_0 -> l_1`` construction.
"""

from .centralizer import IDENTITY, LOG1P, ZERO, CentralizerConfig, LipschitzProfile, kp_map, mho, parse_profile
from .group import (
    BudgetExceeded,
    FiniteAbelianGroup,
    GroupFunction,
    SpectrumFunction,
    cantor_group,
    convolve,
    fourier_forward,
    fourier_inverse,
    make_group,
    norm,
    spectral_norm,
    translate,
)

__all__ = [
    "BudgetExceeded",
    "CentralizerConfig",
    "FiniteAbelianGroup",
    "GroupFunction",
    "IDENTITY",
    "LOG1P",
    "LipschitzProfile",
    "SpectrumFunction",
    "ZERO",
    "cantor_group",
    "convolve",
    "fourier_forward",
    "fourier_inverse",
    "kp_map",
    "make_group",
    "mho",
    "norm",
    "parse_profile",
    "spectral_norm",
    "translate",
]
