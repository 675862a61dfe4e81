"""Seeded input families for the defect estimators and property checks.

Gaussian coefficients are the bulk; characters, set indicators, sparse
spectra and Riesz-type products are mixed in because that is where the
Kalton-Peck defects peak.
"""

from __future__ import annotations

import numpy as np

from .group import (
    FiniteAbelianGroup,
    GroupFunction,
    SpectrumFunction,
    character,
    fourier_inverse,
)

KINDS = ("gaussian", "sparse", "character", "indicator", "product", "scaled")


def complex_gaussian(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)


def random_spectrum(group: FiniteAbelianGroup, rng: np.random.Generator, kind: str | None = None) -> SpectrumFunction:
    kind = kind or rng.choice(KINDS)
    n = group.size
    if kind == "gaussian":
        c = complex_gaussian(rng, n)
    elif kind == "sparse":
        c = np.zeros(n, dtype=np.complex128)
        k = int(rng.integers(1, min(n, 6) + 1))
        pos = rng.choice(n, size=k, replace=False)
        c[pos] = complex_gaussian(rng, k)
    elif kind == "character":
        c = np.zeros(n, dtype=np.complex128)
        c[rng.integers(n)] = complex_gaussian(rng, 1)[0]
    elif kind == "indicator":
        c = (rng.random(n) < rng.uniform(0.05, 0.9)).astype(np.complex128)
    elif kind == "product":
        # coefficients decaying geometrically in a random grading
        grade = rng.integers(0, 6, size=n)
        c = (1j / rng.uniform(1.2, 4.0)) ** grade
    elif kind == "scaled":
        c = complex_gaussian(rng, n) * np.exp(rng.uniform(-8, 2, size=n))
    else:
        raise ValueError(f"unknown sample kind {kind!r}")
    return SpectrumFunction(group, c)


def random_function(group: FiniteAbelianGroup, rng: np.random.Generator, kind: str | None = None) -> GroupFunction:
    kind = kind or rng.choice(KINDS)
    n = group.size
    if kind == "gaussian":
        return GroupFunction(group, complex_gaussian(rng, n))
    if kind == "character":
        return character(group, int(rng.integers(n))) * complex_gaussian(rng, 1)[0]
    if kind == "indicator":
        v = (rng.random(n) < rng.uniform(0.05, 0.9)).astype(np.complex128)
        if not v.any():
            v[rng.integers(n)] = 1.0
        return GroupFunction(group, v)
    return fourier_inverse(random_spectrum(group, rng, kind))


def spectrum_pair(group: FiniteAbelianGroup):
    """Sampler of spectrum pairs; sometimes correlated (shared support, multiples)."""

    def draw(rng):
        x = random_spectrum(group, rng)
        mode = rng.integers(4)
        if mode == 0:
            y = random_spectrum(group, rng)
        elif mode == 1:
            y = x * complex(rng.standard_normal(), rng.standard_normal())
        elif mode == 2:
            mask = np.abs(x.values) == 0
            y = SpectrumFunction(group, np.where(mask, complex_gaussian(rng, group.size), 0))
        else:
            y = random_spectrum(group, rng) * float(np.exp(rng.uniform(-6, 6)))
        return x, y

    return draw


def function_pair(group: FiniteAbelianGroup):
    def draw(rng):
        return random_function(group, rng), random_function(group, rng)

    return draw


def l1_pair(group: FiniteAbelianGroup):
    """Sampler of ``(a, f)`` for convolution-centralizer checks."""

    def draw(rng):
        a = random_function(group, rng)
        f = random_function(group, rng)
        return a, f

    return draw
