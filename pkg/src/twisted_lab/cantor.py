"""Cantor-group machinery on ``Delta_N``.

Subsets of ``{1..N}`` are given 1-based; internally they are bitmasks (bit
``k-1`` for coordinate ``k``), which is also the flat index of the Walsh
character ``w_a``. A sign ``-1`` at coordinate ``k`` is bit ``k-1`` set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .centralizer import CentralizerConfig, LipschitzProfile, mho
from .group import (
    FiniteAbelianGroup,
    GroupFunction,
    SpectrumFunction,
    cantor_group,
    fourier_forward,
    fourier_inverse,
    norm,
)

COPIES_K = 37  # Hilbert-space K-constant


def _mask(subset: Iterable[int]) -> int:
    m = 0
    for k in subset:
        m |= 1 << (k - 1)
    return m


def _check_subset(group: FiniteAbelianGroup, subset: Sequence[int], what: str = "a") -> tuple[int, ...]:
    if not group.is_cantor:
        raise ValueError("subcube machinery needs a 2-group")
    out = tuple(sorted(int(k) for k in subset))
    if len(set(out)) != len(out):
        raise ValueError(f"{what} has repeated coordinates")
    for k in out:
        if not 1 <= k <= group.rank:
            raise ValueError(f"{what} is not a subset of 1..{group.rank}: {k}")
    return out


@dataclass(frozen=True)
class SubcubeSpec:
    group: FiniteAbelianGroup
    a: tuple[int, ...]
    epsilon: tuple[int, ...]

    def __post_init__(self):
        if len(self.a) != len(self.epsilon):
            raise ValueError("epsilon must give one sign per coordinate of a")
        pairs = sorted(zip(self.a, self.epsilon))
        a = _check_subset(self.group, [k for k, _ in pairs])
        eps = tuple(int(e) for _, e in pairs)
        if any(e not in (1, -1) for e in eps):
            raise ValueError(f"signs must be +1 or -1, got {eps}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "epsilon", eps)

    @property
    def mask(self) -> int:
        return _mask(self.a)

    @property
    def sign_bits(self) -> int:
        return _mask(k for k, e in zip(self.a, self.epsilon) if e == -1)

    @property
    def measure(self) -> float:
        return 2.0 ** -len(self.a)

    def sign(self, k: int) -> int:
        return self.epsilon[self.a.index(k)]

    def membership(self) -> np.ndarray:
        idx = np.arange(self.group.size, dtype=np.int64)
        return (idx & self.mask) == self.sign_bits


def subcube(n: int, a: Sequence[int], epsilon: Sequence[int]) -> SubcubeSpec:
    return SubcubeSpec(cantor_group(n), tuple(a), tuple(epsilon))


def subcube_indicator(spec: SubcubeSpec) -> GroupFunction:
    return GroupFunction(spec.group, spec.membership().astype(np.complex128))


def subcube_spectrum(spec: SubcubeSpec) -> SpectrumFunction:
    """``2**-|a| prod_{n in b} eps(n)`` on ``w_b`` for ``b`` inside ``a``, else 0."""
    idx = np.arange(spec.group.size, dtype=np.int64)
    inside = (idx & ~spec.mask) == 0
    parity = np.bitwise_count(idx & spec.sign_bits) & 1
    vals = np.where(inside, spec.measure * (1.0 - 2.0 * parity), 0.0)
    return SpectrumFunction(spec.group, vals)


@dataclass(frozen=True)
class EmbeddingSpec:
    """Copy of ``Delta_{N-|a|}`` inside ``Delta(a, eps)`` via ``s`` = increasing
    enumeration of the complement of ``a``."""

    cube: SubcubeSpec
    s: tuple[int, ...] = field(init=False)
    source: FiniteAbelianGroup = field(init=False)

    def __post_init__(self):
        rest = tuple(k for k in range(1, self.cube.group.rank + 1) if k not in self.cube.a)
        object.__setattr__(self, "s", rest)
        object.__setattr__(self, "source", cantor_group(len(rest)))

    @property
    def target(self) -> FiniteAbelianGroup:
        return self.cube.group

    def s_of(self, d: np.ndarray | int) -> np.ndarray:
        """Bitmask ``s(d)`` for source masks ``d``."""
        d = np.asarray(d, dtype=np.int64)
        out = np.zeros_like(d)
        for n, sn in enumerate(self.s, start=1):
            out |= ((d >> (n - 1)) & 1) << (sn - 1)
        return out

    def sigma_index(self) -> np.ndarray:
        """Source index of ``sigma(x)`` for every target point ``x``."""
        x = np.arange(self.target.size, dtype=np.int64)
        out = np.zeros_like(x)
        for n, sn in enumerate(self.s, start=1):
            out |= ((x >> (sn - 1)) & 1) << (n - 1)
        return out

    def weight(self, b: Sequence[int]) -> float:
        """``c_b = 2**-|a| prod_{n in b} eps(n)``."""
        sign = math.prod(self.cube.sign(k) for k in b)
        return self.cube.measure * sign


def embedding(n: int, a: Sequence[int], epsilon: Sequence[int]) -> EmbeddingSpec:
    return EmbeddingSpec(subcube(n, a, epsilon))


def embed(spec: EmbeddingSpec, f: GroupFunction) -> GroupFunction:
    """``(Ef)(x) = f(sigma x)`` on ``Delta(a, eps)``, zero elsewhere."""
    if f.group != spec.source:
        raise ValueError(f"f lives on {f.group.orders}, expected the source {spec.source.orders}")
    vals = np.where(spec.cube.membership(), f.values[spec.sigma_index()], 0)
    return GroupFunction(spec.target, vals)


def eb_operator(spec: EmbeddingSpec, b: Sequence[int], f: GroupFunction) -> GroupFunction:
    """``E^b``: sends ``w_d`` to ``c_b w_{b xor s(d)}``."""
    if f.group != spec.source:
        raise ValueError(f"f lives on {f.group.orders}, expected the source {spec.source.orders}")
    b = tuple(sorted(b))
    if not set(b) <= set(spec.cube.a):
        raise ValueError(f"b = {b} is not a subset of a = {spec.cube.a}")
    d = np.arange(spec.source.size, dtype=np.int64)
    out = np.zeros(spec.target.size, dtype=np.complex128)
    out[_mask(b) ^ spec.s_of(d)] = spec.weight(b) * fourier_forward(f).values
    return fourier_inverse(SpectrumFunction(spec.target, out))


def subsets(a: Sequence[int]) -> list[tuple[int, ...]]:
    return [c for r in range(len(a) + 1) for c in combinations(a, r)]


def copies_defect(spec: EmbeddingSpec, profile: LipschitzProfile, f: GroupFunction) -> float:
    """``||mho(Ef) - E(mho f)||_2 / ||f||_2``."""
    cfg = CentralizerConfig(profile)
    denom = norm(f, 2)
    if denom == 0:
        raise ValueError("f must be nonzero")
    return norm(mho(cfg, embed(spec, f)) - embed(spec, mho(cfg, f)), 2) / denom


def copies_report(spec: EmbeddingSpec, profile: LipschitzProfile, samples: Sequence[GroupFunction]) -> dict:
    if not samples:
        raise ValueError("samples is empty")
    defects = [copies_defect(spec, profile, f) for f in samples]
    bound = COPIES_K * profile.quasilinear_bound
    worst = max(defects)
    return {
        "n": spec.target.rank,
        "a": list(spec.cube.a),
        "epsilon": list(spec.cube.epsilon),
        "profile": profile.name,
        "samples": len(defects),
        "defects": defects,
        "max_defect": worst,
        "bound": bound,
        "pass": bool(worst <= bound + 1e-9),
    }


def conjugating_point(cube_from: SubcubeSpec, cube_to: SubcubeSpec) -> int:
    """The ``y`` with ``y(n) = eps(n) eta(n)`` on ``a`` and 1 elsewhere."""
    if cube_from.group != cube_to.group or cube_from.a != cube_to.a:
        raise ValueError("subcubes must share the group and the coordinate set")
    return cube_from.sign_bits ^ cube_to.sign_bits


def localization_conditions(f: GroupFunction, spec: SubcubeSpec, tol: float = 1e-10) -> tuple[bool, bool, bool]:
    """The three equivalent localization tests, each evaluated independently.

    1. ``f`` vanishes off ``Delta(a, eps)``;
    2. ``r_k f = eps(k) f`` for every ``k`` in ``a``;
    3. ``F f(d xor {k}) = eps(k) F f(d)`` for every ``d`` and ``k`` in ``a``.
    """
    if f.group != spec.group:
        raise ValueError("function and subcube live on different groups")
    scale = max(norm(f, math.inf), 1e-300)
    idx = np.arange(f.group.size, dtype=np.int64)
    support_ok = bool(np.all(np.abs(f.values[~spec.membership()]) <= tol * scale))
    mult_ok = True
    for k, e in zip(spec.a, spec.epsilon):
        r = 1.0 - 2.0 * ((idx >> (k - 1)) & 1)
        if np.max(np.abs(r * f.values - e * f.values)) > tol * scale:
            mult_ok = False
            break
    spec_vals = fourier_forward(f).values
    coef_scale = max(float(np.max(np.abs(spec_vals))), 1e-300)
    coef_ok = True
    for k, e in zip(spec.a, spec.epsilon):
        flipped = spec_vals[idx ^ (1 << (k - 1))]
        if np.max(np.abs(flipped - e * spec_vals)) > tol * coef_scale:
            coef_ok = False
            break
    return support_ok, mult_ok, coef_ok


# ---------------------------------------------------------------------------
# random walk and Khintchine


def walk_mean(n: int) -> tuple[float, float]:
    """Exact ``E|X_N| = 2**-N sum_k |2k - N| C(N, k)`` and its ratio to ``sqrt(2N/pi)``."""
    if n < 1:
        raise ValueError("N must be >= 1")
    total = 0
    binom = 1
    for k in range(n + 1):
        total += abs(2 * k - n) * binom
        binom = binom * (n - k) // (k + 1)
    exact = float(Fraction(total, 2**n))
    return exact, exact / math.sqrt(2 * n / math.pi)


def khintchine_ratio(a: Sequence[float], p: float) -> float:
    """``||sum a_i r_i||_{L_p(Delta_k)} / ||a||_2``, averaged exactly over ``Delta_k``."""
    coeffs = np.asarray(a, dtype=np.complex128).reshape(-1)
    k = coeffs.shape[0]
    l2 = float(np.linalg.norm(coeffs))
    if k == 0 or l2 == 0:
        raise ValueError("coefficient vector must be nonzero")
    g = cantor_group(k)
    spectrum = np.zeros(g.size, dtype=np.complex128)
    spectrum[1 << np.arange(k)] = coeffs
    return norm(fourier_inverse(SpectrumFunction(g, spectrum)), p) / l2
