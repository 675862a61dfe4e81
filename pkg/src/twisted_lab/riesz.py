"""Riesz products over dissociate sets and the unboundedness witness.

Two cases are supported, matching the order-2 split:

* ``ddagger`` -- every generator has order 2; ``f = prod(1 + i g_j / (a sqrt N))``.
  Instantiated on ``Delta_N`` with the Rademachers.
* ``dagger`` -- no generator has order 2;
  ``f = prod(1 + i (g_j + conj g_j) / (2 a sqrt N))``. Instantiated on
  ``Z_M`` with generators ``3**j``, ``M = 2 * 3**N + 1``.

``witness`` tabulates ``||mho f||_1`` against the explicit lower bounds
``0.14 phi(log(2 sqrt N)) - 0.03`` and ``0.07 log N`` (natural log).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .centralizer import IDENTITY, CentralizerConfig, LipschitzProfile, mho
from .group import (
    FiniteAbelianGroup,
    GroupFunction,
    SpectrumFunction,
    cantor_group,
    fourier_forward,
    fourier_inverse,
    is_dissociate,
    make_group,
    norm,
)

DAGGER = "dagger"
DDAGGER = "ddagger"
CASES = (DAGGER, DDAGGER)

MAX_WITNESS_N = 24
B1_SCALE, B1_OFFSET, B2_SCALE = 0.14, 0.03, 0.07


def _is_rademacher_family(group: FiniteAbelianGroup, sigma: Sequence[int]) -> bool:
    return group.is_cantor and all(s > 0 and s & (s - 1) == 0 for s in sigma)


@dataclass(frozen=True)
class RieszSpec:
    group: FiniteAbelianGroup
    sigma: tuple[int, ...]
    alpha: float = 2.0
    case_tag: str = DDAGGER

    def __post_init__(self):
        sigma = tuple(self.group.index(s) for s in self.sigma)
        object.__setattr__(self, "sigma", sigma)
        if self.case_tag not in CASES:
            raise ValueError(f"case_tag must be one of {CASES}, got {self.case_tag!r}")
        if not sigma:
            raise ValueError("sigma must contain at least one character")
        if not self.alpha >= 1:
            raise ValueError(f"alpha must be at least 1, got {self.alpha}")
        orders = [self.group.character_order(s) for s in sigma]
        if self.case_tag == DDAGGER and any(o != 2 for o in orders):
            raise ValueError("ddagger case needs every generator of order 2")
        if self.case_tag == DAGGER and any(o == 2 for o in orders):
            raise ValueError("dagger case forbids generators of order 2")
        if len(set(sigma)) != len(sigma):
            raise ValueError("sigma contains duplicate characters")
        if len(sigma) <= 16:
            if not is_dissociate(sigma, self.group):
                raise ValueError("sigma is not dissociate")
        elif not _is_rademacher_family(self.group, sigma):
            raise ValueError("dissociateness can only be trusted for Rademachers beyond 16 generators")

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def step(self) -> complex:
        """Coefficient ratio per unit of length."""
        denom = self.alpha * math.sqrt(self.n)
        return 1j / denom if self.case_tag == DDAGGER else 1j / (2 * denom)


def rademacher_spec(n: int, alpha: float = 2.0) -> RieszSpec:
    g = cantor_group(n)
    return RieszSpec(g, tuple(1 << j for j in range(n)), alpha, DDAGGER)


def lacunary_spec(n: int, alpha: float = 2.0, modulus: int | None = None) -> RieszSpec:
    m = modulus if modulus is not None else 2 * 3**n + 1
    if m < 2 * 3**n + 1:
        raise ValueError(f"modulus {m} too small for {n} ratio-3 generators")
    g = make_group([m])
    return RieszSpec(g, tuple(3**j for j in range(n)), alpha, DAGGER)


def make_spec(case_tag: str, n: int, alpha: float = 2.0) -> RieszSpec:
    if case_tag == DDAGGER:
        return rademacher_spec(n, alpha)
    if case_tag == DAGGER:
        return lacunary_spec(n, alpha)
    raise ValueError(f"case_tag must be one of {CASES}, got {case_tag!r}")


def riesz_product(spec: RieszSpec) -> GroupFunction:
    """The Riesz product, multiplied out on the group side."""
    g = spec.group
    scale = 1j / (spec.alpha * math.sqrt(spec.n))
    values = np.ones(g.size, dtype=np.complex128)
    for s in spec.sigma:
        chi = g.character_values(s)
        if spec.case_tag == DDAGGER:
            values *= 1 + scale * chi
        else:
            values *= 1 + scale * chi.real  # (chi + conj chi) / 2
    return GroupFunction(g, values)


def length_table(spec: RieszSpec) -> np.ndarray:
    """Length of every character over ``sigma`` (``-1`` off ``Gamma_N``)."""
    g = spec.group
    exps = (0, 1) if spec.case_tag == DDAGGER else (0, 1, -1)
    if g.is_cantor:
        idx = np.zeros(1, dtype=np.int64)
        length = np.zeros(1, dtype=np.int64)
        for s in spec.sigma:
            idx = np.concatenate([idx, idx ^ s])
            length = np.concatenate([length, length + 1])
    else:
        orders = np.array(g.orders, dtype=np.int64)
        coords = np.zeros((1, g.rank), dtype=np.int64)
        length = np.zeros(1, dtype=np.int64)
        for s in spec.sigma:
            cs = np.array(g.coords(s), dtype=np.int64)
            coords = np.concatenate([(coords + e * cs) % orders for e in exps])
            length = np.concatenate([length + (e != 0) for e in exps])
        idx = coords @ g.strides
    if np.unique(idx).shape[0] != idx.shape[0]:
        raise ValueError("exponent patterns collide: sigma does not embed Gamma_N")
    table = np.full(g.size, -1, dtype=np.int64)
    table[idx] = length
    return table


def closed_form_spectrum(spec: RieszSpec) -> SpectrumFunction:
    lengths = length_table(spec)
    vals = np.where(lengths >= 0, spec.step ** np.maximum(lengths, 0), 0)
    return SpectrumFunction(spec.group, vals)


@dataclass(frozen=True)
class LengthDecomposition:
    parts: tuple[GroupFunction, ...]
    lengths: np.ndarray = field(repr=False)

    def total(self) -> GroupFunction:
        out = self.parts[0]
        for part in self.parts[1:]:
            out = out + part
        return out


def length_decompose(f: GroupFunction, spec: RieszSpec, tol: float = 1e-10) -> LengthDecomposition:
    if f.group != spec.group:
        raise ValueError("function and spec live on different groups")
    lengths = length_table(spec)
    spectrum = fourier_forward(f).values
    off = np.abs(spectrum[lengths < 0])
    if off.size and off.max() > tol:
        raise ValueError(f"spectral mass {off.max():.3e} lies off Gamma_N")
    parts = []
    for k in range(spec.n + 1):
        parts.append(fourier_inverse(SpectrumFunction(f.group, np.where(lengths == k, spectrum, 0))))
    return LengthDecomposition(tuple(parts), lengths)


def bound_b1(profile: LipschitzProfile, n: int) -> float:
    return B1_SCALE * float(profile(math.log(2 * math.sqrt(n)))) - B1_OFFSET


def bound_b2(n: int) -> float:
    return B2_SCALE * math.log(n)


@dataclass(frozen=True)
class WitnessRow:
    n: int
    linf_norm: float
    l2_norm: float
    mho_l1: float
    bound_b1: float
    bound_b2: float | None
    pass_b1: bool
    pass_b2: bool | None
    seconds: float


@dataclass
class WitnessReport:
    profile: str
    alpha: float
    case_tag: str
    rows: list[WitnessRow]

    COLUMNS = ("N", "linf_norm", "l2_norm", "mho_l1", "bound_b1", "bound_b2", "pass_b1", "pass_b2", "seconds")

    @property
    def passed(self) -> bool:
        return all(r.pass_b1 and r.pass_b2 is not False for r in self.rows)

    def increasing_from(self, start: int = 2) -> bool:
        vals = [r.mho_l1 for r in self.rows if r.n >= start]
        ns = [r.n for r in self.rows if r.n >= start]
        return all(n1 < n2 and v1 < v2 for (n1, v1), (n2, v2) in zip(zip(ns, vals), zip(ns[1:], vals[1:])))


def witness_row(profile: LipschitzProfile, alpha: float, n: int, case_tag: str) -> WitnessRow:
    start = time.perf_counter()
    spec = make_spec(case_tag, n, alpha)
    f = riesz_product(spec)
    image = mho(CentralizerConfig(profile, p=math.inf, q=1), f)
    value = norm(image, 1)
    b1 = bound_b1(profile, n)
    certify_b2 = profile == IDENTITY
    b2 = bound_b2(n) if certify_b2 else None
    return WitnessRow(
        n=n,
        linf_norm=norm(f, math.inf),
        l2_norm=norm(f, 2),
        mho_l1=value,
        bound_b1=b1,
        bound_b2=b2,
        pass_b1=bool(value >= b1),
        pass_b2=bool(value >= b2) if certify_b2 else None,
        seconds=time.perf_counter() - start,
    )


def witness(
    profile: LipschitzProfile,
    alpha: float = 2.0,
    n_list: Sequence[int] = tuple(range(1, 21)),
    case_tag: str = DDAGGER,
    max_n: int = MAX_WITNESS_N,
    workers: int = 1,
) -> WitnessReport:
    ns = list(n_list)
    if not ns:
        raise ValueError("n_list is empty")
    for n in ns:
        if n < 1:
            raise ValueError(f"N must be >= 1, got {n}")
        if n > max_n:
            raise ValueError(f"N = {n} exceeds the limit {max_n}")
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(witness_row, [profile] * len(ns), [alpha] * len(ns), ns, [case_tag] * len(ns)))
    else:
        rows = [witness_row(profile, alpha, n, case_tag) for n in ns]
    return WitnessReport(profile.name, alpha, case_tag, rows)
