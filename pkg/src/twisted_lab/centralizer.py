"""Kalton-Peck maps and the centralizers built from them.

``kp_map`` acts on spectra, ``mho`` conjugates it by the Fourier transform,
``mho_sidon`` restricts to a character set first, and ``pointwise_kp`` is the
same formula applied to function values on the group. The ``defect_*``
estimators report sampled maxima (one-sided evidence for the constants
``8 L / e`` and ``2 L / e``; they never certify a supremum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .group import (
    FiniteAbelianGroup,
    GroupFunction,
    SpectrumFunction,
    convolve,
    fourier_forward,
    fourier_inverse,
    norm,
    spectral_norm,
)

E = math.e


@dataclass(frozen=True)
class LipschitzProfile:
    """Real Lipschitz ``phi`` with ``phi(0) = 0``, extended to the reals by oddness.

    ``pow`` uses ``sign(t) * min(|t|, |t|**alpha)`` so the constant stays 1:
    the bare power is not Lipschitz at the origin.
    """

    kind: str
    alpha: float = 1.0
    knots: tuple[float, ...] = ()
    table: tuple[float, ...] = ()
    lipschitz_constant: float = field(init=False)

    def __post_init__(self):
        if self.kind in ("identity", "log1p"):
            L = 1.0
        elif self.kind == "pow":
            if not 0 < self.alpha <= 1:
                raise ValueError(f"pow exponent must be in (0, 1], got {self.alpha}")
            L = 1.0
        elif self.kind == "table":
            t = np.asarray(self.knots, dtype=float)
            v = np.asarray(self.table, dtype=float)
            if t.ndim != 1 or t.shape != v.shape or t.shape[0] < 2:
                raise ValueError("table profiles need matching knots/values of length >= 2")
            if t[0] != 0.0 or v[0] != 0.0:
                raise ValueError("table profiles must start at (0, 0)")
            if np.any(np.diff(t) <= 0):
                raise ValueError("table knots must be strictly increasing")
            L = float(np.max(np.abs(np.diff(v) / np.diff(t))))
        else:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        object.__setattr__(self, "lipschitz_constant", L)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        a = np.abs(t)
        if self.kind == "identity":
            return t * 1.0
        if self.kind == "log1p":
            mag = np.log1p(a)
        elif self.kind == "pow":
            mag = np.minimum(a, a**self.alpha)
        else:
            knots = np.asarray(self.knots)
            vals = np.asarray(self.table)
            slope = (vals[-1] - vals[-2]) / (knots[-1] - knots[-2])
            mag = np.where(a <= knots[-1], np.interp(a, knots, vals), vals[-1] + slope * (a - knots[-1]))
        return np.sign(t) * mag

    @property
    def name(self) -> str:
        if self.kind == "identity":
            return "id"
        if self.kind == "pow":
            return f"pow:{self.alpha:g}"
        return self.kind

    @property
    def quasilinear_bound(self) -> float:
        return 8 * self.lipschitz_constant / E

    @property
    def centralizer_bound(self) -> float:
        return 2 * self.lipschitz_constant / E


IDENTITY = LipschitzProfile("identity")
LOG1P = LipschitzProfile("log1p")
ZERO = LipschitzProfile("table", knots=(0.0, 1.0), table=(0.0, 0.0))


def parse_profile(text: str) -> LipschitzProfile:
    """``id`` | ``log1p`` | ``pow:<alpha>`` | ``zero``."""
    text = text.strip().lower()
    if text in ("id", "identity"):
        return IDENTITY
    if text == "log1p":
        return LOG1P
    if text == "zero":
        return ZERO
    if text.startswith("pow:"):
        try:
            alpha = float(text[4:])
        except ValueError as exc:
            raise ValueError(f"bad pow exponent in {text!r}") from exc
        return LipschitzProfile("pow", alpha=alpha)
    raise ValueError(f"unknown profile {text!r}; expected id, log1p, pow:<alpha> or zero")


@dataclass(frozen=True)
class CentralizerConfig:
    profile: LipschitzProfile = IDENTITY
    p: float = 2.0
    q: float = 2.0
    spectral_p: float = 2.0

    def __post_init__(self):
        if not (1 <= self.q <= 2 <= self.p):
            raise ValueError(f"need 1 <= q <= 2 <= p, got p={self.p}, q={self.q}")
        if not self.spectral_p >= 1:
            raise ValueError(f"spectral_p must be >= 1, got {self.spectral_p}")


# ---------------------------------------------------------------------------
# the maps


def _kp_values(profile: LipschitzProfile, values: np.ndarray, total: float) -> np.ndarray:
    out = np.zeros_like(values)
    mod = np.abs(values)
    nz = mod > 0
    out[nz] = values[nz] * profile(np.log(total / mod[nz]))
    return out


def kp_map(profile: LipschitzProfile, p: float, c: SpectrumFunction) -> SpectrumFunction:
    """``c(g) * phi(log(||c||_p / |c(g)|))``, zero where ``c`` vanishes."""
    total = spectral_norm(c, p)
    if total == 0:
        return SpectrumFunction(c.group, np.zeros(c.group.size))
    return SpectrumFunction(c.group, _kp_values(profile, c.values, total))


def mho(config: CentralizerConfig, f: GroupFunction) -> GroupFunction:
    return fourier_inverse(kp_map(config.profile, config.spectral_p, fourier_forward(f)))


def _character_indices(group: FiniteAbelianGroup, sigma: Sequence) -> np.ndarray:
    idx = [group.index(s) for s in sigma]
    if len(set(idx)) != len(idx):
        raise ValueError("sigma contains duplicate characters")
    return np.array(idx, dtype=np.int64)


def mho_sidon(config: CentralizerConfig, sigma: Sequence, f: GroupFunction) -> GroupFunction:
    """Restrict the spectrum to ``sigma``, apply ``kp_map`` there, sum back."""
    idx = _character_indices(f.group, sigma)
    coeffs = fourier_forward(f).values[idx]
    total = float(np.linalg.norm(coeffs, config.spectral_p)) if coeffs.size else 0.0
    out = np.zeros(f.group.size, dtype=np.complex128)
    if total > 0:
        out[idx] = _kp_values(config.profile, coeffs, total)
    return fourier_inverse(SpectrumFunction(f.group, out))


def pointwise_kp(profile: LipschitzProfile, p: float, f: GroupFunction) -> GroupFunction:
    """``f(x) * phi(log(||f||_p / |f(x)|))`` with the Haar-normalized norm."""
    total = norm(f, p)
    if total == 0:
        return GroupFunction(f.group, np.zeros(f.group.size))
    return GroupFunction(f.group, _kp_values(profile, f.values, total))


def rearrange(c: SpectrumFunction, sigma: Sequence[int], target: FiniteAbelianGroup) -> SpectrumFunction:
    """``R^sigma``: move coefficient ``d`` to ``sigma[d]`` (injective into ``target``)."""
    sig = np.asarray(sigma, dtype=np.int64)
    if sig.shape[0] != c.group.size:
        raise ValueError("sigma must map every character of the source")
    if np.unique(sig).shape[0] != sig.shape[0]:
        raise ValueError("sigma must be injective")
    if sig.min(initial=0) < 0 or sig.max(initial=0) >= target.size:
        raise ValueError("sigma leaves the target dual")
    out = np.zeros(target.size, dtype=np.complex128)
    out[sig] = c.values
    return SpectrumFunction(target, out)


# ---------------------------------------------------------------------------
# defect estimators


@dataclass(frozen=True)
class NormedMap:
    """A map with the norms its constants are measured in."""

    name: str
    fn: Callable
    domain_norm: Callable
    codomain_norm: Callable
    bound: float = math.inf


def kp_normed(profile: LipschitzProfile, p: float = 2.0) -> NormedMap:
    return NormedMap(
        name=f"kp[{profile.name},p={p:g}]",
        fn=lambda c: kp_map(profile, p, c),
        domain_norm=lambda c: spectral_norm(c, p),
        codomain_norm=lambda c: spectral_norm(c, p),
        bound=profile.quasilinear_bound,
    )


def mho_normed(config: CentralizerConfig) -> NormedMap:
    return NormedMap(
        name=f"mho[{config.profile.name},p={config.p:g},q={config.q:g}]",
        fn=lambda f: mho(config, f),
        domain_norm=lambda f: norm(f, config.p),
        codomain_norm=lambda f: norm(f, config.q),
        bound=config.profile.quasilinear_bound,
    )


def pointwise_normed(profile: LipschitzProfile, p: float = 2.0) -> NormedMap:
    return NormedMap(
        name=f"pointwise[{profile.name},p={p:g}]",
        fn=lambda f: pointwise_kp(profile, p, f),
        domain_norm=lambda f: norm(f, p),
        codomain_norm=lambda f: norm(f, p),
        bound=profile.quasilinear_bound,
    )


SKIP_BELOW = 1e-12


def defect_quasilinear(map: NormedMap, sampler: Callable, trials: int, seed: int = 0) -> float:
    """Max of ``||M(x+y) - Mx - My|| / (||x|| + ||y||)`` over sampled pairs.

    ``sampler(rng)`` returns a pair ``(x, y)``; pairs with combined norm
    below ``1e-12`` are skipped.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    worst, used = 0.0, 0
    for _ in range(trials):
        x, y = sampler(rng)
        denom = map.domain_norm(x) + map.domain_norm(y)
        if denom < SKIP_BELOW:
            continue
        used += 1
        worst = max(worst, map.codomain_norm(map.fn(x + y) - map.fn(x) - map.fn(y)) / denom)
    if used == 0:
        raise ValueError("degenerate sampler: every pair was below the norm floor")
    return worst


def defect_l1(config: CentralizerConfig, a: GroupFunction, f: GroupFunction) -> float:
    """``||mho(a*f) - a*mho(f)||_q / (||a||_1 ||f||_p)``."""
    denom = norm(a, 1) * norm(f, config.p)
    if denom <= SKIP_BELOW:
        raise ValueError("degenerate input: ||a||_1 * ||f||_p is ~0")
    return norm(mho(config, convolve(a, f)) - convolve(a, mho(config, f)), config.q) / denom


def defect_l1_pointwise(profile: LipschitzProfile, p: float, a: GroupFunction, f: GroupFunction) -> float:
    """Convolution-centralizer defect of ``pointwise_kp`` in ``L_p``."""
    denom = norm(a, 1) * norm(f, p)
    if denom <= SKIP_BELOW:
        raise ValueError("degenerate input: ||a||_1 * ||f||_p is ~0")
    diff = pointwise_kp(profile, p, convolve(a, f)) - convolve(a, pointwise_kp(profile, p, f))
    return norm(diff, p) / denom


def max_defect_l1(config: CentralizerConfig, sampler: Callable, trials: int, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    worst, used = 0.0, 0
    for _ in range(trials):
        a, f = sampler(rng)
        if norm(a, 1) * norm(f, config.p) <= SKIP_BELOW:
            continue
        used += 1
        worst = max(worst, defect_l1(config, a, f))
    if used == 0:
        raise ValueError("degenerate sampler: every pair was below the norm floor")
    return worst


def defect_report(map: NormedMap, trials: int, max_defect: float) -> dict:
    return {
        "map": map.name,
        "trials": trials,
        "max_defect": max_defect,
        "bound": map.bound,
        "pass": bool(max_defect <= map.bound + 1e-9),
    }
