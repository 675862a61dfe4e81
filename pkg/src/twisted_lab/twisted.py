"""Twisted sums ``Y (+)_Phi X`` with ``Phi = mho``.

Pairs ``(g, f)`` carry the quasinorm ``||g - mho f||_q + ||f||_p``; the
convolution algebra acts coordinatewise. ``delta_lower`` turns witness
functions into a lower bound for the distance from ``mho`` (in ``L_inf ->
L_1`` norms) to the linear maps; ``block_defect`` measures how far ``mho`` is
from the sum of its restrictions to the subcubes of a partition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .centralizer import CentralizerConfig, mho
from .group import GroupFunction, constant, convolve, norm


@dataclass(frozen=True)
class TwistedPair:
    g: GroupFunction
    f: GroupFunction
    config: CentralizerConfig

    def __post_init__(self):
        if self.g.group != self.f.group:
            raise ValueError(f"group mismatch: {self.g.group.orders} vs {self.f.group.orders}")

    def __add__(self, other: "TwistedPair") -> "TwistedPair":
        if other.config != self.config:
            raise ValueError("cannot add pairs twisted by different maps")
        return TwistedPair(self.g + other.g, self.f + other.f, self.config)

    def to_json(self) -> dict:
        return {"g": self.g.to_json(), "f": self.f.to_json()}


def twisted_quasinorm(pair: TwistedPair) -> float:
    cfg = pair.config
    return norm(pair.g - mho(cfg, pair.f), cfg.q) + norm(pair.f, cfg.p)


def act(a: GroupFunction, pair: TwistedPair) -> TwistedPair:
    """``a . (g, f) = (a * g, a * f)``."""
    if a.group != pair.f.group:
        raise ValueError(f"group mismatch: {a.group.orders} vs {pair.f.group.orders}")
    return TwistedPair(convolve(a, pair.g), convolve(a, pair.f), pair.config)


def embed_y(g: GroupFunction, config: CentralizerConfig) -> TwistedPair:
    return TwistedPair(g, GroupFunction(g.group, np.zeros(g.group.size)), config)


def lift(f: GroupFunction, config: CentralizerConfig) -> TwistedPair:
    """The pair ``(mho f, f)``, whose quasinorm is ``||f||_p``."""
    return TwistedPair(mho(config, f), f, config)


def delta_report(config: CentralizerConfig, witnesses: Sequence[GroupFunction]) -> dict:
    """Lower bound ``(max ||mho f||_1 / ||f||_inf - ||mho 1||_1) / 2``, floored at 0.

    Witnesses may live on different groups; each is compared with ``mho`` of
    the constant on its own group.
    """
    if not witnesses:
        raise ValueError("need at least one witness")
    best = -math.inf
    best_ratio = 0.0
    for f in witnesses:
        sup = norm(f, math.inf)
        if sup <= 0:
            raise ValueError("witnesses must be nonzero")
        ratio = norm(mho(config, f), 1) / sup
        value = ratio - norm(mho(config, constant(f.group)), 1)
        if value > best:
            best = value
        best_ratio = max(best_ratio, ratio)
    return {
        "witness_count": len(witnesses),
        "max_ratio": best_ratio,
        "delta_lower": max(best / 2, 0.0),
    }


def delta_lower(config: CentralizerConfig, witnesses: Sequence[GroupFunction]) -> float:
    return delta_report(config, witnesses)["delta_lower"]


def _subcube_pieces(f: GroupFunction, subset: Sequence[int]) -> list[GroupFunction]:
    g = f.group
    if not g.is_cantor:
        raise ValueError("block decompositions need a 2-group")
    mask = 0
    for k in subset:
        if not 1 <= k <= g.rank:
            raise ValueError(f"partition index {k} outside 1..{g.rank}")
        mask |= 1 << (k - 1)
    bits = np.arange(g.size, dtype=np.int64) & mask
    labels = np.unique(bits)
    return [GroupFunction(g, np.where(bits == lab, f.values, 0)) for lab in labels]


def block_defect(config: CentralizerConfig, subset: Sequence[int], f: GroupFunction) -> float:
    """``||mho f - sum_eps mho(f 1_{Delta(a, eps)})||_q / ||f||_p``."""
    denom = norm(f, config.p)
    if denom == 0:
        raise ValueError("f must be nonzero")
    pieces = _subcube_pieces(f, subset)
    total = mho(config, f)
    for piece in pieces:
        total = total - mho(config, piece)
    return norm(total, config.q) / denom


def block_defect_bound(config: CentralizerConfig, subset: Sequence[int], f: GroupFunction) -> float:
    """``Q * ceil(log2 k) * R(f)`` with ``k = 2**|a|`` and ``R(f) = sum ||f_i||_p / ||f||_p``."""
    k = 2 ** len(set(subset))
    pieces = _subcube_pieces(f, subset)
    ratio = sum(norm(piece, config.p) for piece in pieces) / norm(f, config.p)
    return config.profile.quasilinear_bound * math.ceil(math.log2(k)) * ratio
