"""Blockwise map ``(x_k) -> (c_k mho_{n(k)}(x_k))`` from ``c_0`` into ``l_1``.

Block ``k`` lives on ``Delta_{n(k)}``. The domain norm is the max of the
block sup norms, the codomain norm the sum of the block ``L_1`` norms (with
normalized Haar measure, ``L_1(Delta_n)`` is ``l_1`` of ``2**n`` points after
weighting each point by ``2**-n``; see :func:`to_l1_sequence`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .centralizer import CentralizerConfig, LipschitzProfile, mho
from .group import GroupFunction, cantor_group, norm
from .riesz import rademacher_spec, riesz_product
from .sampling import random_function
from .twisted import delta_report

MAX_BLOCK_N = 24
DEFAULT_BLOCKS = 8


@dataclass(frozen=True)
class BlockSpec:
    weights: tuple[float, ...]
    dims: tuple[int, ...]
    profile: LipschitzProfile

    def __post_init__(self):
        w = tuple(float(c) for c in self.weights)
        d = tuple(int(n) for n in self.dims)
        if len(w) != len(d):
            raise ValueError("weights and dims must have the same length")
        if any(c <= 0 for c in w):
            raise ValueError("weights must be positive")
        if any(n < 1 for n in d):
            raise ValueError("dims must be positive")
        if any(n2 <= n1 for n1, n2 in zip(d, d[1:])):
            raise ValueError("dims must be strictly increasing")
        if any(n > MAX_BLOCK_N for n in d):
            raise ValueError(f"block dimension above {MAX_BLOCK_N}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "dims", d)

    @property
    def config(self) -> CentralizerConfig:
        return CentralizerConfig(self.profile, p=math.inf, q=1)

    @property
    def weight_sum(self) -> float:
        return float(sum(self.weights))

    @property
    def quasilinear_bound(self) -> float:
        return self.weight_sum * self.profile.quasilinear_bound


@dataclass(frozen=True)
class BlockVector:
    blocks: tuple[GroupFunction, ...]

    def __add__(self, other: "BlockVector") -> "BlockVector":
        if len(other.blocks) != len(self.blocks):
            raise ValueError("block count mismatch")
        return BlockVector(tuple(x + y for x, y in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        if len(other.blocks) != len(self.blocks):
            raise ValueError("block count mismatch")
        return BlockVector(tuple(x - y for x, y in zip(self.blocks, other.blocks)))

    def __mul__(self, scalar) -> "BlockVector":
        return BlockVector(tuple(x * scalar for x in self.blocks))

    __rmul__ = __mul__

    def sup_norm(self) -> float:
        return max((norm(x, math.inf) for x in self.blocks), default=0.0)

    def l1_norm(self) -> float:
        return float(sum(norm(x, 1) for x in self.blocks))


def zeros(spec: BlockSpec) -> BlockVector:
    return BlockVector(tuple(GroupFunction(cantor_group(n), np.zeros(2**n)) for n in spec.dims))


def to_l1_sequence(y: BlockVector) -> np.ndarray:
    """Flatten to an ``l_1`` sequence whose norm is ``y.l1_norm()``."""
    return np.concatenate([x.values / x.group.size for x in y.blocks]) if y.blocks else np.zeros(0)


def to_c0_sequence(x: BlockVector) -> np.ndarray:
    return np.concatenate([b.values for b in x.blocks]) if x.blocks else np.zeros(0)


def _check_conforms(spec: BlockSpec, x: BlockVector) -> None:
    if len(x.blocks) != len(spec.dims):
        raise ValueError(f"expected {len(spec.dims)} blocks, got {len(x.blocks)}")
    for k, (b, n) in enumerate(zip(x.blocks, spec.dims), start=1):
        if b.group != cantor_group(n):
            raise ValueError(f"block {k} lives on {b.group.orders}, expected Delta_{n}")


def block_map(spec: BlockSpec, x: BlockVector) -> BlockVector:
    _check_conforms(spec, x)
    cfg = spec.config
    return BlockVector(tuple(c * mho(cfg, b) for c, b in zip(spec.weights, x.blocks)))


def random_block_vector(spec: BlockSpec, rng: np.random.Generator) -> BlockVector:
    out = []
    for n in spec.dims:
        g = cantor_group(n)
        # leave some blocks empty so the sup-norm is attained unevenly
        if rng.random() < 0.2:
            out.append(GroupFunction(g, np.zeros(g.size)))
        else:
            out.append(random_function(g, rng) * float(np.exp(rng.uniform(-2, 2))))
    return BlockVector(tuple(out))


def block_quasilinear_defect(spec: BlockSpec, trials: int, seed: int = 0) -> float:
    """Sampled ``||Phi(x+y) - Phi x - Phi y||_sum / (||x||_max + ||y||_max)``."""
    rng = np.random.default_rng(seed)
    worst, used = 0.0, 0
    for _ in range(trials):
        x, y = random_block_vector(spec, rng), random_block_vector(spec, rng)
        denom = x.sup_norm() + y.sup_norm()
        if denom < 1e-12:
            continue
        used += 1
        diff = block_map(spec, x + y) - block_map(spec, x) - block_map(spec, y)
        worst = max(worst, diff.l1_norm() / denom)
    if used == 0:
        raise ValueError("degenerate sampler: every pair was below the norm floor")
    return worst


@dataclass(frozen=True)
class ScheduleEntry:
    k: int
    c_k: float
    n_k: int | None  # None when no n <= MAX_BLOCK_N meets the target


def default_schedule(profile: LipschitzProfile, blocks: int = DEFAULT_BLOCKS, max_n: int = MAX_BLOCK_N) -> list[ScheduleEntry]:
    """``c_k = 2**-k`` and ``n(k)`` = least ``n`` with ``c_k phi(log n) >= k``."""
    out = []
    for k in range(1, blocks + 1):
        c = 2.0**-k
        n_k = next((n for n in range(1, max_n + 1) if c * float(profile(math.log(n))) >= k), None)
        out.append(ScheduleEntry(k, c, n_k))
    return out


def feasible_spec(profile: LipschitzProfile, schedule: Sequence[ScheduleEntry]) -> BlockSpec:
    """Spec built from the leading entries of ``schedule`` that fit the desk budget."""
    prefix = []
    for entry in schedule:
        if entry.n_k is None:
            break
        prefix.append(entry)
    return BlockSpec(tuple(e.c_k for e in prefix), tuple(e.n_k for e in prefix), profile)


@dataclass(frozen=True)
class GrowthRow:
    k: int
    c_k: float
    n_k: int | None
    delta_lower_k: float | None
    q_sampled: float | None
    status: str


@dataclass
class GrowthReport:
    schedule: str
    profile: str
    rows: list[GrowthRow]
    weight_sum: float
    q_bound: float
    q_total: float | None = None
    notes: list[str] = field(default_factory=list)

    COLUMNS = ("k", "c_k", "n_k", "delta_lower_k", "q_sampled")

    @property
    def feasible(self) -> list[GrowthRow]:
        return [r for r in self.rows if r.status == "ok"]

    @property
    def nondecreasing(self) -> bool:
        vals = [r.delta_lower_k for r in self.feasible]
        return all(v2 >= v1 for v1, v2 in zip(vals, vals[1:]))

    @property
    def q_pass(self) -> bool:
        return self.q_total is None or self.q_total <= self.q_bound + 1e-9

    @property
    def passed(self) -> bool:
        return self.nondecreasing and self.q_pass


def block_delta_lower(c: float, n: int, profile: LipschitzProfile, alpha: float = 2.0) -> float:
    """Riesz-witness lower bound for ``delta(c * mho)`` on ``Delta_n``."""
    f = riesz_product(rademacher_spec(n, alpha))
    return c * delta_report(CentralizerConfig(profile, p=math.inf, q=1), [f])["delta_lower"]


def _block_q(c: float, n: int, profile: LipschitzProfile, trials: int, seed: int) -> float:
    return block_quasilinear_defect(BlockSpec((c,), (n,), profile), trials, seed)


def growth_report(
    spec: BlockSpec,
    trials: int = 200,
    seed: int = 0,
    infeasible: Sequence[ScheduleEntry] = (),
    schedule_name: str = "custom",
) -> GrowthReport:
    rows = []
    for k, (c, n) in enumerate(zip(spec.weights, spec.dims), start=1):
        block_trials = max(4, trials >> max(0, n - 10))  # fewer draws on big cubes
        rows.append(
            GrowthRow(
                k=k,
                c_k=c,
                n_k=n,
                delta_lower_k=block_delta_lower(c, n, spec.profile),
                q_sampled=_block_q(c, n, spec.profile, block_trials, seed + k),
                status="ok",
            )
        )
    for entry in infeasible:
        rows.append(GrowthRow(entry.k, entry.c_k, entry.n_k, None, None, "schedule-infeasible at desk scale"))
    report = GrowthReport(
        schedule=schedule_name,
        profile=spec.profile.name,
        rows=rows,
        weight_sum=spec.weight_sum,
        q_bound=spec.quasilinear_bound,
    )
    if spec.dims:
        report.q_total = block_quasilinear_defect(spec, max(4, trials >> max(0, max(spec.dims) - 10)), seed)
    return report


def default_growth_report(profile: LipschitzProfile, trials: int = 200, seed: int = 0, blocks: int = DEFAULT_BLOCKS) -> GrowthReport:
    schedule = default_schedule(profile, blocks)
    spec = feasible_spec(profile, schedule)
    rest = schedule[len(spec.dims):]
    report = growth_report(spec, trials, seed, infeasible=rest, schedule_name="default")
    report.notes.append("default schedule c_k = 2^-k, n(k) = least n with c_k*phi(log n) >= k (implementer's choice)")
    return report
