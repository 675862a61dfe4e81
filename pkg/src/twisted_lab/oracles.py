"""Direct-summation reference transforms, O(n^2), for cross-checking the fast paths.

Characters are evaluated from coordinates with plain complex exponentials;
nothing here touches the FWHT or mixed-radix kernels.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .group import FiniteAbelianGroup, GroupFunction, SpectrumFunction

ORACLE_MAX = 4096


@lru_cache(maxsize=8)
def character_matrix(group: FiniteAbelianGroup) -> np.ndarray:
    """``M[a, x] = gamma_a(x)``, cached and read-only."""
    if group.size > ORACLE_MAX:
        raise ValueError(f"naive oracle limited to {ORACLE_MAX} points, got {group.size}")
    idx = np.arange(group.size, dtype=np.int64)
    phase = np.zeros((group.size, group.size))
    for stride, m in zip(group.strides, group.orders):
        c = (idx // stride) % m
        phase += np.outer(c, c) % m / m
    out = np.exp(2j * np.pi * phase)
    out.flags.writeable = False
    return out


def naive_forward(f: GroupFunction) -> SpectrumFunction:
    m = character_matrix(f.group)
    return SpectrumFunction(f.group, m.conj() @ f.values / f.group.size)


def naive_inverse(c: SpectrumFunction) -> GroupFunction:
    m = character_matrix(c.group)
    return GroupFunction(c.group, m.T @ c.values)


def naive_convolve(f: GroupFunction, g: GroupFunction) -> GroupFunction:
    """``(f * g)(x) = (1/n) sum_y f(y) g(x - y)``."""
    group = f.group
    n = group.size
    out = np.zeros(n, dtype=np.complex128)
    for x in range(n):
        total = 0j
        for y in range(n):
            total += f.values[y] * g.values[group.add(x, group.neg(y))]
        out[x] = total / n
    return GroupFunction(group, out)
