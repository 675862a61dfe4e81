"""Finite abelian groups, functions on them and on their duals.

A group ``Z_{m_1} x ... x Z_{m_r}`` is stored by its list of orders. Elements
and characters are both r-tuples, flattened to mixed-radix indices with
coordinate 1 varying fastest. Character ``a`` evaluated at element ``x`` is
``exp(2*pi*i * sum_j a_j x_j / m_j)``; for the Cantor truncation ``[2]*N``
the flat index of a character is the bitmask of its Walsh set.

Functions on ``G`` integrate against normalized Haar measure; functions on
the dual use counting measure, so ``norm(f, 2) == spectral_norm(F(f), 2)``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

DEFAULT_BUDGET = 2**24

Element = tuple[int, ...]


def size_budget() -> int:
    """Largest group size the lab will build (``TWISTED_LAB_BUDGET`` overrides)."""
    raw = os.environ.get("TWISTED_LAB_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"TWISTED_LAB_BUDGET must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError("TWISTED_LAB_BUDGET must be positive")
    return value


class BudgetExceeded(ValueError):
    """Raised when a requested group is larger than the configured budget."""


@dataclass(frozen=True)
class FiniteAbelianGroup:
    orders: tuple[int, ...]
    size: int = field(init=False)

    def __post_init__(self):
        orders = tuple(int(m) for m in self.orders)
        for m in orders:
            if m < 1:
                raise ValueError(f"group orders must be >= 1, got {m}")
        size = math.prod(orders)
        if size > np.iinfo(np.int64).max:
            raise OverflowError(f"group of size {size} overflows the index range")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "size", size)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def is_cantor(self) -> bool:
        """True for ``Delta_N`` (every order equal to 2, N >= 0)."""
        return all(m == 2 for m in self.orders)

    @property
    def strides(self) -> np.ndarray:
        out = np.ones(self.rank, dtype=np.int64)
        for j in range(1, self.rank):
            out[j] = out[j - 1] * self.orders[j - 1]
        return out

    def index(self, element: int | Sequence[int]) -> int:
        """Flat index of an element (or character) tuple; ints pass through."""
        if isinstance(element, (int, np.integer)):
            i = int(element)
            if not 0 <= i < self.size:
                raise ValueError(f"index {i} out of range for group of size {self.size}")
            return i
        coords = tuple(int(c) for c in element)
        if len(coords) != self.rank:
            raise ValueError(f"expected a {self.rank}-tuple, got {coords}")
        for c, m in zip(coords, self.orders):
            if not 0 <= c < m:
                raise ValueError(f"coordinate {c} out of range for order {m}")
        return int(np.dot(coords, self.strides)) if coords else 0

    def coords(self, index: int) -> Element:
        i = self.index(index)
        out = []
        for m in self.orders:
            out.append(i % m)
            i //= m
        return tuple(out)

    def coordinate_table(self) -> np.ndarray:
        """``(size, rank)`` array; row ``i`` holds the coordinates of index ``i``."""
        idx = np.arange(self.size, dtype=np.int64)
        table = np.empty((self.size, self.rank), dtype=np.int64)
        for j, m in enumerate(self.orders):
            table[:, j] = idx % m
            idx = idx // m
        return table

    def add(self, x: int | Sequence[int], y: int | Sequence[int]) -> int:
        cx, cy = self.coords(self.index(x)), self.coords(self.index(y))
        return self.index(tuple((a + b) % m for a, b, m in zip(cx, cy, self.orders)))

    def neg(self, x: int | Sequence[int]) -> int:
        return self.index(tuple((-c) % m for c, m in zip(self.coords(self.index(x)), self.orders)))

    def character_order(self, a: int | Sequence[int]) -> int:
        out = 1
        for c, m in zip(self.coords(self.index(a)), self.orders):
            out = math.lcm(out, m // math.gcd(c, m))
        return out

    def character_values(self, a: int | Sequence[int]) -> np.ndarray:
        """Values of character ``a`` on every element, in index order."""
        ia = self.index(a)
        if self.is_cantor:
            parity = np.bitwise_count(np.arange(self.size, dtype=np.int64) & ia) & 1
            return (1.0 - 2.0 * parity).astype(np.complex128)
        ca = np.array(self.coords(ia), dtype=np.int64)
        if self.rank == 0:
            return np.ones(1, dtype=np.complex128)
        table = self.coordinate_table()
        phase = np.zeros(self.size)
        for j, m in enumerate(self.orders):
            phase += (ca[j] * table[:, j] % m) / m
        return np.exp(2j * np.pi * phase)

    def character_at(self, a: int | Sequence[int], x: int | Sequence[int]) -> complex:
        ca, cx = self.coords(self.index(a)), self.coords(self.index(x))
        phase = sum((u * v % m) / m for u, v, m in zip(ca, cx, self.orders))
        return complex(np.exp(2j * np.pi * phase))

    def element_from_signs(self, signs: Sequence[int]) -> int:
        """Cantor-group point given multiplicatively (+1 -> bit 0, -1 -> bit 1)."""
        if not self.is_cantor:
            raise ValueError("sign notation only applies to 2-groups")
        if len(signs) != self.rank or any(s not in (1, -1) for s in signs):
            raise ValueError(f"expected {self.rank} signs in {{+1, -1}}, got {signs}")
        return self.index(tuple(0 if s == 1 else 1 for s in signs))

    def walsh(self, subset: Iterable[int]) -> int:
        """Index of the Walsh character ``w_a`` for a 1-based subset ``a``."""
        if not self.is_cantor:
            raise ValueError("Walsh characters are defined on 2-groups")
        mask = 0
        for k in subset:
            if not 1 <= k <= self.rank:
                raise ValueError(f"Walsh index {k} outside 1..{self.rank}")
            mask |= 1 << (k - 1)
        return mask


def make_group(orders: Sequence[int]) -> FiniteAbelianGroup:
    g = FiniteAbelianGroup(tuple(orders))
    if g.size > size_budget():
        raise BudgetExceeded(f"group of size {g.size} exceeds budget {size_budget()}")
    return g


def cantor_group(n: int) -> FiniteAbelianGroup:
    return make_group([2] * n)


def _as_values(group: FiniteAbelianGroup, values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128).reshape(-1)
    if arr.shape[0] != group.size:
        raise ValueError(f"expected {group.size} values, got {arr.shape[0]}")
    arr.flags.writeable = False
    return arr


class _Valued:
    group: FiniteAbelianGroup
    values: np.ndarray

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.group != self.group:
            raise ValueError(f"group mismatch: {self.group.orders} vs {other.group.orders}")

    def __add__(self, other):
        self._check(other)
        return type(self)(self.group, self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return type(self)(self.group, self.values - other.values)

    def __neg__(self):
        return type(self)(self.group, -self.values)

    def __mul__(self, other):
        if isinstance(other, _Valued):
            self._check(other)
            return type(self)(self.group, self.values * other.values)
        return type(self)(self.group, self.values * complex(other))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, scalar):
        return type(self)(self.group, self.values / complex(scalar))

    def conj(self):
        return type(self)(self.group, np.conj(self.values))

    def support(self, tol: float = 0.0) -> np.ndarray:
        return np.flatnonzero(np.abs(self.values) > tol)

    def allclose(self, other, atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.values - other.values), initial=0.0) <= atol)

    side = "group"

    def to_json(self) -> dict:
        return {
            "orders": list(self.group.orders),
            "side": self.side,
            "values": [[float(z.real), float(z.imag)] for z in self.values],
        }


@dataclass(frozen=True, eq=False)
class GroupFunction(_Valued):
    group: FiniteAbelianGroup
    values: np.ndarray

    side = "group"

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.group, self.values))

    def integral(self) -> complex:
        return complex(self.values.mean())


@dataclass(frozen=True, eq=False)
class SpectrumFunction(_Valued):
    group: FiniteAbelianGroup
    values: np.ndarray

    side = "spectrum"

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.group, self.values))


def from_json(obj: dict | str) -> GroupFunction | SpectrumFunction:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        orders, side, raw = obj["orders"], obj["side"], obj["values"]
    except KeyError as exc:
        raise ValueError(f"missing key {exc.args[0]!r} in function JSON") from exc
    group = make_group(orders)
    vals = np.array(raw, dtype=float)
    if vals.ndim != 2 or vals.shape[1] != 2:
        raise ValueError("values must be a list of [re, im] pairs")
    values = vals[:, 0] + 1j * vals[:, 1]
    if side == "group":
        return GroupFunction(group, values)
    if side == "spectrum":
        return SpectrumFunction(group, values)
    raise ValueError(f"side must be 'group' or 'spectrum', got {side!r}")


# ---------------------------------------------------------------------------
# constructors


def constant(group: FiniteAbelianGroup, value: complex = 1.0) -> GroupFunction:
    return GroupFunction(group, np.full(group.size, value, dtype=np.complex128))


def character(group: FiniteAbelianGroup, a: int | Sequence[int]) -> GroupFunction:
    return GroupFunction(group, group.character_values(a))


def rademacher(group: FiniteAbelianGroup, n: int) -> GroupFunction:
    """``r_n`` on a Cantor group (1-based)."""
    return character(group, group.walsh([n]))


def spectral_indicator(group: FiniteAbelianGroup, a: int | Sequence[int], value: complex = 1.0) -> SpectrumFunction:
    c = np.zeros(group.size, dtype=np.complex128)
    c[group.index(a)] = value
    return SpectrumFunction(group, c)


def point_indicator(group: FiniteAbelianGroup, x: int | Sequence[int]) -> GroupFunction:
    v = np.zeros(group.size, dtype=np.complex128)
    v[group.index(x)] = 1.0
    return GroupFunction(group, v)


# ---------------------------------------------------------------------------
# transforms


def fourier_forward(f: GroupFunction) -> SpectrumFunction:
    """``F(f)(a) = (1/|G|) sum_x f(x) conj(gamma_a(x))``."""
    g = f.group
    if g.is_cantor:
        out = _kernels.fwht(f.values)
    else:
        out = _kernels.dft(f.values, g.orders, -1)
    return SpectrumFunction(g, out / g.size)


def fourier_inverse(c: SpectrumFunction) -> GroupFunction:
    """``f(x) = sum_a c(a) gamma_a(x)``."""
    g = c.group
    if g.is_cantor:
        out = _kernels.fwht(c.values)
    else:
        out = _kernels.dft(c.values, g.orders, +1)
    return GroupFunction(g, out)


def convolve(f: GroupFunction, g: GroupFunction) -> GroupFunction:
    """``(f*g)(x) = (1/|G|) sum_y f(x - y) g(y)``, computed through spectra."""
    if f.group != g.group:
        raise ValueError(f"group mismatch: {f.group.orders} vs {g.group.orders}")
    return fourier_inverse(fourier_forward(f) * fourier_forward(g))


def translate(f: GroupFunction, y: int | Sequence[int]) -> GroupFunction:
    """``f_y(x) = f(x - y)``."""
    g = f.group
    iy = g.index(y)
    if g.rank == 0:
        return f
    if g.is_cantor:
        return GroupFunction(g, f.values[np.arange(g.size, dtype=np.int64) ^ iy])
    cy = g.coords(iy)
    arr = f.values.reshape(g.orders[::-1])
    shifts = cy[::-1]
    return GroupFunction(g, np.roll(arr, shifts, axis=tuple(range(g.rank))).reshape(-1))


def translation_multiplier(group: FiniteAbelianGroup, y: int | Sequence[int]) -> np.ndarray:
    """Array of ``conj(gamma(y))`` over the dual: ``F(f_y) = multiplier * F(f)``."""
    iy = group.index(y)
    if group.is_cantor:
        parity = np.bitwise_count(np.arange(group.size, dtype=np.int64) & iy) & 1
        return (1.0 - 2.0 * parity).astype(np.complex128)
    cy = np.array(group.coords(iy), dtype=np.int64)
    if group.rank == 0:
        return np.ones(1, dtype=np.complex128)
    table = group.coordinate_table()
    phase = np.zeros(group.size)
    for j, m in enumerate(group.orders):
        phase += (table[:, j] * cy[j] % m) / m
    return np.exp(-2j * np.pi * phase)


def _check_exponent(p: float) -> float:
    p = float(p)
    if not p >= 1:
        raise ValueError(f"exponent must be in [1, inf], got {p}")
    return p


def _lp(values: np.ndarray, p: float, weight: float) -> float:
    a = np.abs(values)
    if math.isinf(p):
        return float(a.max(initial=0.0))
    if p == 1:
        return float(a.sum() * weight)
    if p == 2:
        return float(math.sqrt(np.dot(a, a) * weight))
    scale = a.max(initial=0.0)
    if scale == 0:
        return 0.0
    return float(scale * (np.sum((a / scale) ** p) * weight) ** (1.0 / p))


def norm(f: GroupFunction, p: float) -> float:
    """Haar-normalized ``L_p`` norm; ``p = inf`` gives the max."""
    p = _check_exponent(p)
    return _lp(f.values, p, 1.0 / f.group.size)


def spectral_norm(c: SpectrumFunction, p: float) -> float:
    """Counting-measure ``l_p`` norm on the dual."""
    p = _check_exponent(p)
    return _lp(c.values, p, 1.0)


# ---------------------------------------------------------------------------
# dissociate sets

MAX_DISSOCIATE = 16
_EXPONENTS = np.array([0, 1, -1, 2, -2], dtype=np.int64)


def _half_relations(group: FiniteAbelianGroup, chars: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sums (flat index) and 'some factor nontrivial' flags over {0,+-1,+-2}^k."""
    k = chars.shape[0]
    orders = np.array(group.orders, dtype=np.int64)
    total = np.zeros((1, group.rank), dtype=np.int64)
    nontrivial = np.zeros(1, dtype=bool)
    for j in range(k):
        powers = (_EXPONENTS[:, None] * chars[j][None, :]) % orders  # (5, rank)
        nt = np.any(powers != 0, axis=1)
        total = ((total[:, None, :] + powers[None, :, :]) % orders).reshape(-1, group.rank)
        nontrivial = (nontrivial[:, None] | nt[None, :]).reshape(-1)
    return total @ group.strides, nontrivial


def _neg_indices(group: FiniteAbelianGroup, idx: np.ndarray) -> np.ndarray:
    out = np.zeros_like(idx)
    rest = idx.copy()
    for m, stride in zip(group.orders, group.strides):
        out += ((-(rest % m)) % m) * stride
        rest //= m
    return out


def is_dissociate(sigma: Sequence[int | Sequence[int]], group: FiniteAbelianGroup) -> bool:
    """Exhaustive dissociateness test with exponents in ``{0, +-1, +-2}``.

    Splits the ``5**k`` exponent vectors into two halves and matches sums, so
    ``k = 16`` costs two tables of ``5**8`` entries.
    """
    idx = [group.index(s) for s in sigma]
    if len(set(idx)) != len(idx):
        raise ValueError("sigma contains duplicate characters")
    if len(idx) > MAX_DISSOCIATE:
        raise ValueError(f"exhaustive search limited to {MAX_DISSOCIATE} characters, got {len(idx)}")
    if 0 in idx:
        return False
    if not idx:
        return True
    chars = np.array([group.coords(i) for i in idx], dtype=np.int64).reshape(len(idx), group.rank)
    h = len(idx) // 2
    sum_a, nt_a = _half_relations(group, chars[:h])
    sum_b, nt_b = _half_relations(group, chars[h:])
    # a relation is sum_a == -sum_b; it is nontrivial if either half is
    uniq_b, inv_b = np.unique(sum_b, return_inverse=True)
    b_nontrivial = np.zeros(uniq_b.shape[0], dtype=bool)
    np.logical_or.at(b_nontrivial, inv_b, nt_b)
    neg_b = _neg_indices(group, uniq_b)
    order = np.argsort(neg_b)
    neg_sorted = neg_b[order]
    pos = np.minimum(np.searchsorted(neg_sorted, sum_a), neg_sorted.shape[0] - 1)
    hit = neg_sorted[pos] == sum_a
    partner_nt = b_nontrivial[order][pos]
    return not bool(np.any(hit & (nt_a | partner_nt)))
