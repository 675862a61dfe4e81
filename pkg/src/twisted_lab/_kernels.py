"""Transform kernels.

Two interchangeable backends compute the unnormalized transforms used by
:mod:`twisted_lab.group`:

* ``numba``: in-place ``@njit`` loops (FWHT butterfly, mixed-radix
  Cooley-Tukey with digit reversal, Bluestein chirp-z for axes with a large
  prime factor).
* ``numpy``: vectorized reshapes for the FWHT and ``numpy.fft.fftn`` for
  everything else.

The backend is read from ``TWISTED_LAB_BACKEND`` at import time (default
``numba``; silently ``numpy`` if numba cannot be imported) and can be
switched at runtime with :func:`use_backend`.
"""

from __future__ import annotations

import contextlib
import os
from functools import lru_cache

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

BACKENDS = ("numba", "numpy")


def _initial_backend() -> str:
    name = os.environ.get("TWISTED_LAB_BACKEND", "numba").strip().lower()
    if name not in BACKENDS:
        raise ValueError(f"TWISTED_LAB_BACKEND must be one of {BACKENDS}, got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        return "numpy"
    return name


_backend = _initial_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    _backend = name


@contextlib.contextmanager
def use_backend(name: str):
    previous = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


# ---------------------------------------------------------------------------
# numba kernels

if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _fwht_inplace_nb(x):
        n = x.shape[0]
        h = 1
        while h < n:
            for i in range(0, n, 2 * h):
                for j in range(i, i + h):
                    a = x[j]
                    b = x[j + h]
                    x[j] = a + b
                    x[j + h] = a - b
            h *= 2

    @numba.njit(cache=True, nogil=True)
    def _fft_lines_nb(data, n, stride, perm, radices, sign):
        # Transforms every line of length n with the given stride, in place.
        # perm is the mixed-radix digit reversal for `radices` (first radix
        # least significant); stages run from the last radix to the first.
        size = data.shape[0]
        block = n * stride
        line = np.empty(n, dtype=np.complex128)
        pmax = 1
        for p in radices:
            if p > pmax:
                pmax = p
        t = np.empty(pmax, dtype=np.complex128)
        u = np.empty(pmax, dtype=np.complex128)
        two_pi = 2.0 * np.pi
        for outer in range(size // block):
            for inner in range(stride):
                base = outer * block + inner
                for pos in range(n):
                    line[pos] = data[base + perm[pos] * stride]
                s = 1
                for stage in range(radices.shape[0] - 1, -1, -1):
                    p = radices[stage]
                    span = s * p
                    for b in range(n // span):
                        off = b * span
                        for k0 in range(s):
                            for r in range(p):
                                ang = sign * two_pi * r * k0 / span
                                t[r] = line[off + r * s + k0] * (np.cos(ang) + 1j * np.sin(ang))
                            for q in range(p):
                                acc = 0j
                                for r in range(p):
                                    ang = sign * two_pi * ((r * q) % p) / p
                                    acc += t[r] * (np.cos(ang) + 1j * np.sin(ang))
                                u[q] = acc
                            for q in range(p):
                                line[off + k0 + q * s] = u[q]
                    s = span
                for k in range(n):
                    data[base + k * stride] = line[k]

    @numba.njit(cache=True, nogil=True)
    def _fft_pow2_nb(a, roots):
        # forward radix-2 transform in place; roots[k] = exp(-2 pi i k / n)
        n = a.shape[0]
        j = 0
        for i in range(1, n):
            bit = n >> 1
            while j & bit:
                j ^= bit
                bit >>= 1
            j |= bit
            if i < j:
                tmp = a[i]
                a[i] = a[j]
                a[j] = tmp
        length = 2
        while length <= n:
            half = length // 2
            step = n // length
            for i in range(0, n, length):
                for k in range(half):
                    v = a[i + k + half] * roots[k * step]
                    u = a[i + k]
                    a[i + k] = u + v
                    a[i + k + half] = u - v
            length *= 2

    @numba.njit(cache=True, nogil=True)
    def _bluestein_lines_nb(data, n, stride, chirp, bhat, roots):
        # X_q = chirp_q * sum_k (x_k chirp_k) conj(chirp_{q-k}), the
        # convolution done by zero-padded radix-2 transforms of length L
        size = data.shape[0]
        block = n * stride
        big = bhat.shape[0]
        a = np.empty(big, dtype=np.complex128)
        for outer in range(size // block):
            for inner in range(stride):
                base = outer * block + inner
                for k in range(n):
                    a[k] = data[base + k * stride] * chirp[k]
                for k in range(n, big):
                    a[k] = 0.0
                _fft_pow2_nb(a, roots)
                # inverse as conj(forward(conj(.)))
                for k in range(big):
                    a[k] = (a[k] * bhat[k]).conjugate()
                _fft_pow2_nb(a, roots)
                for q in range(n):
                    data[base + q * stride] = chirp[q] * a[q].conjugate() / big


# ---------------------------------------------------------------------------
# numpy kernels


def _fwht_np(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    h = 1
    while h < n:
        a = x.reshape(-1, 2, h)
        x = np.stack((a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]), axis=1).reshape(n)
        h *= 2
    return x


def _fft_np(x: np.ndarray, orders: tuple[int, ...], sign: int) -> np.ndarray:
    if not orders:
        return x.copy()
    # little-endian indexing: coordinate 1 is the last (fastest) C axis
    arr = x.reshape(orders[::-1])
    if sign < 0:
        out = np.fft.fftn(arr)
    else:
        out = np.fft.ifftn(arr) * x.shape[0]
    return out.reshape(-1)


# ---------------------------------------------------------------------------
# dispatch


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=64)
def _radix_plan(n: int) -> tuple[np.ndarray, np.ndarray]:
    radices = np.array(prime_factors(n) or [1], dtype=np.int64)
    idx = np.arange(n, dtype=np.int64)
    pos = np.zeros(n, dtype=np.int64)
    rest = idx.copy()
    weight = n
    for p in radices:
        weight //= p
        pos += (rest % p) * weight
        rest //= p
    perm = np.empty(n, dtype=np.int64)
    perm[pos] = idx
    return perm, radices


BLUESTEIN_MIN_PRIME = 64


@lru_cache(maxsize=32)
def _bluestein_plan(n: int, sign: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    big = 1 << (2 * n - 2).bit_length()
    k = np.arange(n, dtype=np.int64)
    # k^2 mod 2n keeps the chirp phase exact for large n
    chirp = np.exp(sign * 1j * np.pi * ((k * k) % (2 * n)) / n)
    b = np.zeros(big, dtype=np.complex128)
    b[:n] = chirp.conj()
    b[big - n + 1 :] = chirp[1:][::-1].conj()
    roots = np.exp(-2j * np.pi * np.arange(big // 2) / big)
    bhat = b.copy()
    _fft_pow2_nb(bhat, roots)
    return chirp, bhat, roots


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform of a length-2**k vector (copy)."""
    x = np.array(values, dtype=np.complex128, copy=True)
    n = x.shape[0]
    if n & (n - 1):
        raise ValueError(f"FWHT length must be a power of two, got {n}")
    if _backend == "numba":
        _fwht_inplace_nb(x)
        return x
    return _fwht_np(x)


def dft(values: np.ndarray, orders: tuple[int, ...], sign: int) -> np.ndarray:
    """Unnormalized multidimensional DFT with kernel exp(sign*2*pi*i*<a,x>/m).

    ``values`` is flat in little-endian mixed-radix order.
    """
    x = np.array(values, dtype=np.complex128, copy=True)
    if _backend == "numpy":
        return _fft_np(x, orders, sign)
    stride = 1
    for m in orders:
        if m > 1 and max(prime_factors(m)) > BLUESTEIN_MIN_PRIME:
            chirp, bhat, roots = _bluestein_plan(m, 1 if sign > 0 else -1)
            _bluestein_lines_nb(x, m, stride, chirp, bhat, roots)
        elif m > 1:
            perm, radices = _radix_plan(m)
            _fft_lines_nb(x, m, stride, perm, radices, float(sign))
        stride *= m
    return x
