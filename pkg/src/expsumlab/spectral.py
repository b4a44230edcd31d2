"""Unitary DFT on Z/qZ for arbitrary q, and multiplicative convolution on F_p^x.

The transform convention throughout the library is

    Khat(n) = q^{-1/2} * sum_x K(x) e(+ n x / q),      e(t) = exp(2 pi i t),

i.e. a positive-sign kernel with unitary q^{-1/2} normalization.  The
unnormalized variant is deliberately not exposed: every arithmetic identity
downstream assumes this normalization.

Arbitrary lengths are handled by one code path: Bluestein chirp reindexing
into a power-of-two linear convolution (numpy's radix-2 FFT as the engine).
Chirp phases are computed from n^2 mod 2q in exact integer arithmetic so the
phase error stays at machine epsilon even for q ~ 10^6.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NotPrime
from .zmod import dlog_table, is_prime


@dataclass(frozen=True)
class ComplexTable:
    """Immutable table of q complex values indexed by residues mod q."""

    modulus: int
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.complex128).copy()
        if vals.shape != (self.modulus,):
            raise ValueError(f"expected {self.modulus} values, got shape {vals.shape}")
        if not np.all(np.isfinite(vals.view(np.float64))):
            raise ValueError("table contains NaN or Inf")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.modulus

    @property
    def supnorm(self) -> float:
        return float(np.abs(self.values).max()) if self.modulus else 0.0


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


@lru_cache(maxsize=64)
def _chirp_kernel(q: int, sign: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Chirp weights w[n] = e(sign * n^2 / 2q) and the FFT of the matched filter.

    Phase argument n^2 mod 2q is reduced in integer arithmetic first.
    """
    n = np.arange(q, dtype=np.int64)
    sq = (n * n) % (2 * q)
    w = np.exp(1j * sign * np.pi * sq / q)
    pad = _next_pow2(2 * q - 1)
    b = np.zeros(pad, dtype=np.complex128)
    b[:q] = np.conj(w)
    b[pad - q + 1:] = np.conj(w[1:][::-1])
    return w, np.fft.fft(b), pad


def _bluestein(values: np.ndarray, q: int, sign: int) -> np.ndarray:
    w, fb, pad = _chirp_kernel(q, sign)
    a = np.zeros(pad, dtype=np.complex128)
    a[:q] = values * w
    conv = np.fft.ifft(np.fft.fft(a) * fb)
    return conv[:q] * w


def dft_normalized(table: ComplexTable) -> ComplexTable:
    """Normalized Fourier transform: Khat(n) = q^{-1/2} sum_x K(x) e(nx/q)."""
    q = table.modulus
    if q == 1:
        return ComplexTable(1, table.values.copy())
    out = _bluestein(table.values, q, +1) / np.sqrt(q)
    return ComplexTable(q, out)


def idft_normalized(table: ComplexTable) -> ComplexTable:
    """Inverse transform: K(x) = q^{-1/2} sum_n Khat(n) e(-nx/q)."""
    q = table.modulus
    if q == 1:
        return ComplexTable(1, table.values.copy())
    out = _bluestein(table.values, q, -1) / np.sqrt(q)
    return ComplexTable(q, out)


@lru_cache(maxsize=256)
def _unit_index(p: int) -> tuple[np.ndarray, np.ndarray]:
    """(ind, pw): ind[x] = discrete log of x, pw[i] = g^i, for the cached smallest g."""
    ind = np.array(dlog_table(p), dtype=np.int64)
    pw = np.empty(p - 1, dtype=np.int64)
    pw[ind[1:]] = np.arange(1, p)
    return ind, pw


def _cyclic_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cyclic convolution of two equal-length arrays via padded pow2 FFT."""
    n = len(a)
    if n == 1:
        return a * b
    pad = _next_pow2(2 * n - 1)
    lin = np.fft.ifft(np.fft.fft(a, pad) * np.fft.fft(b, pad))[: 2 * n - 1]
    out = lin[:n].copy()
    out[: n - 1] += lin[n:]
    return out


def mult_convolve(f: ComplexTable, g: ComplexTable, p: int) -> ComplexTable:
    """Multiplicative convolution h(v) = p^{-1/2} sum_{xy=v} f(x) g(y) on F_p^x.

    Values at 0 are ignored on input and h(0) = 0 on output.  Realized by
    discrete-log reindexing to a cyclic convolution of length p - 1.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if f.modulus != p or g.modulus != p:
        raise ValueError("tables must live on Z/pZ")
    _, pw = _unit_index(p)
    fl = f.values[pw]
    gl = g.values[pw]
    conv = _cyclic_convolve(fl, gl) / np.sqrt(p)
    out = np.zeros(p, dtype=np.complex128)
    out[pw] = conv
    return ComplexTable(p, out)


def mult_convolve_direct(f: ComplexTable, g: ComplexTable, p: int) -> ComplexTable:
    """O(p^2) double-sum oracle for mult_convolve, kept deliberately naive."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    out = np.zeros(p, dtype=np.complex128)
    for x in range(1, p):
        for y in range(1, p):
            out[x * y % p] += f.values[x] * g.values[y]
    return ComplexTable(p, out / np.sqrt(p))
