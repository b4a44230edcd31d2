"""Sieve-based coefficient series: divisor functions and normalized tau.

Series are 1-indexed; values[0] is an unused sentinel.  Sieving happens in
exact integer arithmetic and the result is stored as float64, whose 53-bit
mantissa is exact for every value these sieves produce at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .errors import LengthMismatch


@dataclass(frozen=True)
class CoefficientSeries:
    """A real arithmetic sequence a(1..N) with a short name."""

    name: str
    values: np.ndarray  # length N + 1, index 0 unused

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64).copy()
        if vals.ndim != 1 or len(vals) < 2:
            raise ValueError("series needs at least one entry")
        vals[0] = 0.0
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int) -> float:
        return float(self.values[n])


def _sieve_convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """(f * g)(n) = sum_{d | n} f(d) g(n/d) for all n <= N, O(N log N)."""
    n_max = len(f) - 1
    out = np.zeros_like(f)
    for d in range(1, n_max + 1):
        if f[d]:
            out[d::d] += f[d] * g[1: n_max // d + 1]
    return out


def ones_series(n_max: int) -> CoefficientSeries:
    return CoefficientSeries("one", np.ones(n_max + 1))


def unit_series(n_max: int) -> CoefficientSeries:
    """The Dirichlet unit: 1 at n = 1, else 0."""
    v = np.zeros(n_max + 1)
    v[1] = 1.0
    return CoefficientSeries("unit", v)


def sieve_d3(n_max: int) -> CoefficientSeries:
    """d3(n) = #{(a, b, c): abc = n}, by two divisor-sieve convolutions."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    one = np.ones(n_max + 1, dtype=np.int64)
    one[0] = 0
    d2 = _sieve_convolve(one, one)
    d3 = _sieve_convolve(one, d2)
    return CoefficientSeries("d3", d3.astype(np.float64))


def d3_direct(n: int) -> int:
    """Triple-enumeration oracle for d3(n)."""
    count = 0
    for a in range(1, n + 1):
        if n % a:
            continue
        m = n // a
        for b in range(1, isqrt(m) + 1):
            if m % b == 0:
                count += 1 if b * b == m else 2
    return count


def dirichlet_convolve(f: CoefficientSeries, g: CoefficientSeries) -> CoefficientSeries:
    """(f * g)(n) = sum_{d | n} f(d) g(n/d)."""
    if f.n_max != g.n_max:
        raise LengthMismatch(f"series lengths differ: {f.n_max} vs {g.n_max}")
    return CoefficientSeries(f"({f.name}*{g.name})", _sieve_convolve(f.values, g.values))


def sieve_d4(n_max: int) -> CoefficientSeries:
    """d4 = 1 * d3, the four-fold divisor function."""
    out = dirichlet_convolve(ones_series(n_max), sieve_d3(n_max))
    return CoefficientSeries("d4", out.values)


def _pentagonal_terms(n_max: int) -> list[tuple[int, int]]:
    """(exponent, sign) pairs of prod (1 - q^n) up to q^{n_max - 1}, Euler's theorem."""
    terms = [(0, 1)]
    k = 1
    while True:
        for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if g < n_max:
                terms.append((g, -1 if k % 2 else 1))
        if k * (3 * k - 1) // 2 >= n_max:
            break
        k += 1
    return sorted(terms)


def ramanujan_tau(n_max: int) -> list[int]:
    """tau(1..n_max) from the q-expansion of q * prod(1 - q^n)^24, exact ints.

    24 sparse multiplications against the pentagonal series; coefficients are
    Python integers throughout, so no overflow at any n_max.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    terms = _pentagonal_terms(n_max)
    acc = [0] * n_max
    acc[0] = 1
    for _ in range(24):
        new = [0] * n_max
        for g, s in terms:
            if s == 1:
                for i in range(n_max - g):
                    new[g + i] += acc[i]
            else:
                for i in range(n_max - g):
                    new[g + i] -= acc[i]
        acc = new
    # tau(n) is the coefficient of q^{n-1} in the product
    return [0] + acc[: n_max]


def tau_normalized(n_max: int) -> CoefficientSeries:
    """lambda_f(n) = tau(n) / n^{11/2}, the unit-normalized weight-12 eigenvalues."""
    tau = ramanujan_tau(n_max)
    n = np.arange(n_max + 1, dtype=np.float64)
    vals = np.zeros(n_max + 1)
    vals[1:] = np.array(tau[1:], dtype=np.float64) / n[1:] ** 5.5
    return CoefficientSeries("tau_norm", vals)


def write_series_csv(series: CoefficientSeries, path: str) -> None:
    """CSV export `n,value`."""
    with open(path, "w", newline="") as fh:
        fh.write("n,value\n")
        for n in range(1, series.n_max + 1):
            fh.write(f"{n},{series.values[n]:.18g}\n")
