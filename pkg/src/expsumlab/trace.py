"""Trace-function tables: characters, Kloosterman sums, pullbacks, CRT products.

A symbolic SheafSpec describes how a table is built; realize() tabulates it.
The "good" flag is declared metadata, asserted only for the whitelisted
families (nontrivial Kummer, hyper-Kloosterman, and their scalings and
affine pullbacks); the library never attempts to verify goodness itself.

Conventions at non-units: chi(0) = 0 and Kl_k(0; p) = 0 in all tables.
The unnormalized complete sum S(a, b; c) is a separate surface and keeps its
Ramanujan value S(a, 0; c) = sum over units of e(ax/c).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Union

import numpy as np

from .errors import ModuliNotCoprime, NotInvertible, NotPrime, NotSquarefree, SpecFormatError
from .spectral import ComplexTable, dft_normalized, mult_convolve
from .zmod import factorize, inverse_mod, is_prime, primitive_root, dlog_table


# --------------------------------------------------------------------------
# spec variants
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Kummer:
    """Multiplicative character chi_e mod p: chi(g^i) = e(e*i/(p-1)), chi(0) = 0."""

    p: int
    e: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        object.__setattr__(self, "e", self.e % (self.p - 1) if self.p > 2 else 0)

    @property
    def modulus(self) -> int:
        return self.p

    @property
    def g(self) -> int:
        return primitive_root(self.p)

    def is_trivial(self) -> bool:
        return self.e == 0


@dataclass(frozen=True)
class ArtinSchreier:
    """Additive phase e(f(x)/p) for a polynomial f with coefficients mod p."""

    p: int
    coeffs: tuple[int, ...]  # (c0, c1, ...) lowest degree first

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        object.__setattr__(self, "coeffs", tuple(c % self.p for c in self.coeffs))

    @property
    def modulus(self) -> int:
        return self.p


@dataclass(frozen=True)
class HyperKloosterman:
    """Kl_k(a; p), normalized by p^{-(k-1)/2}; 0 at a = 0."""

    p: int
    k: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")

    @property
    def modulus(self) -> int:
        return self.p


@dataclass(frozen=True)
class AffinePullback:
    """x -> inner(a*x + b) with a invertible."""

    a: int
    b: int
    inner: "SheafSpec"

    def __post_init__(self) -> None:
        q = self.inner.modulus
        if gcd(self.a % q, q) != 1:
            raise NotInvertible(f"pullback slope {self.a} not invertible mod {q}")

    @property
    def modulus(self) -> int:
        return self.inner.modulus


@dataclass(frozen=True)
class Scale:
    """x -> inner(lam * x) with lam invertible."""

    lam: int
    inner: "SheafSpec"

    def __post_init__(self) -> None:
        q = self.inner.modulus
        if gcd(self.lam % q, q) != 1:
            raise NotInvertible(f"scaling {self.lam} not invertible mod {q}")

    @property
    def modulus(self) -> int:
        return self.inner.modulus


@dataclass(frozen=True)
class PointwiseProduct:
    factors: tuple["SheafSpec", ...]

    def __post_init__(self) -> None:
        mods = {f.modulus for f in self.factors}
        if len(self.factors) < 1 or len(mods) != 1:
            raise ValueError("pointwise product needs >= 1 factors on a common modulus")

    @property
    def modulus(self) -> int:
        return self.factors[0].modulus


@dataclass(frozen=True)
class CRTProduct:
    """K(n) = K0(n mod q0) * K1(n mod q1) on Z/(q0 q1)Z with coprime factors."""

    factor0: "SheafSpec"
    factor1: "SheafSpec"

    def __post_init__(self) -> None:
        q0, q1 = self.factor0.modulus, self.factor1.modulus
        if gcd(q0, q1) != 1:
            raise ModuliNotCoprime(f"gcd({q0}, {q1}) != 1")

    @property
    def modulus(self) -> int:
        return self.factor0.modulus * self.factor1.modulus


@dataclass(frozen=True)
class RawTable:
    """Explicit values with no declared structure."""

    modulus: int
    values: tuple[complex, ...]
    label: str = "raw"

    def __post_init__(self) -> None:
        if len(self.values) != self.modulus:
            raise ValueError("raw table length does not match modulus")


SheafSpec = Union[
    Kummer, ArtinSchreier, HyperKloosterman, AffinePullback, Scale,
    PointwiseProduct, CRTProduct, RawTable,
]


def is_good(spec: SheafSpec) -> bool:
    """Declared goodness flag.

    Whitelist: nontrivial Kummer and HyperKloosterman, wrapped in any chain
    of Scale / AffinePullback.  Everything else is conservatively not-good;
    in particular a degree-1 ArtinSchreier phase is genuinely not good.
    """
    if isinstance(spec, Kummer):
        return not spec.is_trivial()
    if isinstance(spec, HyperKloosterman):
        return True
    if isinstance(spec, (Scale, AffinePullback)):
        return is_good(spec.inner)
    return False


def spec_id(spec: SheafSpec) -> str:
    """Short deterministic identifier used in CSV kernel_id columns.

    Comma-free so identifiers can sit in a CSV field unquoted.
    """
    if isinstance(spec, Kummer):
        return f"kummer[p={spec.p};e={spec.e}]"
    if isinstance(spec, ArtinSchreier):
        return f"aschreier[p={spec.p};f={';'.join(map(str, spec.coeffs))}]"
    if isinstance(spec, HyperKloosterman):
        return f"kl{spec.k}[p={spec.p}]"
    if isinstance(spec, AffinePullback):
        return f"aff[{spec.a};{spec.b}]({spec_id(spec.inner)})"
    if isinstance(spec, Scale):
        return f"scale[{spec.lam}]({spec_id(spec.inner)})"
    if isinstance(spec, PointwiseProduct):
        return "prod(" + "*".join(spec_id(f) for f in spec.factors) + ")"
    if isinstance(spec, CRTProduct):
        return f"crt({spec_id(spec.factor0)}*{spec_id(spec.factor1)})"
    return f"{spec.label}[q={spec.modulus}]"


# --------------------------------------------------------------------------
# Kloosterman sums
# --------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    units = [x for x in range(1, c) if gcd(x, c) == 1]
    invs = [pow(x, -1, c) for x in units]
    return np.array(units, dtype=np.int64), np.array(invs, dtype=np.int64)


def kloosterman_sum(a: int, b: int, c: int) -> complex:
    """Unnormalized complete sum S(a, b; c) = sum over units x of e((ax + b/x)/c)."""
    if c < 1:
        raise ValueError(f"modulus must be >= 1, got {c}")
    if c == 1:
        return 1.0 + 0.0j
    units, invs = _units_and_inverses(c)
    phase = (a % c * units + b % c * invs) % c
    return complex(np.exp(2j * np.pi * phase / c).sum())


def kloosterman_factorize(a: int, b: int, m: int, n: int) -> tuple[complex, complex]:
    """Split S(a, b; mn) across coprime moduli.

    Returns (S(a*nbar, b*nbar; m), S(a*mbar, b*mbar; n)); the product equals
    S(a, b; mn).
    """
    if gcd(m, n) != 1:
        raise ModuliNotCoprime(f"gcd({m}, {n}) != 1")
    nbar = pow(n % m, -1, m) if m > 1 else 0
    mbar = pow(m % n, -1, n) if n > 1 else 0
    left = kloosterman_sum(a * nbar, b * nbar, m)
    right = kloosterman_sum(a * mbar, b * mbar, n)
    return left, right


@dataclass(frozen=True)
class TraceTable:
    """Tabulated trace function with provenance and a recomputed sup-norm."""

    table: ComplexTable
    spec: SheafSpec | None
    label: str
    supnorm: float = field(default=0.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "supnorm", self.table.supnorm)

    @property
    def modulus(self) -> int:
        return self.table.modulus

    @property
    def values(self) -> np.ndarray:
        return self.table.values

    @property
    def good(self) -> bool:
        return self.spec is not None and is_good(self.spec)


def _make(values: np.ndarray, spec: SheafSpec | None, label: str) -> TraceTable:
    return TraceTable(ComplexTable(len(values), values), spec, label)


@lru_cache(maxsize=256)
def hyper_kloosterman_table(k: int, p: int) -> TraceTable:
    """Kl_k table on Z/pZ built by a deterministic left fold of mult_convolve.

    Kl_k(a) = p^{-(k-1)/2} sum_{x1...xk = a} e((x1+...+xk)/p); value 0 at a = 0.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    x = np.arange(p)
    base = np.exp(2j * np.pi * x / p)
    base[0] = 0.0
    e_table = ComplexTable(p, base)
    acc = e_table
    for _ in range(k - 1):
        acc = mult_convolve(acc, e_table, p)
    return _make(acc.values.copy(), HyperKloosterman(p, k), f"kl{k}_mod_{p}")


def hyper_kloosterman_direct(k: int, a: int, p: int) -> complex:
    """O(p^{k-1}) brute-force oracle for a single Kl_k value."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    a %= p
    if a == 0:
        return 0.0 + 0.0j
    total = 0.0 + 0.0j
    units = range(1, p)

    def rec(depth: int, prodv: int, sumv: int) -> None:
        nonlocal total
        if depth == k - 1:
            last = a * pow(prodv, -1, p) % p
            total += np.exp(2j * np.pi * ((sumv + last) % p) / p)
            return
        for x in units:
            rec(depth + 1, prodv * x % p, sumv + x)

    rec(0, 1, 0)
    return complex(total / p ** ((k - 1) / 2))


def hyper_kloosterman_composite(k: int, a: int, q: int) -> complex:
    """Kl_k(a; q) for squarefree q, assembled from prime factors.

    Kl_k(a; q) = prod over p | q of Kl_k(a * (q/p)^{-k} mod p; p).
    """
    fac = factorize(q)
    if any(m > 1 for m in fac.values()):
        raise NotSquarefree(f"{q} is not squarefree")
    out = 1.0 + 0.0j
    for p in fac:
        twist = pow(q // p, -k, p)
        out *= hyper_kloosterman_table(k, p).values[a * twist % p]
    return out


# --------------------------------------------------------------------------
# realization
# --------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _character_values(p: int, e: int) -> np.ndarray:
    ind = np.array(dlog_table(p), dtype=np.int64)
    vals = np.zeros(p, dtype=np.complex128)
    if p == 2:
        vals[1] = 1.0
        return vals
    vals[1:] = np.exp(2j * np.pi * e * ind[1:] / (p - 1))
    return vals


def realize(spec: SheafSpec) -> TraceTable:
    """Tabulate a spec into a TraceTable."""
    if isinstance(spec, Kummer):
        return _make(_character_values(spec.p, spec.e).copy(), spec, spec_id(spec))
    if isinstance(spec, ArtinSchreier):
        x = np.arange(spec.p, dtype=np.int64)
        fx = np.zeros(spec.p, dtype=np.int64)
        for c in reversed(spec.coeffs):
            fx = (fx * x + c) % spec.p
        return _make(np.exp(2j * np.pi * fx / spec.p), spec, spec_id(spec))
    if isinstance(spec, HyperKloosterman):
        return hyper_kloosterman_table(spec.k, spec.p)
    if isinstance(spec, AffinePullback):
        inner = realize(spec.inner)
        q = inner.modulus
        idx = (spec.a * np.arange(q) + spec.b) % q
        return _make(inner.values[idx], spec, spec_id(spec))
    if isinstance(spec, Scale):
        inner = realize(spec.inner)
        q = inner.modulus
        idx = (spec.lam * np.arange(q)) % q
        return _make(inner.values[idx], spec, spec_id(spec))
    if isinstance(spec, PointwiseProduct):
        tables = [realize(f) for f in spec.factors]
        vals = tables[0].values.copy()
        for t in tables[1:]:
            vals = vals * t.values
        return _make(vals, spec, spec_id(spec))
    if isinstance(spec, CRTProduct):
        t0 = realize(spec.factor0)
        t1 = realize(spec.factor1)
        q0, q1 = t0.modulus, t1.modulus
        n = np.arange(q0 * q1)
        return _make(t0.values[n % q0] * t1.values[n % q1], spec, spec_id(spec))
    if isinstance(spec, RawTable):
        return _make(np.array(spec.values, dtype=np.complex128), spec, spec_id(spec))
    raise TypeError(f"unknown spec variant: {type(spec).__name__}")


def constant_table(q: int, value: complex = 1.0) -> TraceTable:
    """Constant trace table, handy as a K1 placeholder."""
    return realize(RawTable(q, tuple([value] * q), label="const"))


def fourier_of(t: TraceTable) -> TraceTable:
    """Normalized Fourier transform of a table, preserving lineage in the label."""
    hat = dft_normalized(t.table)
    return TraceTable(hat, None, f"fourier({t.label})")


def twisted_multiplicativity_check(k0: TraceTable, k1: TraceTable, x: int) -> tuple[complex, complex]:
    """(lhs, rhs) of Khat(x; q0q1) = K0hat(x*q1bar; q0) * K1hat(x*q0bar; q1).

    lhs transforms the full CRT-product table; rhs transforms the two factors
    and evaluates them at inverse-twisted arguments.  The caller asserts
    |lhs - rhs| <= tol.
    """
    q0, q1 = k0.modulus, k1.modulus
    if gcd(q0, q1) != 1:
        raise ModuliNotCoprime(f"gcd({q0}, {q1}) != 1")
    q = q0 * q1
    n = np.arange(q)
    product = ComplexTable(q, k0.values[n % q0] * k1.values[n % q1])
    lhs = complex(dft_normalized(product).values[x % q])
    q1bar = inverse_mod(q1, q0) if q0 > 1 else 0
    q0bar = inverse_mod(q0, q1) if q1 > 1 else 0
    rhs0 = dft_normalized(k0.table).values[x * q1bar % q0]
    rhs1 = dft_normalized(k1.table).values[x * q0bar % q1]
    return lhs, complex(rhs0 * rhs1)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def spec_to_dict(spec: SheafSpec) -> dict:
    if isinstance(spec, Kummer):
        return {"variant": "kummer", "p": spec.p, "e": spec.e}
    if isinstance(spec, ArtinSchreier):
        return {"variant": "artin_schreier", "p": spec.p, "coeffs": list(spec.coeffs)}
    if isinstance(spec, HyperKloosterman):
        return {"variant": "hyper_kloosterman", "p": spec.p, "k": spec.k}
    if isinstance(spec, AffinePullback):
        return {"variant": "affine_pullback", "a": spec.a, "b": spec.b,
                "inner": spec_to_dict(spec.inner)}
    if isinstance(spec, Scale):
        return {"variant": "scale", "lambda": spec.lam, "inner": spec_to_dict(spec.inner)}
    if isinstance(spec, PointwiseProduct):
        return {"variant": "product", "factors": [spec_to_dict(f) for f in spec.factors]}
    if isinstance(spec, CRTProduct):
        return {"variant": "crt_product",
                "factors": [spec_to_dict(spec.factor0), spec_to_dict(spec.factor1)]}
    if isinstance(spec, RawTable):
        return {"variant": "raw", "modulus": spec.modulus, "label": spec.label,
                "values": [[v.real, v.imag] for v in spec.values]}
    raise TypeError(f"unknown spec variant: {type(spec).__name__}")


def _require(d: dict, key: str):
    if key not in d:
        raise SpecFormatError(f"missing key '{key}' in spec object")
    return d[key]


def spec_from_dict(d: dict) -> SheafSpec:
    if not isinstance(d, dict):
        raise SpecFormatError("spec object must be a mapping")
    variant = _require(d, "variant")
    try:
        if variant == "kummer":
            return Kummer(_require(d, "p"), _require(d, "e"))
        if variant == "artin_schreier":
            return ArtinSchreier(_require(d, "p"), tuple(_require(d, "coeffs")))
        if variant == "hyper_kloosterman":
            return HyperKloosterman(_require(d, "p"), _require(d, "k"))
        if variant == "affine_pullback":
            return AffinePullback(_require(d, "a"), _require(d, "b"),
                                  spec_from_dict(_require(d, "inner")))
        if variant == "scale":
            return Scale(_require(d, "lambda"), spec_from_dict(_require(d, "inner")))
        if variant == "product":
            return PointwiseProduct(tuple(spec_from_dict(f) for f in _require(d, "factors")))
        if variant == "crt_product":
            factors = _require(d, "factors")
            if len(factors) != 2:
                raise SpecFormatError("key 'factors' of crt_product must list exactly 2 specs")
            return CRTProduct(spec_from_dict(factors[0]), spec_from_dict(factors[1]))
        if variant == "raw":
            vals = tuple(complex(re, im) for re, im in _require(d, "values"))
            return RawTable(_require(d, "modulus"), vals, d.get("label", "raw"))
    except (TypeError, ValueError) as exc:
        raise SpecFormatError(f"malformed spec fields for variant '{variant}': {exc}") from exc
    raise SpecFormatError(f"unknown value for key 'variant': {variant!r}")


def write_table_csv(t: TraceTable | ComplexTable, path: str) -> None:
    """CSV format: header line `modulus,<q>`, rows `x,re,im` at 18 digits."""
    table = t.table if isinstance(t, TraceTable) else t
    with open(path, "w", newline="") as fh:
        fh.write(f"modulus,{table.modulus}\n")
        for x, v in enumerate(table.values):
            fh.write(f"{x},{v.real:.18g},{v.imag:.18g}\n")


def read_table_csv(path: str) -> ComplexTable:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if len(header) != 2 or header[0] != "modulus":
            raise SpecFormatError("first line must be 'modulus,<q>'")
        try:
            q = int(header[1])
        except ValueError as exc:
            raise SpecFormatError(f"bad modulus value {header[1]!r}") from exc
        vals = np.zeros(q, dtype=np.complex128)
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise SpecFormatError(f"bad row {line!r}, expected 'x,re,im'")
            x = int(parts[0])
            vals[x] = complex(float(parts[1]), float(parts[2]))
    return ComplexTable(q, vals)
