"""Exact modular arithmetic: residues, inverses, CRT, primitive roots, discrete logs.

Everything here is plain integer arithmetic; no floating point enters any
code path.  These values feed exponential-sum arguments downstream where an
off-by-one would be silent, so all operations validate their preconditions
and raise instead of returning wrong answers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from .errors import ModuliNotCoprime, NotInvertible, NotPrime, ZeroArgument

# Deterministic Miller-Rabin witness set, valid for all n < 3.4e14.
# The library never constructs moduli anywhere near that bound.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17)


def is_prime(n: int) -> bool:
    """Deterministic primality test for 64-bit-scale integers."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sieve_primes(n: int) -> list[int]:
    """All primes <= n by a byte sieve."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            start = p * p
            sieve[start:: p] = b"\x00" * ((n - start) // p + 1)
    return [i for i, v in enumerate(sieve) if v]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization {p: exponent} by trial division."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    """Sorted list of positive divisors."""
    ds = [1]
    for p, k in factorize(n).items():
        ds = [d * p**j for d in ds for j in range(k + 1)]
    return sorted(ds)


def euler_phi(n: int) -> int:
    phi = n
    for p in factorize(n):
        phi -= phi // p
    return phi


def mobius(n: int) -> int:
    m = 1
    for _, k in factorize(n).items():
        if k > 1:
            return 0
        m = -m
    return m


def is_squarefree(n: int) -> bool:
    return all(k == 1 for k in factorize(n).values())


def inverse_mod(a: int, m: int) -> int:
    """Inverse of a modulo m; raises NotInvertible when gcd(a, m) > 1."""
    a %= m
    if gcd(a, m) != 1:
        raise NotInvertible(f"{a} is not invertible mod {m} (gcd = {gcd(a, m)})")
    return pow(a, -1, m)


@dataclass(frozen=True)
class Modulus:
    """Factored modulus q = q0 * q1 with q0 prime and gcd(q0, q1) = 1."""

    q0: int
    q1: int

    def __post_init__(self) -> None:
        if not is_prime(self.q0):
            raise NotPrime(f"q0 = {self.q0} is not prime")
        if self.q1 < 1:
            raise ValueError(f"q1 = {self.q1} must be positive")
        if gcd(self.q0, self.q1) != 1:
            raise ModuliNotCoprime(f"gcd(q0, q1) = {gcd(self.q0, self.q1)} != 1")

    @property
    def q(self) -> int:
        return self.q0 * self.q1


@dataclass(frozen=True)
class Residue:
    """An integer reduced into [0, modulus)."""

    value: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        object.__setattr__(self, "value", self.value % self.modulus)


def mod_inverse(a: Residue) -> Residue:
    """Multiplicative inverse of a residue; NotInvertible when gcd != 1."""
    return Residue(inverse_mod(a.value, a.modulus), a.modulus)


def crt_combine(a0: Residue, a1: Residue) -> Residue:
    """The unique residue mod m0*m1 reducing to a0 mod m0 and a1 mod m1."""
    m0, m1 = a0.modulus, a1.modulus
    if gcd(m0, m1) != 1:
        raise ModuliNotCoprime(f"gcd({m0}, {m1}) = {gcd(m0, m1)} != 1")
    # x = a0 + m0 * t with t = (a1 - a0) / m0 mod m1
    t = (a1.value - a0.value) * pow(m0, -1, m1) % m1
    return Residue(a0.value + m0 * t, m0 * m1)


@lru_cache(maxsize=512)
def primitive_root(p: int) -> int:
    """Smallest generator of (Z/pZ)^x for p prime.

    Smallest-g tie-breaking keeps character tables reproducible across runs.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 2:
        return 1
    cofactors = [(p - 1) // f for f in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, c, p) != 1 for c in cofactors):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


def discrete_log(x: int, g: int, p: int) -> int:
    """Baby-step giant-step: smallest i in [0, p-1) with g^i = x mod p.

    O(sqrt(p)) time and memory; for tabulating all of F_p^x use dlog_table.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    x %= p
    if x == 0:
        raise ZeroArgument("discrete log of 0 is undefined")
    if p == 2:
        return 0
    m = isqrt(p - 1) + 1
    baby = {}
    cur = 1
    for j in range(m):
        baby.setdefault(cur, j)
        cur = cur * g % p
    # factor = g^{-m}
    factor = pow(g, -m, p)
    y = x
    for i in range(m):
        if y in baby:
            return (i * m + baby[y]) % (p - 1)
        y = y * factor % p
    raise ValueError(f"{g} does not generate (Z/{p})^x")


def dlog_table(p: int, g: int | None = None) -> list[int]:
    """index table ind with ind[g^i mod p] = i for all units; ind[0] = -1."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if g is None:
        g = primitive_root(p)
    ind = [-1] * p
    cur = 1
    for i in range(p - 1):
        if ind[cur] != -1:
            raise ValueError(f"{g} is not a primitive root mod {p}")
        ind[cur] = i
        cur = cur * g % p
    return ind
