"""Internal exponential sums over F_q0 with dual evaluation routes.

Every sum in this module can be computed two independent ways: a
definition-level brute force and a structural fast path (convolution,
factorization, closed form).  Tests compare the routes; a disagreement
localizes a transcription error in the parameter dictionary rather than a
numerics problem, so the brute-force implementations stay deliberately
literal.

Two Kloosterman conventions coexist on purpose.  Trace tables set
Kl_2(0) = 0; the S <-> Kl_2 reindexing identity behind the u-sum forms
needs the normalized complete sum q^{-1/2} S(1, v; q), whose value at
v = 0 is the Ramanujan sum mu(q)/sqrt(q).  kloosterman_one_param_table
carries the latter.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, sqrt

import numpy as np

from .errors import ModulusMismatch, NotInvertible, NotPrime, UnknownSymmetryGroup, ZeroArgument
from .spectral import ComplexTable, dft_normalized, mult_convolve
from .trace import (
    AffinePullback, HyperKloosterman, Kummer, Scale, SheafSpec, TraceTable,
    hyper_kloosterman_table, kloosterman_sum, realize, spec_id,
)
from .zmod import divisors, euler_phi, inverse_mod, is_prime, mobius


def _e(num: np.ndarray | int, den: int) -> np.ndarray | complex:
    """e(num/den) with the numerator already reduced mod den."""
    return np.exp(2j * np.pi * np.asarray(num) / den)


@lru_cache(maxsize=256)
def _inverse_table(p: int) -> np.ndarray:
    """inv[x] = x^{-1} mod p for prime p, inv[0] = 0."""
    inv = np.zeros(p, dtype=np.int64)
    if p > 1:
        inv[1] = 1
    for i in range(2, p):
        inv[i] = (p - (p // i) * inv[p % i]) % p
    return inv


@lru_cache(maxsize=256)
def kloosterman_one_param_table(q: int) -> np.ndarray:
    """t[v] = q^{-1/2} S(1, v; q) for prime q, including t[0] = -1/sqrt(q)."""
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    t = hyper_kloosterman_table(2, q).values.copy()
    t[0] = mobius(q) / sqrt(q)
    t.setflags(write=False)
    return t


# --------------------------------------------------------------------------
# parameter records
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PairParams:
    """Arguments of a shifted pair correlation over F_q."""

    q: int
    alpha: int
    beta: int
    alphap: int
    betap: int
    delta: int

    def __post_init__(self) -> None:
        if not is_prime(self.q):
            raise NotPrime(f"{self.q} is not prime")
        for name in ("alpha", "beta", "alphap", "betap", "delta"):
            object.__setattr__(self, name, getattr(self, name) % self.q)
        if 0 in (self.alpha, self.beta, self.alphap, self.betap):
            raise ZeroArgument("alpha, beta, alpha', beta' must be nonzero mod q")


@dataclass(frozen=True)
class FT2Params:
    """Parameter record shared by the dual-sum blocks.

    c = c1*c2 and c' = c1*c2p; k = r*c1*c2*c2p/n1.  The moduli entering
    inverses (q0 against q1, r, n1, k; m against r*c1*c2/n1) are validated
    here so downstream code can take unit arguments for granted.
    """

    r: int
    c1: int
    c2: int
    c2p: int
    n1: int
    m: int
    mp: int
    q0: int
    q1: int
    sign: int
    n: int

    def __post_init__(self) -> None:
        for name in ("r", "c1", "c2", "c2p", "n1", "m", "mp", "q1"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not is_prime(self.q0):
            raise NotPrime(f"q0 = {self.q0} is not prime")
        if (self.r * self.c1) % self.n1 != 0:
            raise ValueError(f"n1 = {self.n1} must divide r*c1 = {self.r * self.c1}")
        if gcd(self.c1 * self.c2, self.q0 * self.q1) != 1:
            raise NotInvertible("gcd(c1*c2, q0*q1) != 1")
        if gcd(self.c1 * self.c2p, self.q0 * self.q1) != 1:
            raise NotInvertible("gcd(c1*c2p, q0*q1) != 1")
        if gcd(self.q0, self.q1 * self.r * self.n1) != 1:
            raise NotInvertible("q0 must be coprime to q1, r and n1")
        if gcd(self.m, self.big_m) != 1:
            raise NotInvertible(f"gcd(m, r*c1*c2/n1) = {gcd(self.m, self.big_m)} != 1")
        if gcd(self.mp, self.big_mp) != 1:
            raise NotInvertible(f"gcd(mp, r*c1*c2p/n1) = {gcd(self.mp, self.big_mp)} != 1")

    @property
    def c(self) -> int:
        return self.c1 * self.c2

    @property
    def cp(self) -> int:
        return self.c1 * self.c2p

    @property
    def k(self) -> int:
        return self.r * self.c1 * self.c2 * self.c2p // self.n1

    @property
    def big_m(self) -> int:
        """First Kloosterman modulus r*c1*c2/n1."""
        return self.r * self.c1 * self.c2 // self.n1

    @property
    def big_mp(self) -> int:
        """Second Kloosterman modulus r*c1*c2p/n1."""
        return self.r * self.c1 * self.c2p // self.n1


@dataclass(frozen=True)
class DegeneracyVerdict:
    degenerate: bool
    case: str  # "scaling_torus" | "affine_stabilizer" | "none"
    gamma: str

    def __post_init__(self) -> None:
        if self.case not in ("scaling_torus", "affine_stabilizer", "none"):
            raise ValueError(f"unknown case {self.case!r}")


# --------------------------------------------------------------------------
# Z sums and pair correlations
# --------------------------------------------------------------------------

def z_sum(k0: TraceTable, alpha: int, beta: int) -> ComplexTable:
    """Z(v) = q^{-1/2} sum_{x in F_q^x} K0(xv) e(alpha*x*v/q) Kl2(beta*x; q).

    Fast path: Z restricted to v != 0 is the multiplicative convolution of
    x -> K0(x) e(alpha*x/q) with y -> Kl2(beta/y; q); the v = 0 entry is
    K0(0)/q, evaluated directly.
    """
    q = k0.modulus
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    alpha %= q
    beta %= q
    if alpha == 0 or beta == 0:
        raise ZeroArgument("alpha and beta must be nonzero mod q")
    x = np.arange(q)
    kalpha = ComplexTable(q, k0.values * _e(alpha * x % q, q))
    kl2 = hyper_kloosterman_table(2, q).values
    inv = _inverse_table(q)
    gtab = np.zeros(q, dtype=np.complex128)
    gtab[1:] = kl2[beta * inv[1:] % q]
    z = mult_convolve(kalpha, ComplexTable(q, gtab), q).values.copy()
    z[0] = k0.values[0] * kl2[beta * x[1:] % q].sum() / sqrt(q)
    return ComplexTable(q, z)


def z_sum_direct(k0: TraceTable, alpha: int, beta: int) -> ComplexTable:
    """O(q^2) literal evaluation of the defining double sum (oracle)."""
    q = k0.modulus
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    alpha %= q
    beta %= q
    if alpha == 0 or beta == 0:
        raise ZeroArgument("alpha and beta must be nonzero mod q")
    kl2 = hyper_kloosterman_table(2, q).values
    x = np.arange(1, q)
    out = np.empty(q, dtype=np.complex128)
    for v in range(q):
        out[v] = (k0.values[x * v % q] * _e(alpha * x * v % q, q) * kl2[beta * x % q]).sum()
    return ComplexTable(q, out / sqrt(q))


def pair_correlation(z: ComplexTable, zp: ComplexTable, delta: int) -> complex:
    """sum over v mod q of Z(v) * conj(Z'(v - delta))."""
    if z.modulus != zp.modulus:
        raise ModulusMismatch(f"{z.modulus} != {zp.modulus}")
    shifted = np.roll(zp.values, delta % z.modulus)
    return complex(np.sum(z.values * np.conj(shifted)))


def delta_zero_reduction(k0: TraceTable, alpha: int, beta: int,
                         alphap: int, betap: int) -> complex:
    """The delta = 0 correlation collapsed to a single x-sum plus boundary.

    sum_v Z conj(Z') = sum_{x != 0} K0(x) conj(K0(g x)) e((alpha - alphap*g) x / q)
                       - (1/q + 1/q^2) T conj(T') + |K0(0)|^2 / q^2

    with g = beta/betap and T = sum_{x != 0} K0(x) e(alpha*x/q).  The
    boundary term is the exact complement of the diagonal detection, kept in
    full so the identity with pair_correlation holds to machine precision
    for every K0, not only those with K0(0) = 0.
    """
    q = k0.modulus
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    alpha %= q
    beta %= q
    alphap %= q
    betap %= q
    g = beta * inverse_mod(betap, q) % q
    x = np.arange(1, q)
    coef = (alpha - alphap * g) % q
    reduced = np.sum(k0.values[x] * np.conj(k0.values[g * x % q]) * _e(coef * x % q, q))
    t = np.sum(k0.values[x] * _e(alpha * x % q, q))
    tp = np.sum(k0.values[x] * _e(alphap * x % q, q))
    boundary = -(1.0 / q + 1.0 / q**2) * t * np.conj(tp) + abs(k0.values[0]) ** 2 / q**2
    return complex(reduced + boundary)


def _symmetry_family(spec: SheafSpec) -> str:
    """Resolve a spec to a family with declared (T, Aff) symmetry groups."""
    while isinstance(spec, (Scale, AffinePullback)):
        if isinstance(spec, AffinePullback) and spec.b % spec.modulus != 0:
            raise UnknownSymmetryGroup("translated pullbacks carry no declared symmetry data")
        spec = spec.inner
    if isinstance(spec, Kummer) and not spec.is_trivial():
        return "kummer"
    if isinstance(spec, HyperKloosterman):
        return "hyper_kloosterman"
    raise UnknownSymmetryGroup(f"no declared symmetry groups for {type(spec).__name__}")


def classify_degeneracy(spec: SheafSpec, params: PairParams) -> DegeneracyVerdict:
    """Predict whether the pair correlation carries a main term of size q.

    Declared symmetry data: Kummer sheaves are fixed by every scaling
    (T = F_q^x) and by no genuine affine map; hyper-Kloosterman sheaves only
    by the identity (T = {1}).  Degeneracy requires delta = 0.
    """
    family = _symmetry_family(spec)
    q = params.q
    if params.delta % q != 0:
        return DegeneracyVerdict(False, "none", "")
    ga = params.alpha * inverse_mod(params.alphap, q) % q
    gb = params.beta * inverse_mod(params.betap, q) % q
    if family == "kummer":
        if ga == gb:
            return DegeneracyVerdict(True, "scaling_torus", f"y -> {ga}*y")
        # The affine branch needs translation part alphap*(ga - gb) = 0,
        # which contradicts ga != gb; scalings-only leaves nothing else.
        return DegeneracyVerdict(False, "none", "")
    if ga == 1 and gb == 1:
        return DegeneracyVerdict(True, "scaling_torus", "y -> y")
    return DegeneracyVerdict(False, "none", "")


# --------------------------------------------------------------------------
# u-sum blocks over F_q0
# --------------------------------------------------------------------------

def _check_q0_units(q0: int, **vals: int) -> None:
    bad = [f"{k}={v}" for k, v in vals.items() if gcd(v % q0, q0) != 1]
    if bad:
        raise NotInvertible(f"arguments not invertible mod {q0}: {', '.join(bad)}")


def err3_direct_sum(k0: TraceTable, c: int, m: int, q1: int) -> complex:
    """sum over units u mod q0 of K0hat(cbar (m - q1 u) q1bar; q0)."""
    q0 = k0.modulus
    _check_q0_units(q0, c=c, q1=q1)
    khat = dft_normalized(k0.table).values
    cb = inverse_mod(c, q0)
    q1b = inverse_mod(q1, q0)
    u = np.arange(1, q0)
    idx = cb * q1b % q0 * ((m - q1 * u) % q0) % q0
    return complex(khat[idx].sum())


def err3_u_sum(k0: TraceTable, c: int, m: int, q1: int) -> tuple[complex, complex]:
    """Closed forms of the err3 u-sum: (paper_form, corrected_form).

    paper_form = -K0hat(cbar m q1bar; q0) is exact when K0(0) = 0;
    corrected_form = sqrt(q0) K0(0) - K0hat(cbar m q1bar; q0) is exact always
    (the u-sum telescopes over the full row except u = 0).
    """
    q0 = k0.modulus
    _check_q0_units(q0, c=c, q1=q1)
    khat = dft_normalized(k0.table).values
    arg = inverse_mod(c, q0) * m % q0 * inverse_mod(q1, q0) % q0
    paper = -khat[arg]
    corrected = sqrt(q0) * k0.values[0] - khat[arg]
    return complex(paper), complex(corrected)


def n_sum_two_forms(k0: TraceTable, c: int, m: int, q1: int, n1: int,
                    r: int, n: int, sign: int) -> tuple[complex, complex]:
    """The weighted u-sum in its two displayed forms.

    form1 = (1/q0)  sum*_u K0hat(cbar (m - q1 u) q1bar) S(cbar n1 ubar, sign rbar cbar n1 n; q0)
    form2 = (1/q0^{1/2}) sum*_u K0hat(...) Kl2(sign cbar^2 rbar n1^2 n ubar; q0)

    with Kl2 the normalized one-parameter complete sum.  Equality is the
    S(a, b; q0) = q0^{1/2} Kl2(ab; q0) reindexing; the two routes share no
    Kloosterman code path.
    """
    q0 = k0.modulus
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    _check_q0_units(q0, c=c, q1=q1, n1=n1, r=r)
    khat = dft_normalized(k0.table).values
    cb = inverse_mod(c, q0)
    q1b = inverse_mod(q1, q0)
    rb = inverse_mod(r, q0)
    inv = _inverse_table(q0)
    u = np.arange(1, q0)
    a_u = khat[cb * q1b % q0 * ((m - q1 * u) % q0) % q0]

    b1 = sign * rb * cb % q0 * n1 % q0 * n % q0
    form1 = 0.0 + 0.0j
    for uu, au in zip(u, a_u):
        form1 += au * kloosterman_sum(cb * n1 * int(inv[uu]) % q0, b1, q0)
    form1 /= q0

    klc = kloosterman_one_param_table(q0)
    coef = sign * cb * cb % q0 * rb % q0 * n1 * n1 % q0 * (n % q0) % q0
    form2 = complex((a_u * klc[coef * inv[u] % q0]).sum() / sqrt(q0))
    return complex(form1), form2


# --------------------------------------------------------------------------
# FT1: dual-u-sum definition vs pair-correlation route
# --------------------------------------------------------------------------

def _ft1_check_units(k0: TraceTable, params: FT2Params) -> None:
    if k0.modulus != params.q0:
        raise ModulusMismatch(f"K0 lives mod {k0.modulus}, params want q0 = {params.q0}")
    _check_q0_units(params.q0, c=params.c, cp=params.cp, k=params.k)


def _n_table(khat: np.ndarray, q0: int, c: int, m: int, q1: int,
             n1: int, r: int, sign: int) -> np.ndarray:
    """N(v) for all v mod q0 via the literal u-sum (one-parameter Kl2 form)."""
    cb = inverse_mod(c, q0)
    q1b = inverse_mod(q1, q0)
    rb = inverse_mod(r, q0)
    inv = _inverse_table(q0)
    u = np.arange(1, q0)
    a_u = khat[cb * q1b % q0 * ((m - q1 * u) % q0) % q0]
    klc = kloosterman_one_param_table(q0)
    coef = sign * cb * cb % q0 * rb % q0 * n1 * n1 % q0
    v = np.arange(q0)
    idx = coef * np.outer(v, inv[u]) % q0
    return klc[idx] @ a_u / sqrt(q0)


def ft1_bruteforce(k0: TraceTable, params: FT2Params) -> complex:
    """FT1(n; q0) straight from its defining double u-sum and inner v-sum."""
    _ft1_check_units(k0, params)
    q0 = params.q0
    khat = dft_normalized(k0.table).values
    nv = _n_table(khat, q0, params.c, params.m, params.q1, params.n1, params.r, params.sign)
    nvp = _n_table(khat, q0, params.cp, params.mp, params.q1, params.n1, params.r, params.sign)
    kb = inverse_mod(params.k, q0)
    v = np.arange(q0)
    return complex(np.sum(nv * np.conj(nvp) * _e(params.n * kb % q0 * v % q0, q0)))


def ft1_pair_params(params: FT2Params) -> PairParams:
    """The (alpha, beta, alpha', beta', delta) dictionary for the Z route.

    alpha = cbar m q1bar, beta = sign cbar^3 rbar n1^2 (primed likewise with
    c', m'), delta = kbar n, all mod q0.  Requires m, m' nonzero mod q0.
    """
    q0 = params.q0
    cb = inverse_mod(params.c, q0)
    cpb = inverse_mod(params.cp, q0)
    q1b = inverse_mod(params.q1, q0)
    rb = inverse_mod(params.r, q0)
    alpha = cb * params.m % q0 * q1b % q0
    alphap = cpb * params.mp % q0 * q1b % q0
    beta = params.sign * pow(cb, 3, q0) * rb % q0 * params.n1 % q0 * params.n1 % q0
    betap = params.sign * pow(cpb, 3, q0) * rb % q0 * params.n1 % q0 * params.n1 % q0
    delta = inverse_mod(params.k, q0) * params.n % q0
    return PairParams(q0, alpha, beta, alphap, betap, delta)


def ft1_as_pair_correlation(k0: TraceTable, params: FT2Params) -> complex:
    """FT1 through sum_v Z(v) conj(Z'(v - delta)) with the parameter dictionary.

    Exact for kernels with K0(0) = 0 (all whitelisted families).
    """
    _ft1_check_units(k0, params)
    pp = ft1_pair_params(params)
    z = z_sum(k0, pp.alpha, pp.beta)
    zp = z_sum(k0, pp.alphap, pp.betap)
    return pair_correlation(z, zp, pp.delta)


# --------------------------------------------------------------------------
# FT2: brute force, Case-1 closed form, Case-2 bound
# --------------------------------------------------------------------------

def ft2_bruteforce(params: FT2Params) -> complex:
    """Direct v-sum of the two complete Kloosterman sums times the phase."""
    bm, bmp, k = params.big_m, params.big_mp, params.k
    q0, q1, r, sign, n = params.q0, params.q1, params.r, params.sign, params.n
    q0b_m = pow(q0 % bm, -1, bm) if bm > 1 else 0
    q0b_mp = pow(q0 % bmp, -1, bmp) if bmp > 1 else 0
    q0b_k = pow(q0 % k, -1, k) if k > 1 else 0
    a1 = q0b_m * q1 * r % bm * pow(params.m % bm, -1, bm) % bm if bm > 1 else 0
    a2 = q0b_mp * q1 * r % bmp * pow(params.mp % bmp, -1, bmp) % bmp if bmp > 1 else 0
    total = 0.0 + 0.0j
    for v in range(k):
        s1 = kloosterman_sum(a1, sign * q0b_m * v, bm)
        s2 = kloosterman_sum(a2, sign * q0b_mp * v, bmp)
        total += s1 * np.conj(s2) * np.exp(2j * np.pi * (n * v % k * q0b_k % k) / k)
    return complex(total)


def ft2_closed_form_case1(params: FT2Params) -> complex:
    """Closed form for n = 0 mod k, exact in integer arithmetic.

    Vanishes unless c2 = c2p; otherwise k times the Ramanujan sum
    c_M(q1 r (m - m')) = sum_{d | (M, q1 r (m - m'))} d mu(M/d) with
    M = r c1 c2 / n1.  The q1 factor inside the gcd matters only when q1
    shares a factor with M and is dropped by the usual display; it is kept
    here so the closed form equals the brute force on the whole validated
    domain.
    """
    if params.n % params.k != 0:
        raise ValueError("closed form applies to n = 0 mod k only")
    if params.c2 != params.c2p:
        return 0.0 + 0.0j
    bm = params.big_m
    g = gcd(bm, abs(params.q1 * params.r * (params.m - params.mp)))
    total = sum(d * mobius(bm // d) for d in divisors(g))
    return complex(params.k * total)


def ft2_case2_bound_check(params: FT2Params) -> tuple[complex, float]:
    """(value, bound) for n != 0 mod k; bound = k * phi(r c1 / n1), constant 1."""
    if params.n % params.k == 0:
        raise ValueError("case 2 requires n != 0 mod k")
    value = ft2_bruteforce(params)
    bound = float(params.k * euler_phi(params.r * params.c1 // params.n1))
    return value, bound


def z_tables_grid(k0: TraceTable, alphas: np.ndarray, betas: np.ndarray) -> np.ndarray:
    """Z_{alpha,beta}(v) over a parameter grid, shape (n_alpha, n_beta, q).

    One matrix product per beta; used by exhaustive degeneracy sweeps where
    calling z_sum per parameter pair would dominate the runtime.
    """
    q = k0.modulus
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    alphas = np.asarray(alphas, dtype=np.int64) % q
    betas = np.asarray(betas, dtype=np.int64) % q
    if np.any(alphas == 0) or np.any(betas == 0):
        raise ZeroArgument("grid parameters must be nonzero mod q")
    kl2 = hyper_kloosterman_table(2, q).values
    inv = _inverse_table(q)
    x = np.arange(q)
    a_rows = k0.values[None, :] * _e(alphas[:, None] * x[None, :] % q, q)
    w = np.zeros((q, q), dtype=np.complex128)
    w[:, 1:] = kl2[x[:, None] * inv[1:][None, :] % q]
    z0 = k0.values[0] * kl2[1:].sum() / sqrt(q)
    out = np.empty((len(alphas), len(betas), q), dtype=np.complex128)
    for j, b in enumerate(betas):
        binv = int(inv[b])
        rows = a_rows[:, binv * x % q]
        out[:, j, :] = rows @ w / sqrt(q)
        out[:, j, 0] = z0
    return out


# --------------------------------------------------------------------------
# family tables and samplers
# --------------------------------------------------------------------------

FAMILIES = ("kummer", "quadratic", "kl2", "kl3")


def family_table(family: str, q: int) -> TraceTable:
    """Whitelisted K0 families used by sweeps, keyed by a short name."""
    if family == "kummer":
        return realize(Kummer(q, 1))
    if family == "quadratic":
        return realize(Kummer(q, (q - 1) // 2))
    if family == "kl2":
        return hyper_kloosterman_table(2, q)
    if family == "kl3":
        return hyper_kloosterman_table(3, q)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def family_spec(family: str, q: int) -> SheafSpec:
    return family_table(family, q).spec


def sample_pair_params(rng: np.random.Generator, q: int, family: str,
                       degenerate: bool = False) -> PairParams:
    """Draw PairParams; rejection-samples the verdict to match `degenerate`."""
    spec = family_spec(family, q)
    while True:
        if degenerate:
            if family in ("kummer", "quadratic"):
                g = int(rng.integers(1, q))
                alphap = int(rng.integers(1, q))
                betap = int(rng.integers(1, q))
                cand = PairParams(q, g * alphap % q, g * betap % q, alphap, betap, 0)
            else:
                a = int(rng.integers(1, q))
                b = int(rng.integers(1, q))
                cand = PairParams(q, a, b, a, b, 0)
        else:
            cand = PairParams(q, int(rng.integers(1, q)), int(rng.integers(1, q)),
                              int(rng.integers(1, q)), int(rng.integers(1, q)),
                              int(rng.integers(0, q)))
        if classify_degeneracy(spec, cand).degenerate == degenerate:
            return cand


_SMALL_COPRIME_POOL = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13)


def sample_ft2_params(rng: np.random.Generator, q0: int, q1: int, *,
                      max_k: int = 400, case: str = "any",
                      require_unit_m_mod_q0: bool = False) -> FT2Params:
    """Draw a valid FT2Params tuple within the factorization regime.

    c1 is built from primes of n1*r, c2 and c2p are coprime to n1*r*q0*q1
    and to each other, and k stays <= max_k.  case selects n = 0 mod k
    ("case1"), n != 0 mod k ("case2") or anything ("any").
    """
    for _ in range(10_000):
        n1 = int(rng.choice((1, 1, 2, 3)))
        r = n1 * int(rng.integers(1, 4))
        c1_pool = [d for d in divisors((n1 * r) ** 2) if d <= 8]
        c1 = int(rng.choice(c1_pool))
        pool = [x for x in _SMALL_COPRIME_POOL if gcd(x, n1 * r * q0 * q1) == 1]
        c2 = int(rng.choice(pool))
        c2_same = case == "case1" and rng.random() < 0.5
        if c2_same:
            c2p = c2
        else:
            sub = [x for x in pool if gcd(x, c2) == 1 and x != c2]
            if not sub:
                continue
            c2p = int(rng.choice(sub))
        k = r * c1 * c2 * c2p // n1
        if k > max_k or (r * c1) % n1 != 0:
            continue
        bm = r * c1 * c2 // n1
        bmp = r * c1 * c2p // n1
        m = int(rng.integers(1, 4 * bm + 2))
        mp = m if rng.random() < 0.3 else int(rng.integers(1, 4 * bmp + 2))
        if gcd(m, bm) != 1 or gcd(mp, bmp) != 1:
            continue
        if require_unit_m_mod_q0 and (m % q0 == 0 or mp % q0 == 0):
            continue
        if case == "case1":
            n = k * int(rng.integers(0, 4))
        elif case == "case2":
            n = int(rng.integers(1, k)) if k > 1 else 0
            if n % k == 0:
                continue
        else:
            n = int(rng.integers(0, 3 * k + 1))
        sign = 1 if rng.random() < 0.5 else -1
        try:
            return FT2Params(r=r, c1=c1, c2=c2, c2p=c2p, n1=n1, m=m, mp=mp,
                             q0=q0, q1=q1, sign=sign, n=n)
        except (NotInvertible, ValueError):
            continue
    raise RuntimeError("parameter sampler failed to find a valid tuple")


# --------------------------------------------------------------------------
# pair-correlation sweep (shared by CLI, pilot calibration and acceptance)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    q0: int
    spec_id: str
    alpha: int
    beta: int
    alphap: int
    betap: int
    delta: int
    value: complex
    ratio_to_sqrtq: float
    degenerate: bool


def pair_sweep_tuples(family: str, trials: int, seed: int,
                      primes: tuple[int, ...], degenerate: bool = False) -> list[tuple[int, PairParams]]:
    """Deterministic tuple grid for a sweep: (q, params), primes round-robin."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(trials):
        q = primes[i % len(primes)]
        out.append((q, sample_pair_params(rng, q, family, degenerate=degenerate)))
    return out


def evaluate_sweep_row(family: str, q: int, pp: PairParams) -> SweepRow:
    k0 = family_table(family, q)
    z = z_sum(k0, pp.alpha, pp.beta)
    zp = z_sum(k0, pp.alphap, pp.betap)
    val = pair_correlation(z, zp, pp.delta)
    verdict = classify_degeneracy(k0.spec, pp)
    return SweepRow(q, spec_id(k0.spec), pp.alpha, pp.beta, pp.alphap, pp.betap,
                    pp.delta, val, abs(val) / sqrt(q), verdict.degenerate)


def sweep_rows_csv_lines(rows: list[SweepRow]) -> list[str]:
    """CSV lines (with header) in the documented schema."""
    lines = ["q0,spec_id,alpha,beta,alphap,betap,delta,re,im,ratio_to_sqrtq,degenerate_flag"]
    for r in rows:
        lines.append(
            f"{r.q0},{r.spec_id},{r.alpha},{r.beta},{r.alphap},{r.betap},{r.delta},"
            f"{r.value.real:.18g},{r.value.imag:.18g},{r.ratio_to_sqrtq:.18g},{int(r.degenerate)}"
        )
    return lines
