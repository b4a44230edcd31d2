"""Desk-scale experiments: smooth dyadic weights, correlation sums, AP
discrepancies, the Kl4 bilinear probe, and log-log exponent fitting.

All experiment sums are direct O(X) loops over the integers in [X, 2X]; at
desk scale the sums themselves are cheap and directness keeps them honest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, log

import numpy as np

from .coeffs import CoefficientSeries
from .errors import (
    DegenerateFit, NotSquarefree, ResidueNotCoprime, SeriesTooShort,
)
from .trace import TraceTable, hyper_kloosterman_composite
from .zmod import euler_phi, is_squarefree


# --------------------------------------------------------------------------
# smooth weights
# --------------------------------------------------------------------------

def _smoothstep(t: np.ndarray) -> np.ndarray:
    """psi(t) = sigma(t) / (sigma(t) + sigma(1-t)) with sigma(t) = exp(-1/t)."""
    t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
    tiny = np.finfo(np.float64).tiny
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0.0, np.exp(-1.0 / np.maximum(t, tiny)), 0.0)
        b = np.where(t < 1.0, np.exp(-1.0 / np.maximum(1.0 - t, tiny)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class WeightV:
    """Smooth plateau weight on [1, 2] with edge width 1/(2Z).

    V = 0 off [1, 2], V = 1 on [1 + w, 2 - w]; the edges are the standard
    exp(-1/t) smoothstep, so all derivatives exist and the j-th scales
    like Z^j.
    """

    Z: float = 1.0

    def __post_init__(self) -> None:
        if self.Z < 1.0:
            raise ValueError("dilation parameter Z must be >= 1")

    @property
    def edge(self) -> float:
        return 1.0 / (2.0 * self.Z)

    def __call__(self, x) -> np.ndarray | float:
        scalar = np.isscalar(x)
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        w = self.edge
        out = np.zeros_like(x)
        rise = (x > 1.0) & (x < 1.0 + w)
        out[rise] = _smoothstep((x[rise] - 1.0) / w)
        out[(x >= 1.0 + w) & (x <= 2.0 - w)] = 1.0
        fall = (x > 2.0 - w) & (x < 2.0)
        out[fall] = _smoothstep((2.0 - x[fall]) / w)
        return float(out[0]) if scalar else out


def weight_eval(v: WeightV, x) -> float | np.ndarray:
    """Evaluate the weight; alias of v(x) kept for CLI symmetry."""
    return v(x)


def weight_derivative_sup(v: WeightV, order: int, samples: int = 20001) -> float:
    """max |V^(j)| by central finite differences on a dense grid."""
    x = np.linspace(0.9, 2.1, samples)
    h = x[1] - x[0]
    y = v(x)
    for _ in range(order):
        y = np.gradient(y, h)
    return float(np.abs(y).max())


# --------------------------------------------------------------------------
# records
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationRecord:
    X: float
    q: int
    kernel_id: str
    value: complex
    trivial_bound: float
    ratio: float

    def __post_init__(self) -> None:
        if not -1e-9 <= self.ratio <= 1.0 + 1e-9:
            raise ValueError(f"ratio {self.ratio} outside [0, 1]")


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]  # (log X, log |S|)


# --------------------------------------------------------------------------
# experiment sums
# --------------------------------------------------------------------------

def correlation_sum(coeffs: CoefficientSeries, kernel: TraceTable, x_scale: float,
                    v: WeightV) -> CorrelationRecord:
    """sum_n lambda(n) K(n mod q) V(n / X) with its trivial bound."""
    if coeffs.n_max < 2 * x_scale:
        raise SeriesTooShort(f"series covers n <= {coeffs.n_max}, need 2X = {2 * x_scale:g}")
    q = kernel.modulus
    n = np.arange(max(1, int(x_scale)), int(2 * x_scale) + 1)
    weights = v(n / x_scale)
    lam = coeffs.values[n]
    kvals = kernel.values[n % q]
    terms = lam * kvals * weights
    value = complex(terms.sum())
    trivial = float(np.abs(lam * weights * np.abs(kvals)).sum())
    ratio = abs(value) / trivial if trivial > 0 else 0.0
    return CorrelationRecord(float(x_scale), q, kernel.label, value, trivial, min(ratio, 1.0 + 1e-9))


def residue_sums(coeffs: CoefficientSeries, q: int, x_scale: float,
                 v: WeightV) -> np.ndarray:
    """T[b] = sum_{n = b mod q} lambda(n) V(n/X) in one pass."""
    if coeffs.n_max < 2 * x_scale:
        raise SeriesTooShort(f"series covers n <= {coeffs.n_max}, need 2X = {2 * x_scale:g}")
    n = np.arange(max(1, int(x_scale)), int(2 * x_scale) + 1)
    weights = coeffs.values[n] * v(n / x_scale)
    return np.bincount(n % q, weights=weights, minlength=q)


def ap_discrepancy(coeffs: CoefficientSeries, q: int, a: int, x_scale: float,
                   v: WeightV) -> float:
    """sum_{n = a mod q} lambda V(n/X) - (1/phi(q)) sum_{(n,q)=1} lambda V(n/X)."""
    if gcd(a, q) != 1:
        raise ResidueNotCoprime(f"gcd({a}, {q}) = {gcd(a, q)} != 1")
    t = residue_sums(coeffs, q, x_scale, v)
    coprime = np.array([b for b in range(q) if gcd(b, q) == 1])
    return float(t[a % q] - t[coprime].sum() / euler_phi(q))


def ap_discrepancy_all(coeffs: CoefficientSeries, q: int, x_scale: float,
                       v: WeightV) -> dict[int, float]:
    """Discrepancies for every residue coprime to q, sharing one residue pass."""
    t = residue_sums(coeffs, q, x_scale, v)
    coprime = [b for b in range(q) if gcd(b, q) == 1]
    mean = sum(t[b] for b in coprime) / euler_phi(q)
    return {b: float(t[b] - mean) for b in coprime}


STANDARD_V = WeightV(2.0)


@lru_cache(maxsize=64)
def _kl4_table(q: int) -> np.ndarray:
    return np.array([hyper_kloosterman_composite(4, t, q) for t in range(q)])


def bilinear_preset(l_scale: float, m_scale: float, q: int, a: int,
                    coeffs: CoefficientSeries) -> complex:
    """sum_{l, m} lambda(m) Kl4(a l m; q) V1(l/L) V2(m/M) over the dyadic box.

    V1 = V2 = STANDARD_V.  q must be squarefree for the Kl4 assembly.
    """
    if not is_squarefree(q):
        raise NotSquarefree(f"{q} is not squarefree")
    if coeffs.n_max < 2 * m_scale:
        raise SeriesTooShort(f"series covers n <= {coeffs.n_max}, need 2M = {2 * m_scale:g}")
    kl4 = _kl4_table(q)
    ls = np.arange(max(1, int(l_scale)), int(2 * l_scale) + 1)
    ms = np.arange(max(1, int(m_scale)), int(2 * m_scale) + 1)
    w1 = STANDARD_V(ls / l_scale)
    w2 = STANDARD_V(ms / m_scale) * coeffs.values[ms]
    idx = (a * np.outer(ls, ms)) % q
    return complex(np.sum(w1[:, None] * w2[None, :] * kl4[idx]))


def exponent_fit(records: list[CorrelationRecord]) -> ExponentFit:
    """Least-squares slope of log |S| against log X."""
    if len(records) < 3:
        raise DegenerateFit("need at least 3 records")
    xs = np.array([log(r.X) for r in records])
    ys = np.array([log(abs(r.value)) for r in records])
    if np.ptp(xs) == 0.0:
        raise DegenerateFit("all X values equal")
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    total = ys - ys.mean()
    ss_tot = float(total @ total)
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    points = tuple((float(a), float(b)) for a, b in zip(xs, ys))
    return ExponentFit(float(slope), float(intercept), max(0.0, min(1.0, r2)), points)


# --------------------------------------------------------------------------
# CSV emission
# --------------------------------------------------------------------------

CSV_HEADER = "experiment,kernel_id,q,q0,X,Z,re,im,abs,trivial_bound,ratio"


def records_to_csv_lines(experiment: str, records: list[CorrelationRecord],
                         q0: int, z_param: float) -> list[str]:
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{experiment},{r.kernel_id},{r.q},{q0},{r.X:.18g},{z_param:.18g},"
            f"{r.value.real:.18g},{r.value.imag:.18g},{abs(r.value):.18g},"
            f"{r.trivial_bound:.18g},{r.ratio:.18g}"
        )
    return lines


def run_manifest(command: str, seed: int, grid: dict, version: str) -> str:
    """Deterministic JSON manifest describing one experiment run."""
    return json.dumps(
        {"command": command, "seed": seed, "grid": grid, "version": version},
        sort_keys=True, separators=(",", ":"),
    )
