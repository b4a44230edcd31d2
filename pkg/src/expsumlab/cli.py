"""Command-line front end: every identity battery and experiment preset as a
subcommand with reproducible configuration.

Exit codes: 0 success, 1 identity failure, 2 configuration error.
Identical configuration (flags + config file + seed) produces byte-identical
CSV output, independent of --jobs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from math import gcd

import numpy as np

from . import __version__, calibration
from .coeffs import sieve_d3, sieve_d4
from .corrlab import (
    PairParams, err3_direct_sum, err3_u_sum, evaluate_sweep_row,
    family_table, ft1_as_pair_correlation, ft1_bruteforce, ft2_bruteforce,
    ft2_case2_bound_check, ft2_closed_form_case1, n_sum_two_forms,
    pair_sweep_tuples, sample_ft2_params, sweep_rows_csv_lines,
)
from .errors import ExpSumError, SpecFormatError
from .experiments import (
    WeightV, ap_discrepancy_all, bilinear_preset, correlation_sum,
    exponent_fit, records_to_csv_lines, run_manifest,
)
from .spectral import dft_normalized
from .trace import (
    CRTProduct, Kummer, RawTable, TraceTable, kloosterman_factorize,
    kloosterman_sum, realize, read_table_csv, spec_from_dict,
    twisted_multiplicativity_check, write_table_csv,
)
from .zmod import is_prime, sieve_primes

OUTDIR_ENV = "EXPSUMLAB_OUTDIR"


def _resolve_out(path: str) -> str:
    base = os.environ.get(OUTDIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _write_lines(path: str, lines: list[str]) -> str:
    path = _resolve_out(path)
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _write_manifest(out_path: str, command: str, seed: int, grid: dict) -> None:
    manifest = run_manifest(command, seed, grid, __version__)
    with open(out_path + ".manifest.json", "w", newline="") as fh:
        fh.write(manifest + "\n")


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecFormatError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise SpecFormatError("config file must hold a JSON object")
    return cfg


def _merge(args: argparse.Namespace, key: str, default):
    """Flag value if given, else config-file value, else default."""
    v = getattr(args, key, None)
    if v is not None:
        return v
    return getattr(args, "_config", {}).get(key, default)


# --------------------------------------------------------------------------
# trace subcommands
# --------------------------------------------------------------------------

def cmd_trace_gen(args) -> int:
    try:
        with open(args.spec) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecFormatError(f"cannot parse spec file {args.spec}: {exc}") from exc
    spec = spec_from_dict(payload)
    table = realize(spec)
    out = _resolve_out(args.out)
    write_table_csv(table, out)
    print(f"wrote {out}: q={table.modulus} supnorm={table.supnorm:.6g} good={table.good}")
    return 0


def cmd_trace_dft(args) -> int:
    table = read_table_csv(args.input)
    out = _resolve_out(args.out)
    write_table_csv(TraceTable(dft_normalized(table), None, "dft"), out)
    print(f"wrote {out}: q={table.modulus}")
    return 0


# --------------------------------------------------------------------------
# identity batteries
# --------------------------------------------------------------------------

def _battery_verdict(name: str, ok: int, total: int, worst: float, tol: float) -> int:
    print(f"{name}: {ok}/{total} within {tol:g} (max error {worst:.3e})")
    return 0 if ok == total else 1


def cmd_check_twisted_mult(args) -> int:
    trials = _merge(args, "trials", 100)
    seed = _merge(args, "seed", 1)
    qmax = _merge(args, "qmax", 10_000)
    tol = _merge(args, "tol", 1e-9)
    rng = np.random.default_rng(seed)
    q0_pool = [p for p in sieve_primes(97) if p >= 2]
    ok, worst = 0, 0.0
    for _ in range(trials):
        q0 = int(rng.choice(q0_pool))
        q1 = int(rng.integers(2, max(3, qmax // q0)))
        while gcd(q0, q1) != 1:
            q1 = int(rng.integers(2, max(3, qmax // q0)))
        k0 = realize(RawTable(q0, tuple(map(complex, rng.normal(size=q0))), "rand0"))
        k1 = realize(RawTable(q1, tuple(map(complex, rng.normal(size=q1))), "rand1"))
        x = int(rng.integers(0, q0 * q1))
        lhs, rhs = twisted_multiplicativity_check(k0, k1, x)
        err = abs(lhs - rhs)
        worst = max(worst, err)
        ok += err <= tol
    return _battery_verdict("twisted-mult", ok, trials, worst, tol)


def cmd_check_kloosterman_factor(args) -> int:
    trials = _merge(args, "trials", 200)
    seed = _merge(args, "seed", 1)
    max_mn = _merge(args, "max_mn", 10_000)
    tol = _merge(args, "tol", 1e-9)
    rng = np.random.default_rng(seed)
    ok, worst = 0, 0.0
    for _ in range(trials):
        while True:
            m = int(rng.integers(1, 200))
            n = int(rng.integers(1, max(2, max_mn // max(m, 1))))
            if gcd(m, n) == 1 and m * n <= max_mn:
                break
        a = int(rng.integers(0, m * n))
        b = int(rng.integers(0, m * n))
        left, right = kloosterman_factorize(a, b, m, n)
        err = abs(left * right - kloosterman_sum(a, b, m * n))
        worst = max(worst, err)
        ok += err <= tol
    return _battery_verdict("kloosterman-factor", ok, trials, worst, tol)


def cmd_check_nsum(args) -> int:
    q0 = _merge(args, "q0", 101)
    trials = _merge(args, "trials", 50)
    seed = _merge(args, "seed", 1)
    tol = _merge(args, "tol", 1e-9)
    family = _merge(args, "family", "quadratic")
    if not is_prime(q0):
        raise SpecFormatError(f"--q0 must be prime, got {q0}")
    rng = np.random.default_rng(seed)
    k0 = family_table(family, q0)
    ok, worst = 0, 0.0
    for _ in range(trials):
        c = int(rng.integers(1, q0))
        m = int(rng.integers(0, 4 * q0))
        q1 = int(rng.integers(1, q0))
        n1 = int(rng.integers(1, q0))
        r = int(rng.integers(1, q0))
        n = int(rng.integers(0, 3 * q0))
        sign = 1 if rng.random() < 0.5 else -1
        f1, f2 = n_sum_two_forms(k0, c, m, q1, n1, r, n, sign)
        err = abs(f1 - f2)
        worst = max(worst, err)
        ok += err <= tol
    return _battery_verdict("nsum", ok, trials, worst, tol)


def cmd_check_err3(args) -> int:
    q0 = _merge(args, "q0", 101)
    trials = _merge(args, "trials", 50)
    seed = _merge(args, "seed", 1)
    tol = _merge(args, "tol", 1e-9)
    family = _merge(args, "family", "kummer")
    if not is_prime(q0):
        raise SpecFormatError(f"--q0 must be prime, got {q0}")
    rng = np.random.default_rng(seed)
    k0 = family_table(family, q0)
    const = realize(RawTable(q0, tuple([1.0 + 0j] * q0), "const"))
    ok, worst = 0, 0.0
    for _ in range(trials):
        c = int(rng.integers(1, q0))
        m = int(rng.integers(0, 4 * q0))
        q1 = int(rng.integers(1, q0))
        paper, _ = err3_u_sum(k0, c, m, q1)
        err = abs(err3_direct_sum(k0, c, m, q1) - paper)
        _, corrected = err3_u_sum(const, c, m, q1)
        err = max(err, abs(err3_direct_sum(const, c, m, q1) - corrected))
        worst = max(worst, err)
        ok += err <= tol
    return _battery_verdict("err3", ok, trials, worst, tol)


def cmd_ft2(args) -> int:
    trials = _merge(args, "trials", 200)
    seed = _merge(args, "seed", 1)
    max_k = _merge(args, "max_k", 400)
    rng = np.random.default_rng(seed)
    q0, q1 = 401, 1
    ok, worst = 0, 0.0
    if args.case == "case1":
        tol = _merge(args, "tol", 1e-6)
        for _ in range(trials):
            p = sample_ft2_params(rng, q0=q0, q1=q1, max_k=max_k, case="case1")
            err = abs(ft2_bruteforce(p) - ft2_closed_form_case1(p))
            worst = max(worst, err)
            ok += err <= tol
        return _battery_verdict("ft2-case1", ok, trials, worst, tol)
    tol = _merge(args, "tol", 1e-9)
    worst_ratio = 0.0
    for _ in range(trials):
        p = sample_ft2_params(rng, q0=q0, q1=q1, max_k=max_k, case="case2")
        value, bound = ft2_case2_bound_check(p)
        ratio = abs(value) / bound if bound > 0 else float("inf")
        worst_ratio = max(worst_ratio, ratio)
        ok += abs(value) <= bound + tol
    print(f"ft2-case2: {ok}/{trials} below bound (max |value|/bound {worst_ratio:.4f})")
    return 0 if ok == trials else 1


def cmd_check_ft1(args) -> int:
    trials = _merge(args, "trials", 100)
    seed = _merge(args, "seed", 1)
    tol = _merge(args, "tol", 1e-9)
    family = _merge(args, "family", "kummer")
    q0 = _merge(args, "q0", 101)
    q1 = _merge(args, "q1", 4)
    if not is_prime(q0):
        raise SpecFormatError(f"--q0 must be prime, got {q0}")
    rng = np.random.default_rng(seed)
    k0 = family_table(family, q0)
    ok, worst = 0, 0.0
    for _ in range(trials):
        p = sample_ft2_params(rng, q0=q0, q1=q1, require_unit_m_mod_q0=True)
        err = abs(ft1_bruteforce(k0, p) - ft1_as_pair_correlation(k0, p))
        worst = max(worst, err)
        ok += err <= tol
    return _battery_verdict("ft1", ok, trials, worst, tol)


# --------------------------------------------------------------------------
# sweeps and experiments
# --------------------------------------------------------------------------

def _sweep_worker(task: tuple[str, int, tuple[int, ...]]):
    family, q, pp = task
    return evaluate_sweep_row(family, q, PairParams(*pp))


def _parallel_map(worker, tasks, jobs: int):
    if jobs <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks, chunksize=max(1, len(tasks) // (4 * jobs) or 1)))


def cmd_paircorr_sweep(args) -> int:
    family = _merge(args, "family", "kummer")
    trials = _merge(args, "trials", calibration.PILOT_TRIALS)
    seed = _merge(args, "seed", calibration.PILOT_SEED)
    jobs = _merge(args, "jobs", 1)
    degenerate = bool(_merge(args, "degenerate", False))
    out = _merge(args, "out", f"paircorr_{family}.csv")
    tuples = pair_sweep_tuples(family, trials, seed, calibration.PILOT_PRIMES,
                               degenerate=degenerate)
    tasks = [(family, q, (pp.q, pp.alpha, pp.beta, pp.alphap, pp.betap, pp.delta))
             for q, pp in tuples]
    rows = _parallel_map(_sweep_worker, tasks, jobs)
    path = _write_lines(out, sweep_rows_csv_lines(rows))
    _write_manifest(path, "paircorr sweep", seed,
                    {"family": family, "trials": trials, "degenerate": degenerate,
                     "primes": list(calibration.PILOT_PRIMES)})
    ratios = np.array([r.ratio_to_sqrtq for r in rows])
    print(f"wrote {path}: {len(rows)} rows, ratio max={ratios.max():.6f} "
          f"median={np.median(ratios):.6f}")
    if not degenerate and family in calibration.RATIO_CEILING:
        ceiling = calibration.RATIO_CEILING[family]
        if ratios.max() > ceiling:
            print(f"FAIL: ratio {ratios.max():.6f} exceeds frozen ceiling {ceiling:.6f}")
            return 1
    return 0


def _corr_ladder_worker(task):
    (q, q0, q1, x_scale, z_param, n_max) = task
    kernel = realize(CRTProduct(Kummer(q0, 1), Kummer(q1, 1)))
    lam = sieve_d3(n_max)
    return correlation_sum(lam, kernel, x_scale, WeightV(z_param))


def cmd_exp_corr(args) -> int:
    q = _merge(args, "q", 1003)
    q0 = _merge(args, "q0", 17)
    steps = _merge(args, "steps", 6)
    z_param = _merge(args, "Z", 2.0)
    jobs = _merge(args, "jobs", 1)
    out = _merge(args, "out", "corr_ladder.csv")
    seed = _merge(args, "seed", 1)
    if q % q0 != 0:
        raise SpecFormatError(f"--q0 {q0} must divide --q {q}")
    q1 = q // q0
    if not (is_prime(q0) and is_prime(q1)):
        raise SpecFormatError("both q0 and q/q0 must be prime for the character ladder")
    xs = [float(q * 2**j) for j in range(steps)]
    n_max = int(2 * xs[-1]) + 1
    tasks = [(q, q0, q1, x, z_param, n_max) for x in xs]
    records = _parallel_map(_corr_ladder_worker, tasks, jobs)
    path = _write_lines(out, records_to_csv_lines("corr_ladder", records, q0, z_param))
    _write_manifest(path, "exp corr", seed,
                    {"q": q, "q0": q0, "steps": steps, "Z": z_param})
    fit = exponent_fit(records)
    print(f"wrote {path}: slope={fit.slope:.6f} r2={fit.r_squared:.6f}")
    return 0


def cmd_exp_ap(args) -> int:
    q = _merge(args, "q", 1001)
    x_scale = float(_merge(args, "X", 1e5))
    z_param = _merge(args, "Z", 2.0)
    out = _merge(args, "out", "ap_discrepancy.csv")
    lam = sieve_d4(int(2 * x_scale) + 1)
    v = WeightV(z_param)
    disc = ap_discrepancy_all(lam, q, x_scale, v)
    scale = float(sum(abs(d) for d in disc.values())) or 1.0
    lines = ["experiment,kernel_id,q,q0,X,Z,re,im,abs,trivial_bound,ratio"]
    for a in sorted(disc):
        d = disc[a]
        lines.append(f"ap,residue:{a},{q},{q},{x_scale:.18g},{z_param:.18g},"
                     f"{d:.18g},0,{abs(d):.18g},{scale:.18g},{abs(d) / scale:.18g}")
    path = _write_lines(out, lines)
    _write_manifest(path, "exp ap", 0, {"q": q, "X": x_scale, "Z": z_param})
    total = sum(disc.values())
    print(f"wrote {path}: {len(disc)} residues, partition sum {total:.3e}")
    return 0


def cmd_exp_bilinear(args) -> int:
    q = _merge(args, "q", 15)
    l_scale = float(_merge(args, "L", 10))
    m_scale = float(_merge(args, "M", 10))
    a = _merge(args, "a", 1)
    lam = sieve_d4(int(2 * m_scale) + 1)
    value = bilinear_preset(l_scale, m_scale, q, a, lam)
    print(f"bilinear q={q} L={l_scale:g} M={m_scale:g} a={a}: "
          f"{value.real:.12g}{value.imag:+.12g}j abs={abs(value):.12g}")
    return 0


def cmd_exp_fit(args) -> int:
    from .experiments import CorrelationRecord
    rows = []
    with open(args.input) as fh:
        header = fh.readline().strip().split(",")
        need = {"X", "abs", "trivial_bound", "ratio", "q", "kernel_id", "re", "im"}
        missing = need - set(header)
        if missing:
            raise SpecFormatError(f"input CSV missing column '{sorted(missing)[0]}'")
        col = {name: i for i, name in enumerate(header)}
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) < len(header):
                continue
            rows.append(CorrelationRecord(
                float(parts[col["X"]]), int(parts[col["q"]]), parts[col["kernel_id"]],
                complex(float(parts[col["re"]]), float(parts[col["im"]])),
                float(parts[col["trivial_bound"]]), float(parts[col["ratio"]])))
    fit = exponent_fit(rows)
    lines = ["slope,intercept,r_squared",
             f"{fit.slope:.18g},{fit.intercept:.18g},{fit.r_squared:.18g}"]
    if args.out:
        path = _write_lines(args.out, lines)
        print(f"wrote {path}")
    print("\n".join(lines))
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_common(sp, *names):
    if "trials" in names:
        sp.add_argument("--trials", type=int, default=None)
    if "seed" in names:
        sp.add_argument("--seed", type=int, default=None)
    if "tol" in names:
        sp.add_argument("--tol", type=float, default=None)
    if "jobs" in names:
        sp.add_argument("--jobs", type=int, default=None)
    sp.add_argument("--config", default=None, help="JSON file with defaults; flags override")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expsumlab",
                                 description="exponential-sum identity batteries and experiments")
    ap.add_argument("--version", action="version", version=f"expsumlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("trace", help="trace-table generation and transforms")
    trs = tr.add_subparsers(dest="subcommand", required=True)
    g = trs.add_parser("gen")
    g.add_argument("--spec", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--config", default=None)
    g.set_defaults(func=cmd_trace_gen)
    d = trs.add_parser("dft")
    d.add_argument("--input", required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--config", default=None)
    d.set_defaults(func=cmd_trace_dft)

    ck = sub.add_parser("check", help="identity batteries")
    cks = ck.add_subparsers(dest="subcommand", required=True)
    tm = cks.add_parser("twisted-mult")
    tm.add_argument("--qmax", type=int, default=None)
    _add_common(tm, "trials", "seed", "tol")
    tm.set_defaults(func=cmd_check_twisted_mult)
    kf = cks.add_parser("kloosterman-factor")
    kf.add_argument("--max-mn", dest="max_mn", type=int, default=None)
    _add_common(kf, "trials", "seed", "tol")
    kf.set_defaults(func=cmd_check_kloosterman_factor)
    ns = cks.add_parser("nsum")
    ns.add_argument("--q0", type=int, default=None)
    ns.add_argument("--family", default=None)
    _add_common(ns, "trials", "seed", "tol")
    ns.set_defaults(func=cmd_check_nsum)
    e3 = cks.add_parser("err3")
    e3.add_argument("--q0", type=int, default=None)
    e3.add_argument("--family", default=None)
    _add_common(e3, "trials", "seed", "tol")
    e3.set_defaults(func=cmd_check_err3)
    f1 = cks.add_parser("ft1")
    f1.add_argument("--q0", type=int, default=None)
    f1.add_argument("--q1", type=int, default=None)
    f1.add_argument("--family", default=None)
    _add_common(f1, "trials", "seed", "tol")
    f1.set_defaults(func=cmd_check_ft1)

    f2 = sub.add_parser("ft2", help="Case-1 closed form / Case-2 bound sweeps")
    f2s = f2.add_subparsers(dest="case", required=True)
    for case in ("case1", "case2"):
        c = f2s.add_parser(case)
        c.add_argument("--max-k", dest="max_k", type=int, default=None)
        _add_common(c, "trials", "seed", "tol")
        c.set_defaults(func=cmd_ft2)

    pc = sub.add_parser("paircorr", help="pair-correlation sweeps")
    pcs = pc.add_subparsers(dest="subcommand", required=True)
    sw = pcs.add_parser("sweep")
    sw.add_argument("--family", default=None)
    sw.add_argument("--degenerate", action="store_const", const=True, default=None)
    sw.add_argument("--out", default=None)
    _add_common(sw, "trials", "seed", "jobs")
    sw.set_defaults(func=cmd_paircorr_sweep)

    ex = sub.add_parser("exp", help="experiment presets")
    exs = ex.add_subparsers(dest="subcommand", required=True)
    co = exs.add_parser("corr")
    co.add_argument("--q", type=int, default=None)
    co.add_argument("--q0", type=int, default=None)
    co.add_argument("--steps", type=int, default=None)
    co.add_argument("--Z", type=float, default=None)
    co.add_argument("--out", default=None)
    _add_common(co, "seed", "jobs")
    co.set_defaults(func=cmd_exp_corr)
    apd = exs.add_parser("ap")
    apd.add_argument("--q", type=int, default=None)
    apd.add_argument("--X", type=float, default=None)
    apd.add_argument("--Z", type=float, default=None)
    apd.add_argument("--out", default=None)
    apd.add_argument("--config", default=None)
    apd.set_defaults(func=cmd_exp_ap)
    bl = exs.add_parser("bilinear")
    bl.add_argument("--q", type=int, default=None)
    bl.add_argument("--L", type=float, default=None)
    bl.add_argument("--M", type=float, default=None)
    bl.add_argument("--a", type=int, default=None)
    bl.add_argument("--config", default=None)
    bl.set_defaults(func=cmd_exp_bilinear)
    ft = exs.add_parser("fit")
    ft.add_argument("--input", required=True)
    ft.add_argument("--out", default=None)
    ft.add_argument("--config", default=None)
    ft.set_defaults(func=cmd_exp_fit)

    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args._config = _load_config(getattr(args, "config", None))
        return args.func(args)
    except SpecFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExpSumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
