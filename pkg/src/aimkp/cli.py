"""``aim`` command-line interface.

Exit status: 0 when every verification passes, 1 when one fails, 2 on
usage, input or file-format errors.  ``--seed`` falls back to the
``AIM_SEED`` environment variable, then to 0.
"""

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import baker, eigenflow, suite
from .errors import AimError, DimensionMismatch, PreconditionError
from .linalg import singular_values
from .serialize import (
    FormatError,
    RunConfig,
    VerificationReport,
    dumps_reports,
    grid_csv,
    read_spectral,
    read_triple,
    trajectory_csv,
    triple_to_dict,
    write_triple,
)
from .tau import (
    h_poly_grid,
    kdv_factorization_check,
    kp_residual,
    soliton_sum_tau,
    tau,
    tau_hat,
    u_field,
)
from .times import TimeVector
from .triples import (
    flow,
    make_rng,
    random_full_rank,
    random_kappa_one,
    random_kdv_triple,
    rational_example,
    soliton_triple,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_times(text, max_index=16):
    """``"1=0.5,2=0.1+0.2j"`` -> TimeVector."""
    if not text:
        return TimeVector(max_index=max_index)
    out = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"bad time entry {item!r}; expected index=value")
        try:
            out[int(key)] = complex(value.strip().replace(" ", ""))
        except ValueError as exc:
            raise UsageError(f"bad time entry {item!r}") from exc
    try:
        return TimeVector(out, max_index=max_index)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def parse_range(text):
    """``"a:b:n"`` -> linspace, or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise UsageError(f"bad range {text!r}; expected a:b:n or a number")


def _seed_default():
    env = os.environ.get("AIM_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"AIM_SEED must be a non-negative integer, got {env!r}") from None


def _emit(cfg, text):
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_value(cfg, payload):
    if cfg.format == "json":
        _emit(cfg, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(payload))
        writer.writerow([repr(v) if isinstance(v, float) else v for v in payload.values()])
        _emit(cfg, buf.getvalue())


def _report(cfg, reports):
    if isinstance(reports, VerificationReport):
        reports = [reports]
    _emit(cfg, dumps_reports(reports, cfg.format))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


# subcommands

def cmd_rank(args, cfg):
    M = read_triple(args.triple)
    sv = [float(x) for x in singular_values(M.defect())]
    kappa = M.recompute_kappa(cfg.tol_rank)
    if cfg.format == "json":
        _emit_value(cfg, {"kappa": kappa, "singular_values": sv})
    else:
        _emit_value(cfg, {"kappa": kappa, "singular_values": " ".join(map(repr, sv))})
    return EXIT_OK


def _cmd_tau(fn):
    def run(args, cfg):
        M = read_triple(args.triple)
        t = parse_times(args.times, cfg.max_time_index)
        v = complex(fn(M, t))
        _emit_value(cfg, {"re": v.real, "im": v.imag})
        return EXIT_OK
    return run


def _hirota_report(M, rng, samples, tol, name="hirota"):
    rep = VerificationReport(name, tolerance=tol)
    rep.details["kappa"] = M.kappa
    for k in range(samples):
        rep.record(f"sample {k}", suite.sample_hirota(M, rng).relative)
    return rep


def cmd_hirota(args, cfg):
    M = read_triple(args.triple)
    return _report(cfg, _hirota_report(M, make_rng(cfg.seed, 1), args.samples, cfg.tol_identity))


def cmd_hpoly(args, cfg):
    M = read_triple(args.triple)
    rng = make_rng(cfg.seed, 2)
    rep = VerificationReport("hpoly_grid", tolerance=cfg.tol_identity)
    rep.details["kappa"] = M.kappa
    g = args.grid
    for k in range(args.repeats):
        xhat = flow(M, suite.random_times(rng)).X if k else M.X
        pts = suite.draw_points(rng, 3 * g)
        value, scale = h_poly_grid(xhat, M.Y, M.Z, pts[:g], pts[g:2 * g], pts[2 * g:])
        rep.record(f"grid {k}", float(np.max(np.abs(value) / scale)))
    return _report(cfg, rep)


def cmd_soliton(args, cfg):
    data = read_spectral(args.spectral)
    M = read_triple(args.triple) if args.triple else soliton_triple(data)
    if M.n != data.n:
        raise DimensionMismatch(f"triple has n={M.n}, spectral data n={data.n}")
    if args.write_triple:
        write_triple(args.write_triple, M)
    rng = make_rng(cfg.seed, 3)
    rep = VerificationReport("soliton_subset_sum", tolerance=cfg.tol_identity)
    for k in range(args.samples):
        t = suite.random_times(rng)
        rep.record(f"time {k}", suite.rel_diff(tau_hat(M, t), soliton_sum_tau(data, t)))
    return _report(cfg, rep)


def cmd_rational(args, cfg):
    if args.triple:
        M = read_triple(args.triple)
        reports = suite.check_rational_triple(M, cfg.seed)
    else:
        lam = complex(args.lam)
        if args.write_triple:
            write_triple(args.write_triple, rational_example(lam))
        reports = suite.check_rational_triple(rational_example(lam), cfg.seed)
    return _report(cfg, reports)


def cmd_kdv(args, cfg):
    M = read_triple(args.triple)
    rng = make_rng(cfg.seed, 7)
    rep = VerificationReport(f"kdv_factorization_N{args.N}_j{args.j}", tolerance=cfg.tol_identity)
    for k in range(args.samples):
        t = TimeVector({1: rng.uniform(-1, 1), args.j: suite.random_times(rng)[1]})
        rep.record(f"sample {k}", kdv_factorization_check(M, args.N, t))
    return _report(cfg, rep)


def cmd_ba(args, cfg):
    data = read_spectral(args.spectral) if args.spectral else None
    if args.triple:
        M = read_triple(args.triple)
    elif data is not None:
        M = soliton_triple(data)
    else:
        raise UsageError("ba needs --triple or --spectral")
    rng = make_rng(cfg.seed, 5)
    xs = rng.uniform(-1, 1, args.samples)
    zs = [suite.draw_points(rng, 1)[0] for _ in xs]
    quot = VerificationReport("ba_tau_quotient", tolerance=cfg.tol_identity)
    poly = VerificationReport("ba_polynomiality", tolerance=1e-8)
    for k, (x, z) in enumerate(zip(xs, zs)):
        quot.record(f"(x,z)=({x:.6f},{z:.6f})", suite.rel_diff(baker.psi(M, x, z).psi, baker.psi_from_tau(M, x, z)))
        poly.record(f"x={x:.6f}", baker.check_polynomiality(M, x))
    reports = [quot, poly]
    if data is not None:
        cond = VerificationReport("ba_soliton_conditions", tolerance=1e-8)
        for x in xs:
            res = baker.soliton_conditions_residual(data, x, args.coefficients, M=M)
            cond.record(f"x={x:.6f}", float(np.max(np.abs(res))))
        reports.append(cond)
    if args.psi_grid:
        _write_psi_grid(args.psi_grid, M, parse_range(args.x), args.z)
    return _report(cfg, reports)


def _write_psi_grid(path, M, xs, z_text):
    zs = [complex(z) for z in z_text.split(",")]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "re_z", "im_z", "re", "im"])
    for x in xs:
        for z in zs:
            v = baker.psi(M, x, z).psi
            writer.writerow([repr(float(x)), repr(z.real), repr(z.imag), repr(v.real), repr(v.imag)])
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def cmd_kp(args, cfg):
    M = soliton_triple(read_spectral(args.spectral)) if args.spectral else read_triple(args.triple)
    rng = make_rng(cfg.seed, 6)
    rep = VerificationReport("kp_residual", tolerance=args.tol)
    rep.details["factor"] = args.factor
    for p in rng.uniform(-args.box, args.box, (args.points, 3)):
        r = kp_residual(M, *p, factor=args.factor, step=args.step, inner=args.inner)
        rep.record(f"(x,y,t)=({p[0]:.6f},{p[1]:.6f},{p[2]:.6f})", r.relative)
    return _report(cfg, rep)


def cmd_u_grid(args, cfg):
    M = soliton_triple(read_spectral(args.spectral)) if args.spectral else read_triple(args.triple)
    x, y, t = np.meshgrid(parse_range(args.x), parse_range(args.y), parse_range(args.t), indexing="ij")
    values = u_field(M, x, y, t, factor=args.factor, method=args.method)
    _emit(cfg, grid_csv(x, y, t, values))
    return EXIT_OK


def cmd_eigenflow(args, cfg):
    M = read_triple(args.triple)
    if args.compare_rs:
        direct, ode, dev = eigenflow.compare_with_rs(M, complex(args.lam), args.t_end, args.step)
        _emit(cfg, trajectory_csv(direct, ode))
        rep = VerificationReport("eigenflow_rs_vs_direct", tolerance=args.tol)
        rep.details["flagged"] = bool(direct.flagged or ode.flagged)
        rep.record("max |dQ|", dev if not ode.truncated else float("inf"))
        sys.stderr.write(dumps_reports(rep, "json"))
        return EXIT_OK if rep.passed else EXIT_FAIL
    n_steps = int(round(args.t_end / args.step))
    traj = eigenflow.track_eigenvalues(M, np.linspace(0.0, args.t_end, n_steps + 1))
    _emit(cfg, trajectory_csv(traj))
    return EXIT_FAIL if traj.flagged else EXIT_OK


def cmd_gen(args, cfg):
    n = args.n
    if n < 1:
        raise UsageError("--n must be >= 1")
    kappa = args.kappa if args.kappa is not None else (n if args.method == "full" else 1)
    method = args.method or ("full" if kappa == n and n > 1 else "soliton")
    rng = make_rng(cfg.seed, 0)
    if method == "full" and kappa == n:
        M = random_full_rank(rng, n)
    elif method in ("soliton", "sylvester") and kappa == 1:
        M = random_kappa_one(rng, n, method)
    elif method == "kdv" and kappa == 1:
        M = random_kdv_triple(rng, n)
    else:
        raise UsageError(f"cannot generate kappa={kappa} with method {method!r} "
                         "(kappa=1: soliton|sylvester|kdv; kappa=n: full)")
    _emit(cfg, json.dumps(triple_to_dict(M), indent=1) + "\n")
    return EXIT_OK


def cmd_suite(args, cfg):
    criteria = None
    if args.criteria:
        try:
            criteria = [int(c) for c in args.criteria.split(",")]
        except ValueError:
            raise UsageError(f"bad criteria list {args.criteria!r}") from None
        unknown = [c for c in criteria if c not in suite.CRITERIA]
        if unknown:
            raise UsageError(f"unknown criteria {unknown}")
    return _report(cfg, suite.run_suite(cfg.seed, criteria))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default: $AIM_SEED or 0)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default=None, help="write output here instead of stdout")
    common.add_argument("--tol-rank", type=float, default=1e-9)
    common.add_argument("--tol", dest="tol_identity", type=float, default=1e-9,
                        help="pass threshold for identity residuals")
    common.add_argument("--max-time-index", type=int, default=16)

    p = argparse.ArgumentParser(prog="aim", description="Tau-functions from almost intertwining matrices.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=fn)
        return sp

    sp = add("rank", cmd_rank, "kappa and singular values of XZ - YX")
    sp.add_argument("--triple", required=True)
    for name, fn in (("tau", tau), ("tau-hat", tau_hat)):
        sp = add(name, _cmd_tau(fn), f"evaluate {name} at one time vector")
        sp.add_argument("--triple", required=True)
        sp.add_argument("--times", default="", help="e.g. 1=0.5,2=0.1+0.2j")
    sp = add("hirota", cmd_hirota, "Miwa-form Hirota residuals")
    sp.add_argument("--triple", required=True)
    sp.add_argument("--samples", type=int, default=100)
    sp = add("hpoly", cmd_hpoly, "H(a,b,c) on random grids")
    sp.add_argument("--triple", required=True)
    sp.add_argument("--grid", type=int, default=4)
    sp.add_argument("--repeats", type=int, default=5)
    sp = add("soliton", cmd_soliton, "soliton triple vs subset-sum oracle")
    sp.add_argument("--spectral", required=True)
    sp.add_argument("--triple", help="check this triple instead of the one built from the data")
    sp.add_argument("--write-triple")
    sp.add_argument("--samples", type=int, default=25)
    sp = add("rational-example", cmd_rational, "rank, Hirota and polynomiality of the rational example")
    sp.add_argument("--lambda", dest="lam", default="2")
    sp.add_argument("--triple", help="check this triple instead")
    sp.add_argument("--write-triple")
    sp = add("kdv-check", cmd_kdv, "t_j factorisation for Y^N = Z^N")
    sp.add_argument("--triple", required=True)
    sp.add_argument("--N", type=int, default=2)
    sp.add_argument("--j", type=int, default=2)
    sp.add_argument("--samples", type=int, default=20)
    sp = add("ba", cmd_ba, "Baker-Akhiezer checks and psi grid")
    sp.add_argument("--triple")
    sp.add_argument("--spectral")
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--coefficients", choices=("derived", "plain"), default="derived")
    sp.add_argument("--psi-grid", help="CSV path for psi on an x-range and z-list")
    sp.add_argument("--x", default="-1:1:5")
    sp.add_argument("--z", default="1.5,2j,-2.5")
    sp = add("kp-residual", cmd_kp, "finite-difference KP residual of u")
    sp.add_argument("--triple")
    sp.add_argument("--spectral")
    sp.add_argument("--points", type=int, default=20)
    sp.add_argument("--box", type=float, default=2.0)
    sp.add_argument("--factor", type=float, default=2.0)
    sp.add_argument("--step", type=float, default=0.02)
    sp.add_argument("--inner", choices=("jacobi", "fd"), default="jacobi")
    sp.set_defaults(tol=1e-4)
    sp.add_argument("--kp-tol", dest="tol", type=float)
    sp = add("u-grid", cmd_u_grid, "u = factor * d_x^2 log tau on a grid (CSV)")
    sp.add_argument("--triple")
    sp.add_argument("--spectral")
    sp.add_argument("--x", default="-2:2:9")
    sp.add_argument("--y", default="0")
    sp.add_argument("--t", default="0")
    sp.add_argument("--factor", type=float, default=2.0)
    sp.add_argument("--method", choices=("fd", "jacobi"), default="fd")
    sp = add("eigenflow", cmd_eigenflow, "eigenvalue trajectories of X_t (CSV)")
    sp.add_argument("--triple", required=True)
    sp.add_argument("--t-end", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--compare-rs", action="store_true")
    sp.add_argument("--lambda", dest="lam", default="-1")
    sp.set_defaults(tol=1e-6)
    sp.add_argument("--rs-tol", dest="tol", type=float)
    sp = add("gen", cmd_gen, "seeded random triple (JSON)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--kappa", type=int)
    sp.add_argument("--method", choices=("soliton", "sylvester", "kdv", "full"), default=None)
    sp = add("suite", cmd_suite, "run the acceptance checks")
    sp.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        seed = args.seed if args.seed is not None else _seed_default()
        try:
            cfg = RunConfig(seed, args.tol_rank, args.tol_identity, args.max_time_index, args.output, args.format)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return args.func(args, cfg)
    except (UsageError, FormatError, PreconditionError, DimensionMismatch, OSError) as exc:
        sys.stderr.write(f"aim: error: {exc}\n")
        return EXIT_USAGE
    except (AimError, ArithmeticError) as exc:
        sys.stderr.write(f"aim: verification aborted: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
