"""Command-line driver: ``dsmooth deblur``, ``dsmooth synth`` and ``dsmooth phantom``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .blur import BlurOperator, make_kernel
from .core import params_for
from .imaging import Image, add_gaussian_noise, load_pgm, phantom, save_pgm
from .l1box import l1box_problem, random_instance
from .oracle import (
    double_decay_violations,
    grid_primal_opt,
    l1box_objective,
    reference_dual_opt,
    reference_single_opt,
    single_decay_violations,
)
from .smoothing import eval_theta_rho_mu_kappa
from .solvers import (
    TRACE_COLUMNS,
    recover_primal,
    solve_double_smoothing,
    solve_single_smoothing,
    stopping_rule_grad_norm,
)

log = logging.getLogger("dsmooth")

OBJECTIVE_FACTOR = 2.0 * (1.0 + 2.0 * math.sqrt(3.0))


class _Outputs:
    """Tracks written files so a failed run can remove them."""

    def __init__(self, out_dir):
        self.dir = Path(out_dir)
        self.created_dir = not self.dir.exists()
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files = []

    def path(self, name):
        p = self.dir / name
        self.files.append(p)
        return p

    def cleanup(self):
        for p in self.files:
            p.unlink(missing_ok=True)
            Path(f"{p}.tmp").unlink(missing_ok=True)
        if self.created_dir:
            try:
                self.dir.rmdir()
            except OSError:
                pass


def write_trace_csv(trace, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for r in trace.rows:
            vals = [str(r.k)] + ["%.17g" % getattr(r, c) for c in TRACE_COLUMNS[1:]]
            fh.write(",".join(vals) + "\n")


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def _int_list(s):
    return [int(t) for t in s.split(",") if t.strip()]


def _crop(s):
    h, _, w = s.lower().partition("x")
    return int(h), int(w or h)


def _run(fn, args):
    out = _Outputs(args.out_dir)
    try:
        fn(args, out)
    except Exception as exc:
        out.cleanup()
        print(f"dsmooth {args.command}: error: {exc}", file=sys.stderr)
        log.debug("failure", exc_info=True)
        return 1
    return 0


def _deblur(args, out):
    img = load_pgm(args.input)
    if args.crop:
        img = img.crop(*args.crop)
    kernel = make_kernel(args.kernel_size, args.sigma)
    A = BlurOperator(kernel, img.height, img.width)
    blurred = Image(img.height, img.width, np.clip(A.apply(img.pixels), 0.0, 0.1))
    b = add_gaussian_noise(blurred, args.noise_std, args.seed)
    problem = l1box_problem(A, b.pixels, args.lam)
    params = params_for(problem, args.epsilon, args.radius, "double")
    stop_rule = stopping_rule_grad_norm(params)
    fired = []
    snaps = set(args.snapshots)

    def callback(state, row):
        if not fired and stop_rule(row):
            fired.append(row.k)
        if row.k in snaps:
            save_pgm(Image(img.height, img.width, state.x_rho), out.path(f"iter_{row.k:04d}.pgm"))

    state, trace, cert = solve_double_smoothing(
        problem, params, args.max_iters, stop_rule if args.stop_at_criterion else None,
        callback=callback)
    x_rho, x_mu, _ = recover_primal(state, problem, params)
    write_trace_csv(trace, out.path("trace.csv"))
    save_pgm(b, out.path("observed.pgm"))
    save_pgm(Image(img.height, img.width, x_rho), out.path("restored.pgm"))
    report = cert.to_dict()
    report.update(
        height=img.height, width=img.width, n=problem.f.dimension,
        D_f=problem.f.domain_radius, D_g=problem.g.domain_radius,
        rho=params.rho, mu=params.mu, kappa=params.kappa, L=params.L, R=params.R,
        lam=args.lam, momentum=params.momentum, threshold=stop_rule.threshold,
        criterion_met_at=fired[0] if fired else None,
        kernel_size=args.kernel_size, sigma=args.sigma, noise_std=args.noise_std, seed=args.seed,
        backend=_kernels.BACKEND,
    )
    _write_json(report, out.path("certificate.json"))
    log.info("done: %d iterations, gap %.3e, F %.6g", state.k, cert.feasibility_gap, trace.rows[-1].F_k)


def _synth(args, out):
    problem, _ = random_instance(args.n, args.m, args.seed, args.lam, args.box_hi)
    report = dict(n=args.n, m=args.m, seed=args.seed, epsilon=args.epsilon, R=args.radius,
                  scheme=args.scheme, lam=args.lam, box_hi=args.box_hi)
    if args.scheme == "double":
        params = params_for(problem, args.epsilon, args.radius, "double")
        stop = stopping_rule_grad_norm(params)
        _, trace, cert = solve_double_smoothing(problem, params, args.max_iters, stop)
        _, theta_ref = reference_dual_opt(problem, params)
        obj_v, grad_v = double_decay_violations(trace, params, theta_ref)
        report.update(certificate=cert.to_dict(), theta_ref=theta_ref,
                      decay_objective_violations=obj_v, decay_gradient_violations=grad_v,
                      feasibility_ok=bool(cert.feasibility_gap <= stop.threshold))
        if args.n <= 3:
            _, vP = grid_primal_opt(problem, args.box_hi / 500.0, objective=l1box_objective(
                problem.A.matrix, problem.g.b, args.lam, args.box_hi))
            report.update(grid_vP=vP, objective_error=abs(cert.primal_value - vP),
                          objective_bound=OBJECTIVE_FACTOR * args.epsilon,
                          objective_ok=bool(abs(cert.primal_value - vP) <= OBJECTIVE_FACTOR * args.epsilon
                                            + _grid_slack(problem, args.box_hi / 500.0)))
    else:
        params = params_for(problem, args.epsilon, args.radius, "single")
        first = []
        _, trace = solve_single_smoothing(
            problem, params, args.max_iters,
            callback=lambda s, r: first.append(s.p.copy()) if not first else None)
        p_ref, theta_ref = reference_single_opt(problem, params)
        theta_ref = min(theta_ref, float(trace.column("theta_smoothed").min()))
        report.update(theta_ref=theta_ref,
                      decay_violations=single_decay_violations(trace, params, first[0], p_ref, theta_ref))
    report["rows"] = len(trace)
    write_trace_csv(trace, out.path("trace.csv"))
    _write_json(report, out.path("report.json"))


def _grid_slack(problem, resolution):
    """Upper bound on grid minimum minus true minimum for the l1/box objective."""
    A = problem.A.matrix
    return (problem.f.lam * A.shape[1] + np.abs(A).sum()) * resolution / 2.0


def _phantom(args, out):
    save_pgm(phantom(args.size, args.size), out.path(args.name), maxval=args.maxval)


def build_parser():
    ap = argparse.ArgumentParser(prog="dsmooth", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("deblur", help="l1 deblurring of a PGM image")
    d.add_argument("--input", required=True)
    d.add_argument("--lambda", dest="lam", type=float, default=2e-6)
    d.add_argument("--epsilon", type=float, default=0.01)
    d.add_argument("--radius", type=float, default=0.05)
    d.add_argument("--kernel-size", type=int, default=9)
    d.add_argument("--sigma", type=float, default=4.0)
    d.add_argument("--noise-std", type=float, default=1e-4)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--max-iters", type=int, default=500)
    d.add_argument("--snapshots", type=_int_list, default=[50, 100, 200, 500])
    d.add_argument("--crop", type=_crop, default=None, help="HxW center crop before blurring")
    d.add_argument("--stop-at-criterion", action="store_true",
                   help="stop once ||A x_rho - x_mu|| <= 2 eps / R (default: run all iterations)")
    d.add_argument("--out-dir", required=True)
    d.set_defaults(func=_deblur)

    s = sub.add_parser("synth", help="random tiny instance with oracle cross-checks")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--epsilon", type=float, default=0.01)
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--lambda", dest="lam", type=float, default=0.05)
    s.add_argument("--box-hi", type=float, default=1.0)
    s.add_argument("--scheme", choices=("single", "double"), default="double")
    s.add_argument("--max-iters", type=int, default=5000)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=_synth)

    p = sub.add_parser("phantom", help="write a synthetic test image")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--maxval", type=int, default=255)
    p.add_argument("--name", default="phantom.pgm")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_phantom)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return _run(args.func, args)


if __name__ == "__main__":
    sys.exit(main())
