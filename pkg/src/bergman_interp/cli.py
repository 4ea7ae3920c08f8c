"""Command-line front end.

Every command reads an optional JSON input, writes a JSON report (stdout
unless ``--output`` is given) and exits with

    0  success
    2  invalid input
    3  a sufficient condition for interpolation is violated
    4  an iteration or certification did not converge

Reports are byte-identical across runs with the same input and seed. Each
report carries a ``provenance`` map naming the estimate every field checks;
bookkeeping fields are tagged ``plumbing``.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io as _stdio
import os
import sys

import numpy as np

from . import quadrature
from .exceptions import ConvergenceError, DomainError, HypothesisError, SingularGramError
from .geometry import (
    DomainSpec,
    boundary_distance_bracket,
    mobius,
    sphere_directions,
    volume_comparability,
)
from .integration import SpaceParams, weighted_norm
from .interpolation import (
    InterpolationProblem,
    augment_point,
    contraction_bound,
    oracle_solve,
    solve_neumann,
    solve_separated,
    truncate_to_contracting_tail,
    transport,
    transport_forward,
    transport_inverse,
    vanishing_function,
)
from .io import (
    InputError,
    decode_complex,
    decode_point,
    domain_from_dict,
    dumps,
    encode_point,
    encode_points,
    interpolant_to_dict,
    load_json,
    problem_from_dict,
    problem_to_dict,
    sequence_from_dict,
    space_from_dict,
)
from .kernel import check_transformation_identity, forelli_rudin_slope, reproduce
from .sequences import (
    PointSequence,
    generate_lattice,
    k_row_sums,
    separation_diagnostics,
    separation_margin,
)

EXIT_OK, EXIT_INPUT, EXIT_HYPOTHESIS, EXIT_CONVERGENCE = 0, 2, 3, 4

CSV_COLUMNS = ("delta", "k_sum_incl", "k_sum_excl", "contraction_measured", "iterations",
               "max_node_residual", "norm_f")

PROVENANCE = {
    "lattice": {
        "points": "r-lattice centers (covering by r-balls, disjoint r/3-balls)",
        "report.covering_violations": "r-balls cover the truncated ball",
        "report.disjointness_violations": "r/3-balls are pairwise disjoint",
        "report.multiplicity_bound": "bounded overlap N(z, R) with R = (1 + r)/2",
    },
    "diagnostics": {
        "multiplicity": "sup_z N(z, r) finite iff finite union of separated sequences",
        "k_sums": "K({a_k}, p, q) double sums",
        "kernel_sums": "sup_z sum_k delta(z)^p delta(a_k)^q |K(z, a_k)|^((p+q)/(n+1))",
        "carleson": "atomic measure sum delta(a_k)^q is (q-n-1)-Carleson",
        "separation_margin": "separated sequence: positive minimal Kobayashi distance",
    },
    "solve": {
        "bound": "exclude-diagonal K-sum < 1 (approximate-extension contraction)",
        "trace": "Neumann series residuals for (T E)^-1",
        "node_residuals": "exact interpolation at the nodes",
        "oracle_agreement": "plumbing: cross-check against the direct Gram solve",
        "norm_f": "measured weighted Bergman norm of the interpolant",
        "truncation": "tail of a separated sequence contracts (large-beta interpolation)",
    },
    "verify-estimates": {
        "reproducing": "reproducing property of the Bergman kernel",
        "transformation": "kernel transformation law under automorphisms",
        "forelli_rudin": "growth rate of int |K(z, w)|^p (1 - |w|)^alpha",
        "volume": "nu(B(z, r)) comparable to delta(z)^(n+1)",
        "distance_bracket": "delta comparable across a Kobayashi ball",
    },
    "transport": {
        "inverse_residual": "S T = I for the automorphism transport",
        "node_residual": "transported solution interpolates at phi(a_k)",
        "norm_ratio": "transport preserves the weighted norm up to constants",
    },
    "augment": {
        "node_residual": "adding one node keeps the old values",
        "new_value_residual": "the new node takes its target value",
    },
}


def _threads():
    n = os.environ.get("BERGMAN_THREADS")
    if not n:
        return contextlib.nullcontext()
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return contextlib.nullcontext()
    return threadpool_limits(limits=int(n))


def _rule(args, data: dict | None):
    cfg = (data or {}).get("quadrature")
    if cfg:
        return quadrature.rule_from_config(cfg)
    if args.quad == "qmc":
        return quadrature.QMCRule(seed=args.seed)
    return quadrature.DEFAULT_RULE


def _input(args) -> dict:
    if not args.input:
        return {}
    data = load_json(args.input)
    if not isinstance(data, dict):
        raise InputError("top-level JSON value must be an object")
    return data


def _prob(args, data):
    prob, opts = problem_from_dict(data)
    tol = args.tol if args.tol is not None else float(opts.get("tol", 1e-10))
    max_iter = args.max_iter if args.max_iter is not None else int(opts.get("max_iter", 200))
    if not tol > 0 or max_iter < 1:
        raise InputError("tolerance must be positive and max-iter at least 1")
    return prob, opts, tol, max_iter


# -- commands ---------------------------------------------------------------


def cmd_lattice(args, data):
    domain = domain_from_dict(data.get("domain", {"domain": "disk"})) if data else DomainSpec(1)
    r = args.r if args.r is not None else float(data.get("r", 0.5))
    dmin = args.delta_min if args.delta_min is not None else float(data.get("delta_min", 1e-3))
    try:
        lat = generate_lattice(domain, r, dmin)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise ConvergenceError(str(exc)) from exc
    report = {
        "domain": domain.to_dict(),
        "r": r,
        "R": lat.R,
        "delta_min": dmin,
        "points": encode_points(lat.seq.points),
        "report": lat.report,
        "provenance": PROVENANCE["lattice"],
    }
    return report, None


def cmd_diagnostics(args, data):
    seq = sequence_from_dict(data)
    sp = space_from_dict(data.get("space", {"p": 1, "beta": 0, "n": seq.n}))
    r = args.r if args.r is not None else float(data.get("r", 0.5))
    rep = separation_diagnostics(seq, sp, r)
    out = rep.to_dict()
    out["separation_margin"] = separation_margin(seq)
    out["space"] = sp.to_dict()
    out["provenance"] = PROVENANCE["diagnostics"]
    return out, None


def _solution_rows(prob, f, trace, norm_f):
    sp = prob.space
    if prob.scheme == "p1":
        pq = (prob.m, sp.gamma)
    else:
        pq = (sp.gamma / sp.p, sp.gamma / sp.q)
    incl = k_row_sums(prob.seq, *pq, include_diagonal=True, normalized=True)
    excl = k_row_sums(prob.seq, *pq, include_diagonal=False, normalized=True)
    res = np.abs(f(prob.seq.points) - prob.targets.values)
    rows = []
    for k in range(len(prob.seq)):
        rows.append({
            "delta": float(prob.seq.deltas[k]),
            "k_sum_incl": float(incl[k]),
            "k_sum_excl": float(excl[k]),
            "contraction_measured": trace.measured_contraction if trace else float("nan"),
            "iterations": trace.iterations if trace else 0,
            "max_node_residual": float(res[k]),
            "norm_f": norm_f,
        })
    return rows


def cmd_solve(args, data):
    prob, _, tol, max_iter = _prob(args, data)
    rule = _rule(args, data)
    out = {"problem": problem_to_dict(prob), "method": args.method}
    trace = None
    if args.method == "separated":
        f, info = solve_separated(prob, tol, max_iter)
        trace = info["trace"]
        out["truncation"] = info["truncation"].to_dict()
    elif args.method == "oracle":
        f, rep = oracle_solve(prob, return_report=True)
        out["oracle"] = rep.to_dict()
    else:
        f, trace = solve_neumann(prob, tol, max_iter)
    if trace is not None:
        out["trace"] = trace.to_dict()
        out["bound"] = trace.bound
    res = np.abs(f(prob.seq.points) - prob.targets.values) if len(prob.seq) else np.zeros(0)
    out["node_residuals"] = res.tolist()
    out["max_node_residual"] = float(res.max()) if len(res) else 0.0
    if len(prob.seq) and args.method != "oracle":
        try:
            g = oracle_solve(prob)
            out["oracle_agreement"] = float(np.max(np.abs(f(prob.seq.points) - g(prob.seq.points))))
        except SingularGramError as exc:
            out["oracle_agreement"] = f"unavailable: {exc}"
    norm_f = weighted_norm(f, prob.space, rule) if len(f) else 0.0
    out["norm_f"] = norm_f
    out["solution"] = interpolant_to_dict(f)
    out["provenance"] = PROVENANCE["solve"]
    rows = _solution_rows(prob, f, trace, norm_f)
    if trace is not None and not trace.converged:
        raise _NonConvergence(out, rows, trace.diagnosis)
    return out, rows


def cmd_verify_estimates(args, data):
    rule = _rule(args, data)
    rng = np.random.default_rng(args.seed)
    n = int(data.get("n", 1))
    out = {"seed": args.seed, "n": n, "quadrature": quadrature.rule_to_config(rule)}
    # reproducing property on monomials
    if n == 1:
        pts = np.sqrt(rng.uniform(0, 0.81, 20)) * np.exp(2j * np.pi * rng.uniform(size=20))
        worst = 0.0
        for deg in range(9):
            f = lambda w, d=deg: w[..., 0] ** d
            for z in pts:
                worst = max(worst, abs(reproduce(f, np.array([z]), rule) - z**deg))
        out["reproducing"] = {"max_abs_error": worst, "degrees": 8, "points": 20}
    # transformation law
    trip = []
    for _ in range(3):
        u = rng.normal(size=(200, n)) + 1j * rng.normal(size=(200, n))
        u *= (rng.uniform(0, 0.95, size=(200, 1)) / np.linalg.norm(u, axis=1, keepdims=True))
        trip.append(u)
    out["transformation"] = {
        "max_relative_residual": float(np.max(check_transformation_identity(*trip))),
        "triples": 200,
    }
    if n == 1:
        slopes = []
        for p in (1.5, 2.0, 3.0):
            for alpha in (0.0, 0.5, 1.0):
                try:
                    slopes.append(forelli_rudin_slope(p, alpha, quad=rule).to_dict())
                except DomainError as exc:
                    slopes.append({"p": p, "alpha": alpha, "skipped": str(exc)})
        out["forelli_rudin"] = slopes
    deltas = np.geomspace(1e-3, 0.9, 20)
    out["volume"] = {f"{r:g}": {k: v for k, v in volume_comparability(r, deltas, n).items()
                                if k != "ratios"} for r in (0.3, 0.5, 0.7)}
    out["distance_bracket"] = {f"{r:g}": boundary_distance_bracket(r, deltas, n)
                               for r in (0.3, 0.5, 0.7)}
    out["provenance"] = PROVENANCE["verify-estimates"]
    return out, None


def cmd_transport(args, data):
    prob, opts, tol, max_iter = _prob(args, data)
    rule = _rule(args, data)
    if "a_param" not in opts:
        raise InputError("transport needs an 'a_param' point")
    a = decode_point(opts["a_param"])
    if a.shape[0] != prob.space.n:
        raise InputError("a_param has the wrong dimension")
    tp = transport(prob, a)
    F, trace = solve_neumann(tp.problem, tol, max_iter)
    G = tp.pull_back(F)
    node_res = float(np.max(np.abs(G(tp.moved_nodes.points) - prob.targets.values)))
    rng = np.random.default_rng(args.seed)
    n = prob.space.n
    dirs = sphere_directions(n, 100, seed=args.seed) if n > 1 else np.exp(
        2j * np.pi * rng.uniform(size=(100, 1)))
    zs = dirs * np.sqrt(rng.uniform(0, 0.9, size=(100, 1)))
    st = transport_inverse(transport_forward(F, a, prob.space), a, prob.space)
    inv_res = float(np.max(np.abs(st(zs) - F(zs)) / np.maximum(np.abs(F(zs)), 1e-300)))
    ratio = weighted_norm(transport_forward(F, a, prob.space), prob.space, rule) / weighted_norm(
        F, prob.space, rule)
    out = {
        "a_param": encode_point(a),
        "moved_nodes": encode_points(tp.moved_nodes.points),
        "trace": trace.to_dict(),
        "node_residual": node_res,
        "inverse_residual": inv_res,
        "norm_ratio": ratio,
        "provenance": PROVENANCE["transport"],
    }
    if not trace.converged:
        raise _NonConvergence(out, None, trace.diagnosis)
    return out, None


def cmd_augment(args, data):
    prob, opts, tol, max_iter = _prob(args, data)
    if "b" not in opts or "v0" not in opts:
        raise InputError("augment needs 'b' and 'v0'")
    b = decode_point(opts["b"])
    v0 = decode_complex(opts["v0"])
    g, trace = solve_neumann(prob, tol, max_iter)
    if not trace.converged:
        raise _NonConvergence({"trace": trace.to_dict()}, None, trace.diagnosis)
    vf = vanishing_function(prob, b)
    F = augment_point(g, vf, b, v0, prob.seq, tol=max(tol, 1e-9))
    out = {
        "node_residual": float(np.max(np.abs(F(prob.seq.points) - prob.targets.values))),
        "new_value_residual": abs(complex(F(b)) - v0),
        "solution": interpolant_to_dict(F),
        "trace": trace.to_dict(),
        "provenance": PROVENANCE["augment"],
    }
    return out, None


COMMANDS = {
    "lattice": cmd_lattice,
    "diagnostics": cmd_diagnostics,
    "solve": cmd_solve,
    "verify-estimates": cmd_verify_estimates,
    "transport": cmd_transport,
    "augment": cmd_augment,
}


class _NonConvergence(Exception):
    def __init__(self, report, rows, message):
        super().__init__(message)
        self.report, self.rows = report, rows


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bergman-interp",
        description="Interpolation in weighted Bergman spaces of the disk and ball.",
    )
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", help="JSON input file")
    p.add_argument("--output", help="JSON report path (default: stdout)")
    p.add_argument("--csv", help="per-node CSV table (solve only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--quad", choices=("gauss", "qmc"), default="gauss")
    p.add_argument("--r", type=float, help="lattice or ball radius (pseudo-distance)")
    p.add_argument("--delta-min", type=float, help="smallest boundary distance for lattices")
    p.add_argument("--method", choices=("neumann", "separated", "oracle"), default="neumann",
                   help="solver for the solve command")
    return p


def _write(path, text):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path, rows):
    buf = _stdio.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    _write(path, buf.getvalue())


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    code = EXIT_OK
    rows = None
    try:
        with _threads():
            data = _input(args)
            if args.command in ("diagnostics", "solve", "transport", "augment") and not data:
                raise InputError(f"{args.command} needs --input")
            report, rows = COMMANDS[args.command](args, data)
    except HypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        report = {"error": "hypothesis violated", "inequality": exc.inequality, "detail": str(exc)}
        code = EXIT_HYPOTHESIS
    except _NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        report, rows = dict(exc.report), exc.rows
        report["error"] = str(exc)
        code = EXIT_CONVERGENCE
    except (ConvergenceError, SingularGramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        report = {"error": str(exc)}
        code = EXIT_CONVERGENCE
    except (InputError, ValueError, KeyError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {"command": args.command, "exit_code": code, **report}
    _write(args.output, dumps(report))
    if args.csv and rows is not None:
        _write_csv(args.csv, rows)
    return code


if __name__ == "__main__":
    sys.exit(main())
