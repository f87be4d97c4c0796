"""Command-line experiment harness.

Every command emits a canonical JSON report (sorted keys, repr floats) with
full provenance: seeds, descriptors, and the absolute constant in use. With
fixed flags the bytes are identical across runs and worker counts; the one
exception is ``bench``, whose payload is wall-clock measurements.
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from . import __version__, chaining, geometry, harness, rip, sketch, transforms
from .reporting import dumps_report, format_csv, load_points_csv, write_output
from .rng import derive_seed

DEFAULT_TRIALS = {
    "width": 10000,
    "sweep": 50,
    "bench": 20,
    "gamma2": 10000,
    "rip": 100000,
    "mrip": 100000,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed (64-bit)")
    common.add_argument("--trials", type=int, default=None, help="Monte-Carlo trials")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument(
        "--constant-C", dest="constant_c", type=float, default=1.0,
        help="absolute constant used in dimension bounds (echoed in reports)",
    )
    common.add_argument("--eta", type=float, default=0.0, help="confidence parameter")
    common.add_argument("--workers", type=int, default=1, help="thread count (never changes results)")

    family = argparse.ArgumentParser(add_help=False)
    family.add_argument(
        "--family",
        choices=[geometry.FINITE_POINTS, geometry.SPARSE_UNIT, geometry.SUBSPACE_BALL, geometry.L1_BALL],
        default=None,
    )
    family.add_argument("--n", type=int, default=None, help="ambient dimension")
    family.add_argument("--sparsity", type=int, default=None, help="sparse_unit: s")
    family.add_argument("--radius", type=float, default=1.0, help="l1_ball: radius")
    family.add_argument("--subspace-k", type=int, default=None, help="subspace_ball: dimension")
    family.add_argument("--points", default=None, help="finite_points: CSV path, one vector per row")

    ensemble = argparse.ArgumentParser(add_help=False)
    ensemble.add_argument("--ensemble", choices=[sketch.SORS, sketch.GAUSSIAN], default=sketch.SORS)
    ensemble.add_argument("--m", type=int, required=True, help="sketch dimension")
    ensemble.add_argument(
        "--transform",
        choices=[transforms.WALSH_HADAMARD, transforms.IDENTITY_PERMUTED],
        default=transforms.WALSH_HADAMARD,
    )
    rep = ensemble.add_mutually_exclusive_group()
    rep.add_argument("--replacement", dest="replacement", action="store_true", default=True)
    rep.add_argument("--no-replacement", dest="replacement", action="store_false")

    parser = argparse.ArgumentParser(
        prog="sorsketch",
        description="Structured random sketching: build, certify, and stress embeddings.",
    )
    parser.add_argument("--version", action="version", version=f"sorsketch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("width", parents=[common, family], help="Monte-Carlo Gaussian mean width")

    p_rip = sub.add_parser("rip", parents=[common], help="worst-case sparse distortion of a matrix")
    _matrix_source_args(p_rip)
    p_rip.add_argument("--sparsity", type=int, required=True)
    p_rip.add_argument("--delta", type=float, default=None, help="if given, also report pass/fail")
    p_rip.add_argument("--method", choices=[rip.EXACT_ENUMERATION, rip.RANDOMIZED_SUPPORTS],
                       default=rip.EXACT_ENUMERATION)
    p_rip.add_argument("--budget", type=int, default=rip.DEFAULT_BUDGET)

    p_mrip = sub.add_parser("mrip", parents=[common], help="multiresolution distortion ladder check")
    _matrix_source_args(p_mrip)
    p_mrip.add_argument("--sparsity", type=int, required=True)
    p_mrip.add_argument("--delta", type=float, required=True)
    p_mrip.add_argument("--budget", type=int, default=rip.DEFAULT_BUDGET)

    p_bounds = sub.add_parser("bounds", parents=[common], help="embedding-dimension calculators")
    p_bounds.add_argument("kind", choices=["gordon", "sors", "kw", "thm31"])
    p_bounds.add_argument("--omega", type=float, default=None)
    p_bounds.add_argument("--rad", type=float, default=1.0)
    p_bounds.add_argument("--delta", type=float, default=None)
    p_bounds.add_argument("--n", type=float, default=None)
    p_bounds.add_argument("--coherence", type=float, default=1.0)
    p_bounds.add_argument("--set-size", type=int, default=None)
    p_bounds.add_argument("--epsilon", type=float, default=None)

    p_sketch = sub.add_parser("sketch", parents=[common, ensemble], help="sketch CSV vectors")
    p_sketch.add_argument("--in", dest="input", required=True, help="CSV path, one vector per row")

    p_sweep = sub.add_parser("sweep", parents=[common, family], help="distortion vs sketch dimension")
    p_sweep.add_argument("--ensemble", choices=[sketch.SORS, sketch.GAUSSIAN], default=sketch.SORS)
    p_sweep.add_argument("--m-grid", required=True, help="comma-separated increasing sketch dims")
    p_sweep.add_argument("--num-points", type=int, default=harness.DEFAULT_SWEEP_POINTS)

    p_bench = sub.add_parser("bench", parents=[common], help="apply-time scaling table")
    p_bench.add_argument("--n-grid", required=True, help="comma-separated powers of two")
    p_bench.add_argument("--m", type=int, default=256)
    p_bench.add_argument("--m-fraction", type=float, default=None,
                         help="use m = round(n * fraction) instead of fixed m")

    p_gamma2 = sub.add_parser("gamma2", parents=[common, family],
                              help="chaining upper value and width comparison")
    p_gamma2.add_argument("--net-size", type=int, default=1024,
                          help="points drawn when the family is continuous")
    p_gamma2.add_argument("--max-level", type=int, default=4)

    return parser


def _matrix_source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matrix", default=None, help="CSV path of an explicit matrix")
    p.add_argument("--ensemble", choices=[sketch.SORS, sketch.GAUSSIAN], default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--transform", choices=[transforms.WALSH_HADAMARD, transforms.IDENTITY_PERMUTED],
                   default=transforms.WALSH_HADAMARD)
    rep = p.add_mutually_exclusive_group()
    rep.add_argument("--replacement", dest="replacement", action="store_true", default=True)
    rep.add_argument("--no-replacement", dest="replacement", action="store_false")


def _family_from_args(args) -> geometry.SetFamily:
    if args.points is not None:
        return geometry.finite_points(load_points_csv(args.points))
    if args.family is None:
        raise SystemExit("specify --family or --points")
    if args.family == geometry.FINITE_POINTS:
        raise SystemExit("finite_points requires --points")
    if args.n is None:
        raise SystemExit("--n is required for generated families")
    if args.family == geometry.SPARSE_UNIT:
        if args.sparsity is None:
            raise SystemExit("sparse_unit requires --sparsity")
        return geometry.sparse_unit(args.n, args.sparsity)
    if args.family == geometry.SUBSPACE_BALL:
        if args.subspace_k is None:
            raise SystemExit("subspace_ball requires --subspace-k")
        gs = np.random.Generator(np.random.Philox(derive_seed(args.seed, "cli-basis")))
        q, _ = np.linalg.qr(gs.standard_normal((args.n, args.subspace_k)))
        return geometry.subspace_ball(q)
    return geometry.l1_ball(args.n, args.radius)


def _family_params(args) -> dict:
    keys = ["family", "n", "sparsity", "radius", "subspace_k", "points"]
    return {k: getattr(args, k, None) for k in keys if getattr(args, k, None) is not None}


def _matrix_from_args(args) -> tuple[np.ndarray, dict]:
    if args.matrix is not None:
        mat = load_points_csv(args.matrix)
        return mat, {"matrix": args.matrix}
    if args.ensemble is None or args.n is None or args.m is None:
        raise SystemExit("provide --matrix, or --ensemble with --n and --m")
    op = harness.build_ensemble(
        args.ensemble, args.n, args.m, args.seed,
        replacement=args.replacement, transform_kind=args.transform,
    )
    return sketch.materialize_sketch(op), {"operator": sketch.descriptor(op)}


def _envelope(command: str, params: dict, results: dict) -> dict:
    return {
        "tool": "sorsketch",
        "version": __version__,
        "command": command,
        "params": params,
        "results": results,
    }


def _trials(args, command: str) -> int:
    return args.trials if args.trials is not None else DEFAULT_TRIALS.get(command, 10000)


def _emit(args, text: str) -> None:
    write_output(text, args.out)


def cmd_width(args) -> None:
    family = _family_from_args(args)
    trials = _trials(args, "width")
    est = geometry.width_estimate(family, trials=trials, seed=args.seed, workers=args.workers)
    params = {"seed": args.seed, "trials": trials, **_family_params(args)}
    results = {**est.to_dict(), "rad": geometry.max_norm(family)}
    _emit(args, dumps_report(_envelope("width", params, results)))


def cmd_rip(args) -> None:
    mat, source = _matrix_from_args(args)
    if args.method == rip.EXACT_ENUMERATION:
        report = rip.rip_constant_exact(mat, args.sparsity, budget=args.budget)
    else:
        report = rip.rip_constant_randomized(
            mat, args.sparsity, num_supports=_trials(args, "rip"), seed=args.seed
        )
    results = report.to_dict()
    if args.delta is not None:
        results["delta_target"] = args.delta
        results["passed"] = bool(report.delta <= args.delta)
    params = {"seed": args.seed, "sparsity": args.sparsity, "method": args.method, **source}
    _emit(args, dumps_report(_envelope("rip", params, results)))


def cmd_mrip(args) -> None:
    mat, source = _matrix_from_args(args)
    report = rip.mrip_check(mat, args.sparsity, args.delta, budget=args.budget)
    params = {"seed": args.seed, "sparsity": args.sparsity, "delta": args.delta, **source}
    _emit(args, dumps_report(_envelope("mrip", params, report.to_dict())))


def cmd_bounds(args) -> None:
    def need(name):
        value = getattr(args, name)
        if value is None:
            raise SystemExit(f"bounds {args.kind} requires --{name.replace('_', '-')}")
        return value

    if args.kind == "gordon":
        results = {"m_min": geometry.gordon_bound(need("omega"), args.eta, need("delta"))}
    elif args.kind == "sors":
        results = {
            "m_min": geometry.sors_bound(
                need("omega"), args.rad, args.eta, need("delta"), need("n"),
                coherence=args.coherence, constant=args.constant_c,
            )
        }
    elif args.kind == "kw":
        s_req, delta_req = rip.kw_requirements(need("set_size"), need("epsilon"), args.eta)
        results = {"s_required": s_req, "delta_required": delta_req}
    else:
        s, delta_tilde = rip.theorem31_params(
            need("omega"), args.rad, need("delta"), args.eta, constant=args.constant_c
        )
        results = {"s": s, "delta_tilde": delta_tilde}
    params = {
        k: getattr(args, k)
        for k in ["kind", "omega", "rad", "delta", "n", "coherence", "set_size", "epsilon", "eta"]
        if getattr(args, k, None) is not None
    }
    params["constant_C"] = args.constant_c
    _emit(args, dumps_report(_envelope("bounds", params, results)))


def cmd_sketch(args) -> None:
    raw = load_points_csv(args.input)
    n_in = raw.shape[1]
    vectors = raw
    if args.ensemble == sketch.SORS and args.transform == transforms.WALSH_HADAMARD:
        vectors = transforms.pad_to_power_of_two(raw)
    n_eff = vectors.shape[1]
    op = harness.build_ensemble(
        args.ensemble, n_eff, args.m, args.seed,
        replacement=args.replacement, transform_kind=args.transform,
    )
    sketched = sketch.apply_rows(op, vectors)
    params = {
        "seed": args.seed,
        "input_dimension": n_in,
        "effective_dimension": n_eff,
        "operator": sketch.descriptor(op),
    }
    if args.format == "csv":
        _emit(args, format_csv([f"y{j}" for j in range(args.m)], sketched.tolist()))
    else:
        results = {"rows": sketched.tolist(), "coherence": transforms.coherence(op.transform)
                   if op.kind == sketch.SORS else None}
        _emit(args, dumps_report(_envelope("sketch", params, results)))


def cmd_sweep(args) -> None:
    family = _family_from_args(args)
    m_grid = [int(v) for v in args.m_grid.split(",")]
    trials = _trials(args, "sweep")
    reports, slope = harness.distortion_sweep(
        family, args.ensemble, m_grid, trials, args.seed,
        num_points=args.num_points, eta=args.eta, constant=args.constant_c,
        workers=args.workers,
    )
    if args.format == "csv":
        rows = [
            [r.m, r.p50, r.p95, r.p_max, r.predicted_bound] for r in reports
        ]
        _emit(args, format_csv(["m", "p50", "p95", "max", "predicted_bound"], rows))
        return
    params = {
        "seed": args.seed, "trials": trials, "ensemble": args.ensemble,
        "m_grid": m_grid, "num_points": args.num_points,
        "constant_C": args.constant_c, "eta": args.eta, **_family_params(args),
    }
    results = {"reports": [r.to_dict() for r in reports], "fitted_slope": slope}
    _emit(args, dumps_report(_envelope("sweep", params, results)))


def cmd_bench(args) -> None:
    n_grid = [int(v) for v in args.n_grid.split(",")]
    trials = _trials(args, "bench")
    table = harness.bench(n_grid, args.m, trials, seed=args.seed, m_fraction=args.m_fraction)
    if args.format == "csv":
        rows = [[r["ensemble"], r["n"], r["m"], r["median_seconds"]] for r in table["rows"]]
        _emit(args, format_csv(["ensemble", "n", "m", "median_seconds"], rows))
        return
    params = {"seed": args.seed, "trials": trials, "n_grid": n_grid,
              "m": args.m, "m_fraction": args.m_fraction}
    _emit(args, dumps_report(_envelope("bench", params, table)))


def cmd_gamma2(args) -> None:
    if args.points is not None:
        pts = load_points_csv(args.points)
        family = geometry.finite_points(pts)
    else:
        family = _family_from_args(args)
        pts = np.stack(
            [geometry.sample_point(family, args.seed, i) for i in range(args.net_size)]
        )
    hierarchy = chaining.build_covers(pts, max_level=args.max_level)
    trials = _trials(args, "gamma2")
    width = geometry.width_estimate(
        geometry.finite_points(pts), trials=trials, seed=args.seed, workers=args.workers
    )
    summary = hierarchy.to_dict()
    del summary["levels"]  # keep reports small; level detail is in level_summary
    results = {
        **summary,
        "level_summary": [
            {
                "level": lv,
                "capacity": chaining.cover_capacity(lv),
                "num_centers": int(centers.shape[0]),
                "max_distortion": float(hierarchy.distortions[:, lv].max()),
            }
            for lv, centers in enumerate(hierarchy.levels)
        ],
        "omega_hat": width.omega_hat,
        "omega_stderr": width.stderr,
        "gamma2_over_omega": hierarchy.gamma2_upper / width.omega_hat
        if width.omega_hat != 0 else math.inf,
    }
    params = {"seed": args.seed, "trials": trials, "max_level": args.max_level,
              "net_size": args.net_size if args.points is None else None,
              **_family_params(args)}
    _emit(args, dumps_report(_envelope("gamma2", params, results)))


_HANDLERS = {
    "width": cmd_width,
    "rip": cmd_rip,
    "mrip": cmd_mrip,
    "bounds": cmd_bounds,
    "sketch": cmd_sketch,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "gamma2": cmd_gamma2,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _HANDLERS[args.command](args)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
