#!/usr/bin/env python3
"""Distortion-vs-dimension sweep on the unit sphere, both ensembles.

Reproduces the headline comparison: p95 squared-norm distortion decaying
like m^(-1/2) for the dense Gaussian baseline and for the structured
operator, with their per-m ratio staying within a small constant.

Run: python scripts/reproduce_sweep.py [--n 256] [--trials 40] [--seed 707]
"""

import argparse

from sorsketch import geometry, harness, sketch
from sorsketch.reporting import format_csv


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=256)
    parser.add_argument("--m-grid", default="32,64,128,256")
    parser.add_argument("--trials", type=int, default=40)
    parser.add_argument("--seed", type=int, default=707)
    parser.add_argument("--workers", type=int, default=2)
    args = parser.parse_args()

    family = geometry.sparse_unit(args.n, args.n)  # the full unit sphere
    m_grid = [int(v) for v in args.m_grid.split(",")]
    per_kind = {}
    for kind in (sketch.GAUSSIAN, sketch.SORS):
        reports, slope = harness.distortion_sweep(
            family, kind, m_grid, args.trials, args.seed, workers=args.workers
        )
        per_kind[kind] = reports
        print(f"{kind}: fitted slope {slope:+.3f}")
        print(
            format_csv(
                ["m", "p50", "p95", "max", "predicted_bound"],
                [[r.m, r.p50, r.p95, r.p_max, r.predicted_bound] for r in reports],
            )
        )
    ratios = [
        s.p95 / g.p95 for s, g in zip(per_kind[sketch.SORS], per_kind[sketch.GAUSSIAN])
    ]
    print("per-m p95 ratio structured/gaussian:", [round(r, 3) for r in ratios])


if __name__ == "__main__":
    main()
