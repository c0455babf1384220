#!/usr/bin/env python3
"""Compare the analytic coincidence pattern with the grid-based oracle and time both."""

import argparse
import time

import numpy as np

from ghost_duality.experiment import (
    DEFAULT_GEOMETRY,
    DetectorModel,
    coincidence_pattern,
    detector_branches,
    exact_fringe_spacing,
)
from ghost_duality.numeric_oracle import compare_patterns, oracle_branches, pattern_from_oracle


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega", type=float, default=DEFAULT_GEOMETRY.omega)
    ap.add_argument("--sigma", type=float, default=DEFAULT_GEOMETRY.sigma)
    ap.add_argument("--points", type=int, default=2048)
    args = ap.parse_args()

    g = DEFAULT_GEOMETRY.replace(omega=args.omega, sigma=args.sigma)
    period = exact_fringe_spacing(g)
    z2 = np.linspace(-4.0 * period, 4.0 * period, args.points)

    t0 = time.perf_counter()
    bs = detector_branches(g)
    t1 = time.perf_counter()
    ob = oracle_branches(g, 0.0, z2)
    t2 = time.perf_counter()
    print(f"analytic branches {1e3 * (t1 - t0):.1f} ms, oracle {1e3 * (t2 - t1):.1f} ms, "
          f"grid spacing {ob.info['spacing']:.4g}")
    print(f"pass probability: analytic {bs.pass_probability:.12g}, oracle {ob.pass_probability:.12g}")
    for c in (0.0, 0.5, 1.0, 0.5j):
        det = DetectorModel(c)
        rep = compare_patterns(pattern_from_oracle(ob, det), coincidence_pattern(bs, det, 0.0, z2))
        print(f"overlap {c!s:>6}: max rel {rep.max_rel_error:.2e}, L2 {rep.l2_error:.2e}")


if __name__ == "__main__":
    main()
