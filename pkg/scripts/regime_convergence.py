#!/usr/bin/env python3
"""Error of the large-omega closed form against the exact pattern as omega grows."""

import argparse

import numpy as np

from ghost_duality.experiment import (
    DEFAULT_GEOMETRY,
    DetectorModel,
    approx_pattern,
    coincidence_pattern,
    detector_branches,
)
from ghost_duality.numeric_oracle import compare_patterns


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--overlap", type=float, default=0.5)
    ap.add_argument("--ratios", type=str, default="100,1e3,1e4,1e5,1e6",
                    help="omega / max(epsilon, 1/sigma), comma separated")
    args = ap.parse_args()

    base = DEFAULT_GEOMETRY
    scale = max(base.epsilon, 1.0 / base.sigma)
    det = DetectorModel(args.overlap)
    z2 = np.linspace(-15.0, 15.0, 2048)
    print(f"{'ratio':>10} {'omega':>12} {'max rel err':>12}")
    for ratio in (float(r) for r in args.ratios.split(",")):
        g = base.replace(omega=ratio * scale)
        exact = coincidence_pattern(detector_branches(g), det, 0.0, z2)
        err = compare_patterns(approx_pattern(g, det, z2), exact).max_rel_error
        print(f"{ratio:10.0e} {g.omega:12.4g} {err:12.3e}")


if __name__ == "__main__":
    main()
