#!/usr/bin/env python3
"""Sweep the detector overlap and print distinguishability, visibility and the duality margin."""

import argparse

import numpy as np

from ghost_duality.experiment import (
    DEFAULT_GEOMETRY,
    DetectorModel,
    coincidence_pattern,
    detector_branches,
    distinguishability,
    duality_margin,
    measured_visibility,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=11, help="number of overlap values in [0, 1]")
    ap.add_argument("--phase", type=float, default=0.0, help="overlap phase in radians")
    args = ap.parse_args()

    g = DEFAULT_GEOMETRY
    bs = detector_branches(g)
    z2 = np.linspace(-15.0, 15.0, 2048)
    ref = coincidence_pattern(bs, DetectorModel(0.0), 0.0, z2)
    print(f"{'|c|':>6} {'D':>10} {'V':>10} {'D^2+V^2':>12} {'margin':>10}")
    for mag in np.linspace(0.0, 1.0, args.points):
        det = DetectorModel.from_polar(mag, args.phase)
        v = measured_visibility(coincidence_pattern(bs, det, 0.0, z2), 0.0, ref).value
        d = distinguishability(det)
        print(f"{mag:6.3f} {d:10.6f} {v:10.6f} {d * d + v * v:12.9f} {duality_margin(det, v):10.2e}")


if __name__ == "__main__":
    main()
