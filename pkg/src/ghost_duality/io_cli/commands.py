"""Run modes behind the command-line front end. Each writes files into ``out``."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..experiment import (
    DetectorModel,
    Pattern,
    coincidence_pattern,
    detector_branches,
    distinguishability,
    duality_margin,
    eraser_pattern,
    measured_fringe_spacing,
    measured_visibility,
    slit_packets,
)
from ..errors import DomainError
from ..gaussian_core import evaluate_packet, free_evolve_packet, packet_norm
from ..numeric_oracle import (
    Grid1D,
    compare_patterns,
    momentum_space_propagate,
    oracle_branches,
    pattern_from_oracle,
    sample_packet,
)
from .config import RunConfig, emit_config

SUMMARY_KEYS = (
    "distinguishability",
    "peak_visibility",
    "measured_visibility",
    "duality_margin",
    "fringe_spacing",
    "pass_probability",
)


def _num(x: float) -> str:
    return "%.17g" % x


def pattern_csv(p: Pattern) -> str:
    buf = io.StringIO()
    buf.write("z2,intensity\n")
    for z, i in zip(p.z2, p.intensity):
        buf.write(f"{_num(z)},{_num(i)}\n")
    return buf.getvalue()


def _write(out: str, name: str, text: str) -> str:
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, name)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def _write_json(out: str, name: str, data) -> str:
    return _write(out, name, json.dumps(data, indent=2, sort_keys=False) + "\n")


def summarize(p: Pattern, reference: Pattern, det: DetectorModel, pass_probability: float) -> dict:
    """Summary numbers for one pattern; ``reference`` is the overlap-0 pattern on the same grid.

    Dividing by the reference removes the fringeless envelope before the
    extrema are located, so the measured visibility is the fringe contrast
    alone. ``fringe_spacing`` is ``None`` when fewer than two maxima exist.
    """
    v = measured_visibility(p, around=0.0, reference=reference)
    measured = float(min(max(v.value, 0.0), 1.0))
    try:
        spacing = measured_fringe_spacing(p, 0.0, reference)
    except DomainError:
        spacing = None
    return {
        "distinguishability": distinguishability(det),
        "peak_visibility": abs(det.overlap),
        "measured_visibility": measured,
        "duality_margin": duality_margin(det, measured),
        "fringe_spacing": spacing,
        "pass_probability": pass_probability,
    }


@dataclass
class RunResult:
    files: list[str] = field(default_factory=list)
    summary: dict | None = None
    ok: bool = True
    report: list[dict] = field(default_factory=list)


def _run_meta(cfg: RunConfig, mode: str) -> dict:
    return {"mode": mode, "seed": cfg.seed, "version": __version__, "config": emit_config(cfg)}


def cmd_pattern(cfg: RunConfig) -> RunResult:
    """Coincidence pattern CSV plus summary for the configured detector overlap."""
    geom, det = cfg.geometry(), cfg.detector()
    bs = detector_branches(geom)
    z2 = cfg.z2_grid()
    raw = coincidence_pattern(bs, det, cfg.z1_fixed, z2, "raw", geom)
    ref = coincidence_pattern(bs, DetectorModel(0.0), cfg.z1_fixed, z2, "raw", geom)
    summary = summarize(raw, ref, det, bs.pass_probability)
    res = RunResult(summary=summary)
    res.files.append(_write(cfg.out, "pattern.csv", pattern_csv(raw.normalized(cfg.normalization))))
    res.files.append(_write_json(cfg.out, "summary.json", summary))
    res.files.append(_write_json(cfg.out, "run.json", _run_meta(cfg, "pattern")))
    return res


def cmd_eraser(cfg: RunConfig, bases=("plus", "minus")) -> RunResult:
    """Eraser-projected pattern CSVs; the detector states are taken orthogonal."""
    geom = cfg.geometry()
    det = DetectorModel(0.0)
    bs = detector_branches(geom)
    z2 = cfg.z2_grid()
    ref = coincidence_pattern(bs, det, cfg.z1_fixed, z2, "raw", geom)
    res = RunResult(summary={})
    for basis in bases:
        p = eraser_pattern(bs, basis, cfg.z1_fixed, z2, det, "raw", geom)
        res.files.append(_write(cfg.out, f"eraser_{basis}.csv", pattern_csv(p.normalized(cfg.normalization))))
        s = summarize(p, ref, det, bs.pass_probability)
        # after erasure no path information is left in the projected subensemble
        s["distinguishability"] = 0.0
        s["peak_visibility"] = 1.0
        s["duality_margin"] = duality_margin(DetectorModel(1.0), s["measured_visibility"])
        res.summary[basis] = s
        res.files.append(_write_json(cfg.out, f"summary_{basis}.json", s))
    res.files.append(_write_json(cfg.out, "run.json", _run_meta(cfg, "eraser")))
    return res


def _sweep_point(cfg: RunConfig) -> dict:
    geom, det = cfg.geometry(), cfg.detector()
    bs = detector_branches(geom)
    z2 = cfg.z2_grid()
    raw = coincidence_pattern(bs, det, cfg.z1_fixed, z2, "raw", geom)
    ref = coincidence_pattern(bs, DetectorModel(0.0), cfg.z1_fixed, z2, "raw", geom)
    return summarize(raw, ref, det, bs.pass_probability)


def cmd_sweep(cfg: RunConfig, parameter: str | None = None, values=None) -> RunResult:
    """One summary row per parameter value, ordered by index whatever the completion order."""
    parameter = parameter or cfg.sweep_parameter
    values = tuple(values if values is not None else cfg.sweep_values)
    if parameter is None or not values:
        raise DomainError("sweep needs sweep_parameter and a non-empty sweep_values list")
    if parameter == "overlap_magnitude":
        bad = [v for v in values if not 0.0 <= v <= 1.0]
        if bad:
            raise DomainError(f"overlap_magnitude sweep values must lie in [0, 1], got {bad}")
    configs = [cfg.with_value(parameter, float(v)) for v in values]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        rows = list(pool.map(_sweep_point, configs))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", parameter, *SUMMARY_KEYS])
    for i, (v, row) in enumerate(zip(values, rows)):
        cells = [row[k] for k in SUMMARY_KEYS]
        writer.writerow([i, _num(float(v)), *("" if c is None else _num(float(c)) for c in cells)])
    res = RunResult(summary={"parameter": parameter, "rows": rows})
    res.files.append(_write(cfg.out, "sweep.csv", buf.getvalue()))
    res.files.append(_write_json(cfg.out, "run.json", _run_meta(cfg, "sweep")))
    return res


def _check(report: list, name: str, value: float, limit: float, *, kind: str = "max") -> None:
    ok = value <= limit if kind == "max" else value >= limit
    if not math.isfinite(value):
        ok = False
    report.append({"check": name, "value": value, "limit": limit, "kind": kind, "pass": bool(ok)})


def cmd_validate(cfg: RunConfig) -> RunResult:
    """Oracle comparison suite for the configured geometry and overlap."""
    geom, det = cfg.geometry(), cfg.detector()
    z2 = cfg.z2_grid()
    report: list[dict] = []
    bs = detector_branches(geom)
    ob = oracle_branches(geom, cfg.z1_fixed, z2)

    exact = coincidence_pattern(bs, det, cfg.z1_fixed, z2, "raw", geom)
    numeric = pattern_from_oracle(ob, det, "raw", geom, cfg.z1_fixed)
    _check(report, "pattern_max_rel_error", compare_patterns(numeric, exact).max_rel_error, 1e-6)
    _check(
        report,
        "pass_probability_rel_error",
        abs(ob.pass_probability - bs.pass_probability) / bs.pass_probability,
        1e-9,
    )

    phi = slit_packets(geom)[0]
    spread = abs(phi.width_param + 2j * geom.tau_flight) / geom.epsilon
    half = geom.z0 + 12.0 * spread
    n = 1 << int(np.ceil(np.log2(2.0 * half / (geom.epsilon / 8.0))))
    grid = Grid1D(half, n, center=0.0)
    sampled = sample_packet(phi, grid)
    moved = momentum_space_propagate(sampled, geom.tau_flight)
    closed = free_evolve_packet(phi, geom.tau_flight)
    err = float(np.abs(moved.samples - evaluate_packet(closed, grid.z)).max())
    _check(report, "packet_propagation_max_abs_error", err, 1e-8)
    _check(report, "discrete_norm_drift", abs(moved.norm_sq() - sampled.norm_sq()), 1e-12)
    _check(report, "analytic_norm_drift", abs(packet_norm(closed) - packet_norm(phi)), 1e-12)

    ref = coincidence_pattern(bs, DetectorModel(0.0), cfg.z1_fixed, z2, "raw", geom)
    plus = eraser_pattern(bs, "plus", cfg.z1_fixed, z2, None, "raw", geom)
    minus = eraser_pattern(bs, "minus", cfg.z1_fixed, z2, None, "raw", geom)
    _check(
        report,
        "eraser_sum_rel_error",
        float(np.abs(plus.intensity + minus.intensity - ref.intensity).max() / ref.intensity.max()),
        1e-12,
    )
    summary = summarize(exact, ref, det, bs.pass_probability)
    _check(report, "duality_margin", summary["duality_margin"], -1e-9, kind="min")
    _check(
        report,
        "visibility_excess_over_overlap",
        summary["measured_visibility"] - abs(det.overlap),
        1e-2,
    )

    res = RunResult(summary=summary, ok=all(r["pass"] for r in report), report=report)
    res.files.append(_write_json(cfg.out, "validate.json", {"ok": res.ok, "checks": report}))
    res.files.append(_write_json(cfg.out, "run.json", _run_meta(cfg, "validate")))
    return res
