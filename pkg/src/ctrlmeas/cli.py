"""Command-line front end.

Subcommands:

    exact        closed-form statistics: P(1), fidelity, dephasing, the
                 process weights, the joint table, and the complex table
    sample       seeded finite-statistics experiment; histograms + empirical
                 tables
    reconstruct  complex-table and state reconstruction (two-phase,
                 fourier-scan, or exact reference method)
    snr          reconstruction error versus measurement strength

Every command reads one JSON config (see :mod:`ctrlmeas.config`), writes
delimited data into the output directory, and renders matplotlib figures
alongside unless --no-plot is given.  Numbers are written in full double
precision.  Exit codes: 0 success, 1 config/validation error, 2 runtime or
reconstruction error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, build_pair, build_state, load_config
from .errors import (
    ConfigError,
    CtrlMeasError,
    PhaseSingularity,
    PhasesNotIndependent,
    ValidationError,
)
from .measurement import (
    ControlSetting,
    dephasing_factor,
    measurement_fidelity,
    success_probability,
)
from .reconstruction import build_report, fourier_extract, reconstruct_two_phase, snr_summary
from .sampler import (
    ExperimentPlan,
    empirical_joint,
    histograms_to_csv,
    load_histograms_json,
    run_experiment,
    save_histograms_json,
)
from .sequential import (
    complex_correlation,
    complex_joint_probability,
    commutator_expectation,
    decompose,
    exact_joint_probability,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctrlmeas",
        description="Simulate and reconstruct control-qubit driven sequential measurements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="path to the JSON experiment config")
        p.add_argument("--out", default=None, help="output directory (default: config 'output' or '.')")
        p.add_argument("--format", choices=("csv", "json"), default=None, help="override config format")
        p.add_argument("--seed", type=int, default=None, help="override config seed (u64)")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    p_exact = sub.add_parser("exact", help="closed-form statistics for every (theta, phi)")
    common(p_exact)
    p_exact.set_defaults(func=cmd_exact)

    p_sample = sub.add_parser("sample", help="run the seeded finite-statistics experiment")
    common(p_sample)
    p_sample.set_defaults(func=cmd_sample)

    p_rec = sub.add_parser("reconstruct", help="reconstruct the complex table and the state")
    common(p_rec)
    p_rec.add_argument(
        "--method",
        choices=("two-phase", "fourier-scan", "exact"),
        default="two-phase",
        help="reconstruction method (default: two-phase)",
    )
    p_rec.add_argument(
        "--histograms",
        default=None,
        help="reconstruct from a histograms.json written by 'sample' instead of regenerating data",
    )
    p_rec.set_defaults(func=cmd_reconstruct)

    p_snr = sub.add_parser("snr", help="reconstruction error vs strength at fixed post-selected events")
    common(p_snr)
    p_snr.add_argument(
        "--seeds",
        type=int,
        default=None,
        help="Monte Carlo repetitions per strength (default: config 'seeds')",
    )
    p_snr.set_defaults(func=cmd_snr)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.format is not None:
            cfg = dataclasses.replace(cfg, format=args.format)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        outdir = Path(args.out or cfg.output or ".")
        outdir.mkdir(parents=True, exist_ok=True)
        args.func(cfg, args, outdir)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CtrlMeasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    raise SystemExit(main())


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _settings(cfg: ExperimentConfig) -> list[ControlSetting]:
    return [ControlSetting(cfg.dimension, t, p) for t in cfg.theta for p in cfg.phi]


def _single_theta(cfg: ExperimentConfig) -> float:
    if len(cfg.theta) != 1:
        raise ConfigError("theta: this command needs exactly one strength value")
    return cfg.theta[0]


# ---------------------------------------------------------------- exact


def cmd_exact(cfg: ExperimentConfig, args, outdir: Path) -> None:
    state = build_state(cfg)
    pair = build_pair(cfg)
    dist = complex_joint_probability(state, pair)
    rows = []
    for setting in _settings(cfg):
        table = exact_joint_probability(state, pair, setting)
        try:
            triple = decompose(setting)
        except PhaseSingularity:
            triple = None
        rows.append((setting, table, triple))
        _say(
            args,
            f"theta={setting.theta:.6g} phi={setting.phi:.6g}: "
            f"P(1)={success_probability(setting):.10f} "
            f"F={measurement_fidelity(setting):.10f} "
            f"eta={dephasing_factor(setting):.10f}",
        )

    if cfg.format == "json":
        doc = {
            "dimension": cfg.dimension,
            "complex_joint": {
                "re": np.real(dist.values).tolist(),
                "im": np.imag(dist.values).tolist(),
            },
            "complex_correlation": {
                "re": complex_correlation(dist).real,
                "im": complex_correlation(dist).imag,
            },
            "commutator_expectation": commutator_expectation(dist),
            "settings": [
                {
                    "theta": s.theta,
                    "phi": s.phi,
                    "p1": success_probability(s),
                    "fidelity": measurement_fidelity(s),
                    "dephasing": dephasing_factor(s),
                    "quasi_probabilities": None
                    if triple is None
                    else {
                        "identity": triple.p_identity,
                        "measurement": triple.p_measurement,
                        "coherence": triple.p_coherence,
                    },
                    "joint": table.probs.tolist(),
                }
                for s, table, triple in rows
            ],
        }
        with open(outdir / "exact.json", "w") as fh:
            json.dump(doc, fh, indent=2)
    else:
        _write_csv(
            outdir / "exact_summary.csv",
            ["theta", "phi", "p1", "fidelity", "dephasing", "p_identity", "p_measurement", "p_coherence"],
            [
                [
                    repr(s.theta),
                    repr(s.phi),
                    repr(success_probability(s)),
                    repr(measurement_fidelity(s)),
                    repr(dephasing_factor(s)),
                    "" if triple is None else repr(triple.p_identity),
                    "" if triple is None else repr(triple.p_measurement),
                    "" if triple is None else repr(triple.p_coherence),
                ]
                for s, _, triple in rows
            ],
        )
        _write_csv(
            outdir / "exact_joint.csv",
            ["theta", "phi", "a", "b", "prob"],
            [
                [repr(s.theta), repr(s.phi), a, b, repr(float(table.probs[a, b]))]
                for s, table, _ in rows
                for a in range(cfg.dimension)
                for b in range(cfg.dimension)
            ],
        )
        _write_csv(
            outdir / "exact_complex_joint.csv",
            ["a", "b", "re", "im"],
            [
                [a, b, repr(float(dist.values[a, b].real)), repr(float(dist.values[a, b].imag))]
                for a in range(cfg.dimension)
                for b in range(cfg.dimension)
            ],
        )

    if not args.no_plot:
        from . import plots

        plots.save_joint_tables(
            [(f"theta={s.theta:.3g}, phi={s.phi:.3g}", t.probs) for s, t, _ in rows],
            outdir / "exact_joint.png",
        )
        plots.save_complex_table(dist.values, outdir / "exact_complex_joint.png")


# ---------------------------------------------------------------- sample


def cmd_sample(cfg: ExperimentConfig, args, outdir: Path) -> None:
    if cfg.shots is None:
        raise ConfigError(
            "shots: field is required for sampling; use the 'exact' command for closed-form statistics"
        )
    state = build_state(cfg)
    pair = build_pair(cfg)
    plan = ExperimentPlan(state, pair, tuple(_settings(cfg)), cfg.shots, cfg.seed)
    histograms = run_experiment(plan)
    histograms_to_csv(histograms, outdir / "histograms.csv")
    save_histograms_json(histograms, outdir / "histograms.json")

    joints = [(k, h, empirical_joint(h)) for k, h in enumerate(histograms)]
    if cfg.format == "json":
        doc = {
            "shots_per_setting": cfg.shots,
            "seed": cfg.seed,
            "settings": [
                {
                    "setting_index": k,
                    "theta": h.setting.theta,
                    "phi": h.setting.phi,
                    "success_fraction": h.success_fraction(),
                    "empirical_joint": t.probs.tolist(),
                }
                for k, h, t in joints
            ],
        }
        with open(outdir / "empirical.json", "w") as fh:
            json.dump(doc, fh, indent=2)
    else:
        _write_csv(
            outdir / "empirical_joint.csv",
            ["setting_index", "theta", "phi", "a", "b", "prob"],
            [
                [k, repr(h.setting.theta), repr(h.setting.phi), a, b, repr(float(t.probs[a, b]))]
                for k, h, t in joints
                for a in range(cfg.dimension)
                for b in range(cfg.dimension)
            ],
        )
        _write_csv(
            outdir / "sample_summary.csv",
            ["setting_index", "theta", "phi", "success_fraction"],
            [[k, repr(h.setting.theta), repr(h.setting.phi), repr(h.success_fraction())] for k, h, _ in joints],
        )
    _say(args, f"sampled {cfg.shots} shots for each of {len(histograms)} settings")

    if not args.no_plot:
        from . import plots

        plots.save_histogram_counts(histograms, outdir / "histograms.png")


# ---------------------------------------------------------------- reconstruct


def _distinct_phase_pair(tables):
    """First two joint tables whose control phases have distinct tangents."""
    if tables:
        first = tables[0]
        for other in tables[1:]:
            if abs(math.tan(other.setting.phi) - math.tan(first.setting.phi)) >= 1e-9:
                return first, other
    raise PhasesNotIndependent("two-phase reconstruction needs tables at two phases with distinct tangents")


def cmd_reconstruct(cfg: ExperimentConfig, args, outdir: Path) -> None:
    state = build_state(cfg)
    pair = build_pair(cfg)

    if args.method == "exact":
        dist = complex_joint_probability(state, pair)
    elif args.method == "two-phase":
        if args.histograms:
            tables = [empirical_joint(h) for h in load_histograms_json(args.histograms)]
        elif cfg.shots is not None:
            plan = ExperimentPlan(state, pair, tuple(_settings(cfg)), cfg.shots, cfg.seed)
            tables = [empirical_joint(h) for h in run_experiment(plan)]
        else:
            tables = [exact_joint_probability(state, pair, s) for s in _settings(cfg)]
        table0, table1 = _distinct_phase_pair(tables)
        dist = reconstruct_two_phase(table0, table1, pair)
    else:  # fourier-scan
        theta = _single_theta(cfg)
        if args.histograms:
            raws = [
                (h.setting.phi, h.success_counts / h.total_shots)
                for h in load_histograms_json(args.histograms)
            ]
        elif cfg.shots is not None:
            plan = ExperimentPlan(state, pair, tuple(_settings(cfg)), cfg.shots, cfg.seed)
            raws = [
                (h.setting.phi, h.success_counts / h.total_shots) for h in run_experiment(plan)
            ]
        else:
            raws = []
            for setting in _settings(cfg):
                table = exact_joint_probability(state, pair, setting)
                raws.append((setting.phi, table.probs * table.p1))
        dist = fourier_extract(raws, theta, pair)

    report = build_report(dist, args.method, true_state=state)
    with open(outdir / "report.json", "w") as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
    _say(
        args,
        f"method={args.method}: trace distance to configured state = "
        f"{report.trace_distance_to_truth:.3e}"
        + (f", projection distance = {report.projection_distance:.3e}" if report.projection_distance else ""),
    )

    if not args.no_plot:
        from . import plots

        plots.save_complex_table(report.complex_joint.values, outdir / "reconstruction_complex.png")
        plots.save_state_comparison(
            report.reconstructed_state.matrix, outdir / "reconstruction_state.png", truth=state.matrix
        )


# ---------------------------------------------------------------- snr


def cmd_snr(cfg: ExperimentConfig, args, outdir: Path) -> None:
    if len(cfg.theta) < 2:
        raise ConfigError("theta: the snr command needs at least two strength values to compare")
    if cfg.shots is None:
        raise ConfigError("shots: the snr command needs finite statistics (post-selected events per phase)")
    n_seeds = args.seeds if args.seeds is not None else cfg.seeds
    if n_seeds < 10:
        raise ConfigError(f"seeds: the snr command needs at least 10 repetitions, got {n_seeds}")
    if len(cfg.phi) < 2:
        raise ConfigError("phi: the snr command needs two phases for the two-phase pipeline")
    state = build_state(cfg)
    pair = build_pair(cfg)
    points = snr_summary(
        state,
        pair,
        cfg.theta,
        events_per_phase=cfg.shots,
        n_seeds=n_seeds,
        seed=cfg.seed,
        phis=tuple(cfg.phi[:2]),
    )
    _write_csv(
        outdir / "snr.csv",
        ["theta", "rms_error", "stderr"],
        [[repr(p.theta), repr(p.rms_error), repr(p.stderr)] for p in points],
    )
    for p in points:
        _say(args, f"theta={p.theta:.6g}: rms={p.rms_error:.6e} +- {p.stderr:.2e}")

    if not args.no_plot:
        from . import plots

        plots.save_snr_curve(points, outdir / "snr.png")


if __name__ == "__main__":
    entry()
