"""Command-line experiment driver.

Subcommands: randomize | simulate | strichartz-tail | lwp-ensemble |
verify-estimates. Each writes CSV artifacts plus a manifest (config echo,
code version, content hashes) into the output directory; reruns with the
same configuration reproduce identical bytes.

Exit codes: 0 success, 2 configuration error, 3 numerical blowup,
4 estimate-probe precondition violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config, parse_float_list
from .grid import Field, make_grid
from .io import (
    diagnostics_rows,
    ensemble_table,
    load_field,
    save_field,
    save_trajectory,
    write_csv,
    write_manifest,
)
from .montecarlo import exceptional_probability, strichartz_scaling
from .norms import AliasingError, sobolev_norm
from .probes import ProbeResolution, estimate_ids, run_estimate
from .solver import evolve_reference
from .spacetime import centered_axis
from .streams import child_seed
from .wiener import randomize, sample_coefficients

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_PRECONDITION = 4


def build_data(cfg: RunConfig) -> Field:
    """The deterministic profile phi described by the [data] section."""
    grid = make_grid(cfg["grid"]["half_length"], cfg["grid"]["n_modes"])
    data = cfg["data"]
    kind = data["kind"]
    if kind == "file":
        phi = load_field(data["path"])
        if phi.grid != grid:
            raise ConfigError(
                [f"[data] field file grid (L={phi.grid.half_length}, N={phi.grid.n_modes}) "
                 f"does not match [grid]"]
            )
    else:
        x = grid.x
        w, a = data["width"], data["amplitude"]
        if kind == "gaussian-bump":
            vals = a * np.exp(-((x / w) ** 2))
        else:  # sech-power
            vals = a * np.cosh(x / w) ** (-2.0 / 7.0)
        phi = Field(grid, vals.astype(np.complex128), "physical")
    band = data["band_limit"]
    if band > 0:
        phi = _band_limit(phi, band)
    return phi


def _band_limit(phi: Field, band: float) -> Field:
    from .grid import apply_multiplier

    mask = (np.abs(phi.grid.xi) <= band).astype(np.float64)
    return apply_multiplier(phi, mask)


def _out_dir(cfg: RunConfig, args) -> Path:
    out = Path(args.out) if args.out else Path(cfg["output"]["directory"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_randomize(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg, args)
    phi = build_data(cfg)
    s = cfg.s
    dist = cfg["random"]["distribution"]
    n_max = cfg["random"]["n_max"]
    if n_max <= 0:
        from .montecarlo import auto_n_max

        n_max = auto_n_max(phi)
    artifacts = [save_field(out / "phi.field", phi, kind="phi")]
    rows = [("phi", -1, sobolev_norm(phi, s))]
    for k in range(cfg["ensemble"]["n_fields"]):
        seed_k = child_seed(cfg.master_seed, k)
        sample = randomize(phi, sample_coefficients(dist, seed_k, n_max))
        artifacts.append(save_field(out / f"sample_{k:03d}.field", sample, kind="sample", seed=seed_k))
        rows.append((f"sample_{k:03d}", seed_k, sobolev_norm(sample, s)))
    artifacts.append(write_csv(out / "norms.csv", ["field", "seed", "hs_norm"], rows))
    write_manifest(out, cfg.echo(), artifacts)
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg, args)
    phi = build_data(cfg)
    sim = cfg["simulate"]
    traj = evolve_reference(
        phi,
        sim["t_end"],
        sim["dt"],
        output_stride=sim["output_stride"] or None,
        diag_stride=sim["diag_stride"],
        seed=cfg.master_seed,
    )
    artifacts = [
        save_trajectory(out / "trajectory.bin", traj),
        write_csv(
            out / "diagnostics.csv",
            ["step", "time", "mean", "mass", "energy"],
            diagnostics_rows(traj.diagnostics),
        ),
    ]
    write_manifest(out, cfg.echo(), artifacts)
    if traj.blown_up:
        print(f"blowup at step {traj.first_bad_step}; trajectory truncated", file=sys.stderr)
        return EXIT_BLOWUP
    return EXIT_OK


def cmd_strichartz_tail(cfg: RunConfig, args) -> int:
    problems = []
    if cfg["ensemble"]["n_samples"] < 1000:
        problems.append("[ensemble] n_samples must be >= 1000 for tail fitting")
    t_grid = parse_float_list(cfg["strichartz"]["t_grid"])
    if len(t_grid) < 3:
        problems.append("[strichartz] t_grid needs at least three T values")
    if problems:
        raise ConfigError(problems)
    out = _out_dir(cfg, args)
    phi = build_data(cfg)
    st = cfg["strichartz"]
    report = strichartz_scaling(
        phi,
        st["q"],
        st["r"],
        t_grid,
        cfg["ensemble"]["n_samples"],
        seed=cfg.master_seed,
        distribution=cfg["random"]["distribution"],
        n_time_samples=st["n_time_samples"],
        n_max=cfg["random"]["n_max"] or None,
        threads=cfg["ensemble"]["threads"],
    )
    header, rows = ensemble_table(report.records)
    artifacts = [
        write_csv(out / "samples.csv", header, rows),
        write_csv(out / "scales.csv", ["T", "scale", "ci_lo", "ci_hi"], report.rows()),
        write_csv(
            out / "exponent.csv",
            ["alpha", "predicted_alpha"],
            [(report.alpha, report.predicted_alpha)],
        ),
    ]
    write_manifest(out, cfg.echo(), artifacts)
    return EXIT_OK


def cmd_lwp_ensemble(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg, args)
    phi = build_data(cfg)
    lwp = cfg["lwp"]
    taxis = centered_axis(cfg["time"]["t_span"], cfg["time"]["m_t"])
    report = exceptional_probability(
        phi,
        parse_float_list(lwp["t_grid"]),
        lwp["n_samples"],
        lwp["tol"],
        taxis=taxis,
        xi_band=lwp["xi_band"],
        eps=cfg.epsilon,
        max_iter=lwp["max_iter"],
        seed=cfg.master_seed,
        distribution=cfg["random"]["distribution"],
        n_max=cfg["random"]["n_max"] or None,
        threads=cfg["ensemble"]["threads"],
    )
    rows = [
        (r.T, r.n, r.failures, r.fraction, r.wilson_lo, r.wilson_hi) for r in report.rows
    ]
    sample_header: list[str] = []
    sample_rows: list[tuple] = []
    for T in sorted(report.records, reverse=True):
        header, part = ensemble_table(report.records[T], extra={"T": T})
        sample_header = header
        sample_rows.extend(part)
    artifacts = [
        write_csv(out / "records.csv", sample_header, sample_rows),
        write_csv(
            out / "failures.csv",
            ["T", "n", "failures", "fraction", "wilson_lo", "wilson_hi"],
            rows,
        ),
        write_csv(
            out / "trend.csv",
            ["trend_violations", "trend_ok"],
            [(report.trend_violations, report.trend_ok)],
        ),
    ]
    write_manifest(out, cfg.echo(), artifacts)
    return EXIT_OK


def cmd_verify_estimates(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg, args)
    est = cfg["estimates"]
    eps = cfg.epsilon
    wanted = est["ids"].strip()
    valid = estimate_ids(eps)
    ids = valid if wanted == "all" else [tok.strip() for tok in wanted.split(",") if tok.strip()]
    unknown = [eid for eid in ids if eid not in valid]
    if unknown:
        raise ConfigError(
            [f"unknown estimate id {eid!r}; valid ids: {', '.join(valid)}" for eid in unknown]
        )
    resolution = ProbeResolution(
        n_modes=est["n_modes"],
        half_length=est["half_length"],
        m_t=est["m_t"],
        t_span=est["t_span"],
        xi_band=est["xi_band"],
    )
    artifacts = []
    summary = []
    for eid in ids:
        report = run_estimate(
            eid, eps=eps, resolution=resolution, n_trials=est["n_trials"], seed=cfg.master_seed
        )
        artifacts.append(
            write_csv(
                out / f"{eid}.csv",
                ["estimate_id", "trial", "lhs", "rhs", "ratio"],
                report.rows(),
            )
        )
        summary.append(
            (eid, len(report.trials), report.excluded, report.max_ratio, report.median_ratio)
        )
    artifacts.append(
        write_csv(
            out / "summary.csv",
            ["estimate_id", "trials", "excluded", "max_ratio", "median_ratio"],
            summary,
        )
    )
    write_manifest(out, cfg.echo(), artifacts)
    return EXIT_OK


COMMANDS = {
    "randomize": cmd_randomize,
    "simulate": cmd_simulate,
    "strichartz-tail": cmd_strichartz_tail,
    "lwp-ensemble": cmd_lwp_ensemble,
    "verify-estimates": cmd_verify_estimates,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gkdvlab",
        description="Randomized-data experiments for the septic generalized KdV equation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="INI configuration file")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--threads", type=int, default=None, help="worker threads (speed only)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    overrides = {}
    if args.seed is not None:
        overrides["random.master_seed"] = args.seed
    if args.threads is not None:
        overrides["ensemble.threads"] = args.threads
    try:
        cfg = load_config(args.config, overrides)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    except AliasingError as exc:
        print(f"estimate-probe precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
