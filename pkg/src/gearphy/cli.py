"""Command-line interface: experiment orchestration and artifact emission.

Subcommands map to the library's evaluation stages:

  power     component power breakdown over a bandwidth sweep
  curves    spectral-efficiency tables per gear (built or loaded from cache)
  optimize  design-time energy minimization per carrier and rate
  fixed     multi-stage run: fix per-gear front ends, re-optimize, reference
  cell      area-weighted gearbox vs single-gear savings over distance rings
  psd       oscillator and post-tracking phase-noise spectra

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import hwpower, oscillator, sweeps
from .config import ExperimentConfig, load_config
from .errors import ConfigError, GearphyError, NumericalError
from .gears import parse_gear
from .output import standard_meta, write_csv, write_json, write_manifest
from .oscillator import TrackingContext


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gearphy",
        description="Energy-per-bit modeling and optimization for a multi-gear PHY",
    )
    parser.add_argument("--config", default=None, help="YAML config path (defaults apply if omitted)")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--cache", default=None, help="SE curve cache directory (default: <out>/cache)")
    parser.add_argument("--rebuild-cache", action="store_true", help="ignore cached SE curves")
    parser.add_argument("--workers", type=int, default=None, help="worker processes")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument(
        "command",
        choices=["power", "curves", "optimize", "fixed", "cell", "psd"],
    )
    return parser


def _fc_tag(f_c: float) -> str:
    return f"fc{f_c / 1e9:g}GHz"


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    tree = cfg.tree
    if args.seed is not None:
        tree = {**tree, "seed": int(args.seed)}
    if args.workers is not None:
        tree = {**tree, "workers": int(args.workers)}
    return ExperimentConfig(tree=tree)


# --- commands -------------------------------------------------------------------

def cmd_power(cfg: ExperimentConfig, out: Path, cache: Path, rebuild: bool, map_fn) -> None:
    ps = cfg.tree["power_sweep"]
    params = cfg.component_params()
    lo = cfg.lo_params()
    rows = []
    for f_c in cfg.carriers:
        bandwidths = [float(b) for b in ps["bandwidths"]] or list(
            np.geomspace(1e6, cfg.constraints(f_c).b_max, 9)
        )
        p_lo = oscillator.lo_power(ps["sigma_j"], f_c, lo)
        for gear in cfg.gear_list():
            for b in bandwidths:
                tx = hwpower.tx_power(gear, f_c, ps["p_t"], b, p_lo, params)
                rx = hwpower.rx_power(gear, f_c, b, p_lo, params)
                rows.append(
                    {
                        "f_c": f_c,
                        "gear": gear.key,
                        "bandwidth": b,
                        "p_t": ps["p_t"],
                        "sigma_j": ps["sigma_j"],
                        "p_dac": tx.component_w("dac"),
                        "p_pa": tx.component_w("pa"),
                        "p_mixer_tx": tx.component_w("mixer"),
                        "p_lo_tx": tx.component_w("lo"),
                        "p_adc": rx.component_w("adc"),
                        "p_lna": rx.component_w("lna"),
                        "p_pd": rx.component_w("pd"),
                        "p_mixer_rx": rx.component_w("mixer"),
                        "p_lo_rx": rx.component_w("lo"),
                        "p_tx": tx.total_w,
                        "p_rx": rx.total_w,
                    }
                )
    meta = standard_meta("power", cfg.config_hash(), cfg.seed)
    fields = list(rows[0].keys())
    write_csv(out / "power_breakdown.csv", fields, rows, meta)
    write_json(out / "power_breakdown.json", rows, meta)


def cmd_curves(cfg: ExperimentConfig, out: Path, cache: Path, rebuild: bool, map_fn) -> None:
    curves = sweeps.get_curves(cfg, cache, rebuild, map_fn)
    rows = []
    for key in sorted(curves):
        curve = curves[key]
        for i, snr in enumerate(curve.snr_db):
            for j, sig in enumerate(curve.sigma_pn_sq):
                rows.append(
                    {
                        "gear": key,
                        "snr_db": float(snr),
                        "sigma_pn_sq": float(sig),
                        "se": float(curve.values[i, j]),
                        "b99_tnyq": curve.b99_tnyq,
                    }
                )
    meta = standard_meta(
        "curves",
        cfg.config_hash(),
        cfg.seed,
        snr_grid_db=";".join(repr(v) for v in cfg.snr_grid_db()),
        sigma_pn_grid=";".join(repr(v) for v in cfg.sigma_pn_grid()),
    )
    fields = ["gear", "snr_db", "sigma_pn_sq", "se", "b99_tnyq"]
    write_csv(out / "curves.csv", fields, rows, meta)
    write_json(out / "curves.json", rows, meta)


def _rate_meta(cfg: ExperimentConfig, command: str, **extra) -> dict:
    return standard_meta(
        command,
        cfg.config_hash(),
        cfg.seed,
        rate_grid=";".join(repr(v) for v in cfg.rate_grid()),
        **extra,
    )


def cmd_optimize(cfg: ExperimentConfig, out: Path, cache: Path, rebuild: bool, map_fn) -> None:
    curves = sweeps.get_curves(cfg, cache, rebuild, map_fn)
    rates = cfg.rate_grid()
    for f_c in cfg.carriers:
        design = sweeps.design_time_sweep(cfg, f_c, curves, rates, map_fn)
        rows = sweeps.sweep_rows(design, rates)
        frontier = sweeps.frontier_report(design, rates)
        meta = _rate_meta(cfg, "optimize", f_c=f_c, frontier_violations=repr(frontier))
        tag = _fc_tag(f_c)
        write_csv(out / f"optimize_{tag}.csv", sweeps.RESULT_FIELDS, rows, meta)
        write_json(out / f"optimize_{tag}.json", rows, meta)


def cmd_fixed(cfg: ExperimentConfig, out: Path, cache: Path, rebuild: bool, map_fn) -> None:
    curves = sweeps.get_curves(cfg, cache, rebuild, map_fn)
    rates = cfg.rate_grid()
    for f_c in cfg.carriers:
        design, front_ends, constrained, single = sweeps.multi_stage(
            cfg, f_c, curves, rates, map_fn
        )
        rows = sweeps.sweep_rows(constrained, rates)
        for r, res in zip(rates, single):
            row = sweeps.result_row(r, f"single:{cfg.reference_gear}", res)
            rows.append(row)
        meta = _rate_meta(cfg, "fixed", f_c=f_c)
        tag = _fc_tag(f_c)
        write_csv(out / f"fixed_{tag}.csv", sweeps.RESULT_FIELDS, rows, meta)
        write_json(out / f"fixed_{tag}.json", rows, meta)
        fe_rows = [
            {"gear": key, "sigma_j_star": fe.sigma_j, "b_max_star": fe.b_max}
            for key, fe in sorted(front_ends.items())
        ]
        write_json(out / f"front_ends_{tag}.json", fe_rows, meta)


def cmd_cell(cfg: ExperimentConfig, out: Path, cache: Path, rebuild: bool, map_fn) -> None:
    curves = sweeps.get_curves(cfg, cache, rebuild, map_fn)
    rates = cfg.rate_grid()
    scn = cfg.cell_scenario()
    for f_c in cfg.carriers:
        rows = sweeps.cell_rows(cfg, f_c, curves, rates, map_fn)
        meta = _rate_meta(
            cfg,
            "cell",
            f_c=f_c,
            d_min=scn.d_min,
            d_max=scn.d_max,
            delta_d=scn.delta_d,
        )
        fields = [
            "r_eff", "e_area_gearbox", "e_area_single", "savings_ratio",
            "selected_gear_per_ring", "gearbox_covered", "single_covered",
        ]
        tag = _fc_tag(f_c)
        write_csv(out / f"cell_{tag}.csv", fields, rows, meta)
        write_json(out / f"cell_{tag}.json", rows, meta)


def cmd_psd(cfg: ExperimentConfig, out: Path, cache: Path, rebuild: bool, map_fn) -> None:
    p = cfg.tree["psd"]
    lo = cfg.lo_params()
    cons_kappa = cfg.tree["constraints"]["kappa"]
    sigma_j_sq = float(p["sigma_j_sq"])
    bandwidth = float(p["bandwidth"])
    pilot = float(p["pilot_spacing"])
    xi = 10.0 ** (float(p["snr_db"]) / 10.0)
    xi_prime = oscillator.effective_snr(xi, float(p["b_adc"]), cons_kappa)
    gain = xi_prime * bandwidth / pilot
    track_edge = bandwidth / (2.0 * pilot)

    freqs = np.geomspace(1e2, bandwidth / 2.0, int(p["points"]))
    rows_total, rows_err = [], []
    for f in freqs:
        s_theta = oscillator.phase_noise_psd(float(f), sigma_j_sq, lo)
        s_err = s_theta / (gain * s_theta + 1.0) if f < track_edge else s_theta
        rows_total.append({"f_m_hz": float(f), "s_theta_dbc_hz": 10.0 * math.log10(s_theta)})
        rows_err.append({"f_m_hz": float(f), "s_error_dbc_hz": 10.0 * math.log10(s_err)})
    meta = standard_meta(
        "psd",
        cfg.config_hash(),
        cfg.seed,
        sigma_j_sq=sigma_j_sq,
        bandwidth=bandwidth,
        pilot_spacing=pilot,
        b_adc=float(p["b_adc"]),
        snr_db=float(p["snr_db"]),
    )
    write_csv(out / "lo_psd.csv", ["f_m_hz", "s_theta_dbc_hz"], rows_total, meta)
    write_csv(out / "error_psd.csv", ["f_m_hz", "s_error_dbc_hz"], rows_err, meta)
    write_json(out / "lo_psd.json", rows_total, meta)
    write_json(out / "error_psd.json", rows_err, meta)

    # residual variance at the configured operating point, for reference
    var = oscillator.residual_pn_variance(
        TrackingContext(sigma_j_sq, bandwidth, pilot, xi_prime, lo)
    )
    write_json(out / "psd_summary.json", [{"sigma_pn_sq": var}], meta)


COMMANDS = {
    "power": cmd_power,
    "curves": cmd_curves,
    "optimize": cmd_optimize,
    "fixed": cmd_fixed,
    "cell": cmd_cell,
    "psd": cmd_psd,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    cache = Path(args.cache) if args.cache else out / "cache"
    started = time.monotonic()
    try:
        with sweeps.pool_map(cfg.workers) as map_fn:
            COMMANDS[args.command](cfg, out, cache, args.rebuild_cache, map_fn)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}; diagnostics: {exc.diagnostics}", file=sys.stderr)
        return 3
    except GearphyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    write_manifest(out, args.command, cfg.config_hash(), time.monotonic() - started, cfg.workers)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
