"""Experiment configuration: YAML ingestion, strict validation, defaults.

The document is a nested key/value tree; every key must be known (typos
are rejected with the offending path) and every omitted key falls back
to the built-in defaults, which reproduce the reference parameter set
used throughout the numerical studies.  The configuration hash is taken
over the fully resolved tree, so comments and key order never affect it.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np
import yaml

from .cell import CellScenario
from .errors import ConfigError
from .gears import Gear, parse_gear
from .hwpower import MIXER_TABLE_W, ComponentParams
from .link import LinkParams
from .modem.securve import SimParams
from .optimizer import Constraints, SearchGrids
from .oscillator import LOParams

DEFAULTS: dict = {
    "carriers": [2.4e9, 8e9, 28e9, 60e9],
    "gears": [
        "qam16", "qam64", "qam256", "qam1024",
        "zxm1", "zxm2", "zxm3",
        "ir_unipolar", "ir_varsign",
    ],
    "reference_gear": "qam1024",
    "seed": 2024,
    "workers": 1,
    "link": {
        "distance": 50.0,
        "beta": 2.5,
        "antenna_gain_db": 6.0,
        "temperature": 300.0,
    },
    "components": {
        "v_dd": 1.0,
        "i_0": 1.0e-5,
        "c_p": 1.0e-12,
        "fom_lna": 1.0e-7,
        "g_lna_db": 15.0,
        "n_lna_db": 5.0,
        "p_pd": 2.4e-3,
        "temperature": 300.0,
    },
    "lo": {
        "f_pll": 1.0e6,
        "k_0_dbc": -125.0,
        "q_osc": 10.0,
        "delta": 1.0,
        "f_ref": 54.0e6,
        "s_ref_dbc": -160.0,
        "s_cp_dbc": -160.0,
        "p_ref": 198.0e-6,
        "temperature": 300.0,
    },
    "constraints": {
        "p_max": 10.0,
        "b_max_fraction": 0.1,
        "f_max": 1.0e5,
        "sigma_j_max": 0.5,
        "sigma_j_min": 1.0e-3,
        "eps_tx": 0.01,
        "eps_rx": 0.5,
        "gamma_min": 1.0e-8,
        "b_min": 1.0e4,
        "kappa": 2.0,
    },
    "rates": {
        "min": 1.0e4,
        "max": 1.0e10,
        "points": 40,
    },
    "curve_grids": {
        "snr_db_min": -10.0,
        "snr_db_max": 42.5,
        "snr_db_step": 2.5,
        "sigma_pn_sq": [0.0, 3.0e-4, 1.0e-3, 3.0e-3, 1.0e-2, 3.0e-2, 1.0e-1],
    },
    "sim": {
        "n_symbols": 200_000,
        "n_phase_draws": 200,
        "sps": 8,
        "b99_symbols": 500_000,
        "p_on_grid": [0.1, 0.2, 0.3, 0.4, 0.5],
        "b99_p_on": 0.3,
    },
    "search": {
        "b_ppd": 25,
        "gamma_ppd": 25,
        "sigma_ppd": 10,
        "f_ppd": 10,
        "scan_sweeps": 2,
        "golden_sweeps": 3,
        "golden_iters": 28,
    },
    "cell": {
        "d_min": 20.0,
        "d_max": 400.0,
        "delta_d": 40.0,
    },
    "power_sweep": {
        "p_t": 1.0,
        "sigma_j": 0.1,
        "bandwidths": [],
    },
    "psd": {
        "sigma_j_sq": 0.1,
        "b_adc": 10.0,
        "bandwidth": 4.0e8,
        "pilot_spacing": 10.0,
        "snr_db": 10.0,
        "points": 400,
    },
}


def _coerce(default, value, path: str):
    """Coerce YAML scalars toward the default's type.

    YAML 1.1 reads sign-less exponents such as ``1.0e5`` as strings, so
    numeric fields accept numeric-looking strings.
    """
    if isinstance(default, bool) or isinstance(value, bool):
        return value
    if isinstance(default, (int, float)) and isinstance(value, str):
        try:
            return float(value)
        except ValueError as exc:
            raise ConfigError(f"{path}: expected a number, got {value!r}") from exc
    if isinstance(default, list) and isinstance(value, list):
        out = []
        for item in value:
            if isinstance(item, str):
                try:
                    out.append(float(item))
                    continue
                except ValueError:
                    pass
            out.append(item)
        return out
    return value


def _merge(defaults: dict, user: dict, path: str) -> dict:
    out = copy.deepcopy(defaults)
    for key, value in user.items():
        here = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"unknown configuration key: {here}")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{here}: expected a mapping")
            out[key] = _merge(defaults[key], value, here)
        else:
            out[key] = _coerce(defaults[key], value, here)
    return out


def _require_positive(tree: dict, *paths: str) -> None:
    for path in paths:
        node = tree
        for part in path.split("."):
            node = node[part]
        if not isinstance(node, (int, float)) or node <= 0:
            raise ConfigError(f"{path}: must be a positive number, got {node!r}")


def _db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved configuration tree plus typed accessors."""

    tree: dict

    # --- scalar accessors ------------------------------------------------

    @property
    def seed(self) -> int:
        return int(self.tree["seed"])

    @property
    def workers(self) -> int:
        return int(self.tree["workers"])

    @property
    def carriers(self) -> list[float]:
        return [float(f) for f in self.tree["carriers"]]

    @property
    def reference_gear(self) -> str:
        return str(self.tree["reference_gear"])

    def gear_list(self) -> list[Gear]:
        return [parse_gear(k) for k in self.tree["gears"]]

    # --- typed section constructors ---------------------------------------

    def component_params(self) -> ComponentParams:
        c = self.tree["components"]
        return ComponentParams(
            v_dd=c["v_dd"],
            i_0=c["i_0"],
            c_p=c["c_p"],
            fom_lna=c["fom_lna"],
            g_lna=_db_to_linear(c["g_lna_db"]),
            n_lna=_db_to_linear(c["n_lna_db"]),
            p_pd=c["p_pd"],
            gamma=c["temperature"],
        )

    def lo_params(self) -> LOParams:
        o = self.tree["lo"]
        return LOParams(
            f_pll=o["f_pll"],
            k_0=_db_to_linear(o["k_0_dbc"]),
            q_osc=o["q_osc"],
            delta=o["delta"],
            f_ref=o["f_ref"],
            s_ref=_db_to_linear(o["s_ref_dbc"]),
            s_cp=_db_to_linear(o["s_cp_dbc"]),
            p_ref=o["p_ref"],
            gamma=o["temperature"],
        )

    def link_params(self, f_c: float, distance: float | None = None) -> LinkParams:
        l = self.tree["link"]
        gain = _db_to_linear(l["antenna_gain_db"])
        return LinkParams(
            f_c=f_c,
            distance=l["distance"] if distance is None else distance,
            beta=l["beta"],
            d_tx=gain,
            d_rx=gain,
            gamma=l["temperature"],
        )

    def constraints(self, f_c: float) -> Constraints:
        c = self.tree["constraints"]
        return Constraints(
            p_max=c["p_max"],
            b_max=c["b_max_fraction"] * f_c,
            f_max=c["f_max"],
            sigma_j_max=c["sigma_j_max"],
            sigma_j_min=c["sigma_j_min"],
            eps_tx=c["eps_tx"],
            eps_rx=c["eps_rx"],
            gamma_min=c["gamma_min"],
            b_min=c["b_min"],
            kappa=c["kappa"],
        )

    def sim_params(self) -> SimParams:
        s = self.tree["sim"]
        return SimParams(
            n_symbols=int(s["n_symbols"]),
            n_phase_draws=int(s["n_phase_draws"]),
            sps=int(s["sps"]),
            b99_symbols=int(s["b99_symbols"]),
            p_on_grid=tuple(float(p) for p in s["p_on_grid"]),
            b99_p_on=float(s["b99_p_on"]),
            seed=self.seed,
        )

    def search_grids(self) -> SearchGrids:
        g = self.tree["search"]
        return SearchGrids(
            b_ppd=int(g["b_ppd"]),
            gamma_ppd=int(g["gamma_ppd"]),
            sigma_ppd=int(g["sigma_ppd"]),
            f_ppd=int(g["f_ppd"]),
            scan_sweeps=int(g["scan_sweeps"]),
            golden_sweeps=int(g["golden_sweeps"]),
            golden_iters=int(g["golden_iters"]),
        )

    def cell_scenario(self) -> CellScenario:
        c = self.tree["cell"]
        return CellScenario(d_min=c["d_min"], d_max=c["d_max"], delta_d=c["delta_d"])

    def rate_grid(self) -> list[float]:
        r = self.tree["rates"]
        return list(np.geomspace(r["min"], r["max"], int(r["points"])))

    def snr_grid_db(self) -> list[float]:
        g = self.tree["curve_grids"]
        n = int(round((g["snr_db_max"] - g["snr_db_min"]) / g["snr_db_step"])) + 1
        return [g["snr_db_min"] + i * g["snr_db_step"] for i in range(n)]

    def sigma_pn_grid(self) -> list[float]:
        return [float(s) for s in self.tree["curve_grids"]["sigma_pn_sq"]]

    def config_hash(self) -> str:
        canonical = json.dumps(self.tree, sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def validate(tree: dict) -> None:
    """Cross-field checks with path-qualified error messages."""
    _require_positive(
        tree,
        "constraints.p_max",
        "constraints.b_max_fraction",
        "constraints.f_max",
        "constraints.sigma_j_max",
        "constraints.kappa",
        "link.distance",
        "rates.min",
        "rates.max",
        "rates.points",
        "sim.n_symbols",
        "sim.sps",
        "cell.d_min",
        "cell.d_max",
        "cell.delta_d",
    )
    if tree["rates"]["min"] >= tree["rates"]["max"]:
        raise ConfigError("rates.min must be below rates.max")
    if not tree["gears"]:
        raise ConfigError("gears: need at least one gear")
    for key in tree["gears"]:
        try:
            parse_gear(key)
        except Exception as exc:
            raise ConfigError(f"gears: {exc}") from exc
    try:
        parse_gear(tree["reference_gear"])
    except Exception as exc:
        raise ConfigError(f"reference_gear: {exc}") from exc
    for f_c in tree["carriers"]:
        if not any(math.isclose(f_c, f, rel_tol=1e-9) for f in MIXER_TABLE_W):
            raise ConfigError(
                f"carriers: {f_c:g} Hz has no mixer measurement; "
                f"supported: {sorted(MIXER_TABLE_W)}"
            )
    if not 0.0 < tree["constraints"]["eps_tx"] < tree["constraints"]["eps_rx"] < 1.0:
        raise ConfigError("constraints: need 0 < eps_tx < eps_rx < 1")
    if tree["cell"]["d_min"] >= tree["cell"]["d_max"]:
        raise ConfigError("cell.d_min must be below cell.d_max")
    for p in tree["sim"]["p_on_grid"]:
        if not 0.0 < p <= 0.5:
            raise ConfigError(f"sim.p_on_grid: {p} outside (0, 0.5]")


def load_config(path: str | None) -> ExperimentConfig:
    """Parse and validate a YAML config; ``None`` loads pure defaults."""
    user: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = yaml.safe_load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"config parse error in {path}: {exc}") from exc
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("config root must be a mapping")
        user = loaded
    tree = _merge(DEFAULTS, user, "")
    validate(tree)
    return ExperimentConfig(tree=tree)
