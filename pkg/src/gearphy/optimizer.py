"""Energy-per-bit evaluation and minimization.

One operating point fixes (bandwidth, duty cycle, oscillator quality,
pilot spacing); the transmit power follows implicitly from the SNR the
gear needs to hit the requested effective rate.  Because the residual
phase noise depends on that SNR while the required SNR depends on the
residual phase noise, each evaluation runs a small fixed-point iteration
between the two before the power models are totalled.

Minimization is a per-coordinate scan over logarithmic grids followed by
golden-section refinement sweeps, restarted from a handful of heuristic
seeds.  Boundary optima are snapped exactly to the bound, so saturated
coordinates (pilot spacing, the phase-noise cap) report the bound value
itself rather than a float one ulp away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from . import hwpower, link as linkmod, oscillator
from .errors import InfeasibleRateError, InvalidParameterError
from .gears import FrontEnd, Gear
from .hwpower import ComponentParams, PowerBreakdown
from .link import LinkParams
from .modem.securve import SECurve
from .oscillator import LOParams, TrackingContext

FIXED_POINT_REL_TOL = 1e-4
FIXED_POINT_MAX_ITER = 20
MIN_PILOT_SPACING = 2.0  # spacing 1 would leave no data symbols


@dataclass(frozen=True)
class Constraints:
    """Resource box of the optimization problem."""

    p_max: float = 10.0
    b_max: float = 2.8e9           # defaults to 0.1 * f_c via config
    f_max: float = 1e5
    sigma_j_max: float = 0.5
    eps_tx: float = 0.01
    eps_rx: float = 0.5
    gamma_min: float = 1e-8        # duty-cycle grid floor
    b_min: float = 1e4             # bandwidth grid floor
    sigma_j_min: float = 1e-3
    kappa: float = 2.0             # ADC overload headroom for tracking SNR

    def __post_init__(self):
        if not 0.0 < self.eps_tx < self.eps_rx < 1.0:
            raise InvalidParameterError("need 0 < eps_tx < eps_rx < 1")
        if self.p_max <= 0.0 or self.b_max <= 0.0:
            raise InvalidParameterError("p_max and b_max must be positive")
        if self.f_max < MIN_PILOT_SPACING:
            raise InvalidParameterError("pilot spacing cap too small")
        if not 0.0 < self.sigma_j_min < self.sigma_j_max:
            raise InvalidParameterError("need 0 < sigma_j_min < sigma_j_max")


@dataclass(frozen=True)
class OperatingPoint:
    gear_key: str
    bandwidth: float
    gamma: float
    p_t: float
    sigma_j: float
    pilot_spacing: float | None    # None for untracked (IR) gears


@dataclass(frozen=True)
class EnergyResult:
    e_bit: float
    feasible: bool
    reason: str                    # "" when feasible
    point: OperatingPoint | None = None
    tx: PowerBreakdown | None = None
    rx: PowerBreakdown | None = None
    sigma_pn_sq: float = math.nan
    xi: float = math.nan
    required_se: float = math.nan
    iterations: int = 0

    @staticmethod
    def infeasible(reason: str, point: OperatingPoint | None = None) -> "EnergyResult":
        return EnergyResult(e_bit=math.inf, feasible=False, reason=reason, point=point)


def energy_per_bit(
    gamma: float, p_tx: float, p_rx: float, r_eff: float, eps_tx: float, eps_rx: float
) -> float:
    """Joules per delivered bit including sleep/idle leakage."""
    if r_eff <= 0.0:
        raise InvalidParameterError("effective rate must be positive")
    active_tx = (gamma + eps_tx * (1.0 - gamma)) * p_tx
    active_rx = (gamma + eps_rx * (1.0 - gamma)) * p_rx
    return (active_tx + active_rx) / r_eff


@dataclass(frozen=True)
class EvalContext:
    """Everything an operating-point evaluation needs besides the point."""

    curve: SECurve
    link: LinkParams
    constraints: Constraints
    params: ComponentParams
    lo: LOParams


def evaluate_point(
    gear: Gear,
    r_eff: float,
    bandwidth: float,
    gamma: float,
    sigma_j: float,
    pilot_spacing: float | None,
    ctx: EvalContext,
) -> EnergyResult:
    """Energy per bit at one operating point, or a structured infeasibility."""
    cons = ctx.constraints
    point = OperatingPoint(gear.key, bandwidth, gamma, math.nan, sigma_j, pilot_spacing)
    if not (0.0 < bandwidth <= cons.b_max * (1 + 1e-12)):
        return EnergyResult.infeasible("bandwidth-out-of-range", point)
    if not (0.0 < gamma <= 1.0 + 1e-12):
        return EnergyResult.infeasible("duty-cycle-out-of-range", point)
    if not (0.0 < sigma_j <= cons.sigma_j_max * (1 + 1e-12)):
        return EnergyResult.infeasible("phase-noise-out-of-range", point)

    tracked = gear.phase_noise_tracked
    if tracked:
        if pilot_spacing is None or not (
            MIN_PILOT_SPACING <= pilot_spacing <= cons.f_max * (1 + 1e-12)
        ):
            return EnergyResult.infeasible("pilot-spacing-out-of-range", point)
        overhead = (pilot_spacing - 1.0) / pilot_spacing
    else:
        pilot_spacing = None
        overhead = 1.0

    required_se = r_eff / (gamma * bandwidth * overhead)
    sigma_j_sq = sigma_j ** 2

    untracked_var = oscillator.residual_pn_variance(
        TrackingContext(sigma_j_sq, bandwidth, None, 1.0, ctx.lo)
    )

    if not tracked:
        sigma_pn_sq = untracked_var
        try:
            xi = ctx.curve.invert(required_se, sigma_pn_sq)
        except InfeasibleRateError:
            return EnergyResult.infeasible("rate-unreachable", point)
        iterations = 1
    else:
        sigma_pn_sq = untracked_var
        try:
            xi = ctx.curve.invert(required_se, sigma_pn_sq)
        except InfeasibleRateError:
            # tracking may still save the point: restart from zero phase noise
            try:
                xi = ctx.curve.invert(required_se, 0.0)
            except InfeasibleRateError:
                return EnergyResult.infeasible("rate-unreachable", point)
            sigma_pn_sq = 0.0
        iterations = 0
        converged = False
        for iterations in range(1, FIXED_POINT_MAX_ITER + 1):
            xi_prime = oscillator.effective_snr(xi, gear.adc_bits, cons.kappa)
            sigma_pn_sq = oscillator.residual_pn_variance(
                TrackingContext(sigma_j_sq, bandwidth, pilot_spacing, xi_prime, ctx.lo)
            )
            try:
                xi_new = ctx.curve.invert(required_se, sigma_pn_sq)
            except InfeasibleRateError:
                return EnergyResult.infeasible("rate-unreachable", point)
            if abs(xi_new - xi) <= FIXED_POINT_REL_TOL * xi:
                xi = xi_new
                converged = True
                break
            xi = xi_new
        if not converged:
            return EnergyResult.infeasible("fixed-point-failure", point)

    p_t = linkmod.required_pt(xi, bandwidth, ctx.link)
    point = replace(point, p_t=p_t)
    if p_t > cons.p_max * (1 + 1e-12):
        return EnergyResult.infeasible("power-limited", point)

    p_lo = oscillator.lo_power(sigma_j, ctx.link.f_c, ctx.lo)
    tx = hwpower.tx_power(gear, ctx.link.f_c, p_t, bandwidth, p_lo, ctx.params)
    rx = hwpower.rx_power(gear, ctx.link.f_c, bandwidth, p_lo, ctx.params)
    e_bit = energy_per_bit(gamma, tx.total_w, rx.total_w, r_eff, cons.eps_tx, cons.eps_rx)
    return EnergyResult(
        e_bit=e_bit,
        feasible=True,
        reason="",
        point=point,
        tx=tx,
        rx=rx,
        sigma_pn_sq=sigma_pn_sq,
        xi=xi,
        required_se=required_se,
        iterations=iterations,
    )


# --- search ------------------------------------------------------------------

@dataclass(frozen=True)
class SearchGrids:
    """Per-coordinate logarithmic grid densities and refinement effort."""

    b_ppd: int = 25
    gamma_ppd: int = 25
    sigma_ppd: int = 10
    f_ppd: int = 10
    scan_sweeps: int = 2
    golden_sweeps: int = 3
    golden_iters: int = 28
    max_points: int = 400


def log_grid(lo: float, hi: float, points_per_decade: int, max_points: int = 400) -> list[float]:
    """Log-spaced grid including both endpoints exactly."""
    if hi <= lo:
        return [lo]
    decades = math.log10(hi / lo)
    n = min(max_points, max(2, int(math.ceil(decades * points_per_decade)) + 1))
    step = decades / (n - 1)
    grid = [lo * 10 ** (step * i) for i in range(n - 1)]
    grid.append(hi)
    return grid


def golden_min(fn, lo: float, hi: float, iters: int):
    """Golden-section minimum on [lo, hi]; exact endpoint when it wins."""
    if hi <= lo:
        return lo, fn(lo)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x_int, f_int = (c, fc) if fc <= fd else (d, fd)
    f_lo, f_hi = fn(lo), fn(hi)
    best = min((f_lo, lo), (f_hi, hi), (f_int, x_int), key=lambda t: t[0])
    return best[1], best[0]


@dataclass
class _Search:
    """Coordinate-scan minimizer over the free operating-point coordinates.

    Every evaluated point (seeds included) competes for the returned
    optimum, so refinement can only ever improve on the scans.
    """

    gear: Gear
    r_eff: float
    ctx: EvalContext
    grids: SearchGrids
    bounds: dict[str, tuple[float, float]]   # log-searchable coordinate bounds
    fixed: dict[str, float] = field(default_factory=dict)
    cache: dict = field(default_factory=dict)
    best_e: float = math.inf
    best_coords: dict[str, float] | None = None

    def energy(self, coords: dict[str, float]) -> float:
        key = tuple(round(math.log10(coords[k]), 9) for k in sorted(coords))
        if key in self.cache:
            return self.cache[key]
        full = {**self.fixed, **coords}
        res = evaluate_point(
            self.gear,
            self.r_eff,
            full["bandwidth"],
            full["gamma"],
            full["sigma_j"],
            full.get("pilot_spacing"),
            self.ctx,
        )
        self.cache[key] = res.e_bit
        if res.e_bit < self.best_e:
            self.best_e = res.e_bit
            self.best_coords = dict(coords)
        return res.e_bit

    def run(self, starts: list[dict[str, float]]) -> dict[str, float] | None:
        ppd = {
            "bandwidth": self.grids.b_ppd,
            "gamma": self.grids.gamma_ppd,
            "sigma_j": self.grids.sigma_ppd,
            "pilot_spacing": self.grids.f_ppd,
        }
        for start in starts:
            coords = {
                k: min(max(start[k], self.bounds[k][0]), self.bounds[k][1])
                for k in self.bounds
            }
            self.energy(coords)
            for _ in range(self.grids.scan_sweeps):
                for name, (lo, hi) in self.bounds.items():
                    grid = log_grid(lo, hi, ppd[name], self.grids.max_points)
                    vals = [self.energy({**coords, name: g}) for g in grid]
                    coords[name] = grid[int(min(range(len(grid)), key=vals.__getitem__))]
            for _ in range(self.grids.golden_sweeps):
                for name, (lo, hi) in self.bounds.items():

                    def line(v, n=name, lo=lo, hi=hi):
                        x = 10.0 ** v
                        # exact bound values when the line search saturates
                        if abs(x - hi) / hi < 1e-12:
                            x = hi
                        elif abs(x - lo) / lo < 1e-12:
                            x = lo
                        return self.energy({**coords, n: x})

                    x_log, _ = golden_min(
                        line, math.log10(lo), math.log10(hi), self.grids.golden_iters
                    )
                    x = 10.0 ** x_log
                    if abs(x - hi) / hi < 1e-12:
                        x = hi
                    elif abs(x - lo) / lo < 1e-12:
                        x = lo
                    coords[name] = x
        return self.best_coords


def _rate_bounds(gear: Gear, r_eff: float, b_cap: float, cons: Constraints, curve: SECurve):
    """Feasibility-pruned coordinate bounds, or None when trivially infeasible."""
    plateau = curve.plateau(0.0)
    overhead = (cons.f_max - 1.0) / cons.f_max if gear.phase_noise_tracked else 1.0
    if r_eff > plateau * b_cap * overhead * (1 + 1e-12):
        return None
    b_lo = max(cons.b_min, r_eff / (plateau * overhead))
    b_lo = min(b_lo, b_cap)
    gamma_lo = max(cons.gamma_min, r_eff / (b_cap * plateau * overhead))
    gamma_lo = min(gamma_lo, 1.0)
    return b_lo, gamma_lo


def _starts(gear: Gear, bounds: dict[str, tuple[float, float]]) -> list[dict[str, float]]:
    def mid(lo, hi):
        return math.sqrt(lo * hi)

    b_lo, b_hi = bounds["bandwidth"]
    g_lo, g_hi = bounds["gamma"]
    starts = []
    base = {"bandwidth": b_hi, "gamma": g_hi}
    if "sigma_j" in bounds:
        base["sigma_j"] = mid(*bounds["sigma_j"])
    if "pilot_spacing" in bounds:
        base["pilot_spacing"] = bounds["pilot_spacing"][1]
    starts.append(base)
    starts.append({**base, "bandwidth": mid(b_lo, b_hi), "gamma": mid(g_lo, g_hi)})
    starts.append({**base, "bandwidth": b_hi, "gamma": mid(g_lo, g_hi)})
    if "sigma_j" in bounds:
        starts.append({**base, "sigma_j": bounds["sigma_j"][1]})
    return starts


def design_time_optimize(
    gear: Gear,
    r_eff: float,
    ctx: EvalContext,
    grids: SearchGrids = SearchGrids(),
) -> EnergyResult:
    """Minimize energy per bit with a fully adaptive front end."""
    cons = ctx.constraints
    pruned = _rate_bounds(gear, r_eff, cons.b_max, cons, ctx.curve)
    if pruned is None:
        return EnergyResult.infeasible("rate-unreachable")
    b_lo, gamma_lo = pruned
    bounds = {
        "bandwidth": (b_lo, cons.b_max),
        "gamma": (gamma_lo, 1.0),
        "sigma_j": (cons.sigma_j_min, cons.sigma_j_max),
    }
    if gear.phase_noise_tracked:
        bounds["pilot_spacing"] = (MIN_PILOT_SPACING, cons.f_max)
    search = _Search(gear, r_eff, ctx, grids, bounds)
    coords = search.run(_starts(gear, bounds))
    if coords is None:
        return EnergyResult.infeasible("rate-unreachable")
    return evaluate_point(
        gear,
        r_eff,
        coords["bandwidth"],
        coords["gamma"],
        coords["sigma_j"],
        coords.get("pilot_spacing"),
        ctx,
    )


def constrained_optimize(
    gear: Gear,
    fe: FrontEnd,
    r_eff: float,
    ctx: EvalContext,
    grids: SearchGrids = SearchGrids(),
    seed_points: list[dict[str, float]] | None = None,
) -> EnergyResult:
    """Re-optimize with the oscillator and LNA bandwidth fixed per gear."""
    cons = ctx.constraints
    b_cap = min(cons.b_max, fe.b_max)
    pruned = _rate_bounds(gear, r_eff, b_cap, cons, ctx.curve)
    if pruned is None:
        return EnergyResult.infeasible("rate-unreachable")
    b_lo, gamma_lo = pruned
    bounds = {
        "bandwidth": (b_lo, b_cap),
        "gamma": (gamma_lo, 1.0),
    }
    if gear.phase_noise_tracked:
        bounds["pilot_spacing"] = (MIN_PILOT_SPACING, cons.f_max)
    search = _Search(gear, r_eff, ctx, grids, bounds, fixed={"sigma_j": fe.sigma_j})
    starts = _starts(gear, bounds)
    for extra in seed_points or []:
        start = {k: min(max(extra[k], bounds[k][0]), bounds[k][1]) for k in bounds if k in extra}
        if len(start) == len(bounds):
            starts.append(start)
    coords = search.run(starts)
    if coords is None:
        return EnergyResult.infeasible("rate-unreachable")
    return evaluate_point(
        gear,
        r_eff,
        coords["bandwidth"],
        coords["gamma"],
        fe.sigma_j,
        coords.get("pilot_spacing"),
        ctx,
    )


def single_gear_reference(
    fe: FrontEnd,
    gear: Gear,
    r_eff: float,
    ctx: EvalContext,
    grids: SearchGrids = SearchGrids(),
) -> EnergyResult:
    """Conventional fixed-bandwidth reference transceiver.

    Runs the reference gear (1024-QAM) with its fixed oscillator strictly
    at the full available bandwidth, pilot spacing pinned at the cap;
    only the duty cycle (hence transmit power) adapts.  Rates whose
    required spectral efficiency exceeds the plateau even at the duty
    floor ``constraints.gamma_min`` are reported infeasible.
    """
    cons = ctx.constraints
    bandwidth = cons.b_max
    pilot = cons.f_max if gear.phase_noise_tracked else None
    pruned = _rate_bounds(gear, r_eff, bandwidth, cons, ctx.curve)
    if pruned is None:
        return EnergyResult.infeasible("rate-unreachable")
    _, gamma_lo = pruned
    bounds = {"gamma": (gamma_lo, 1.0)}
    fixed = {"bandwidth": bandwidth, "sigma_j": fe.sigma_j}
    if pilot is not None:
        fixed["pilot_spacing"] = pilot
    search = _Search(gear, r_eff, ctx, grids, bounds, fixed=fixed)
    coords = search.run([{"gamma": 1.0}, {"gamma": math.sqrt(gamma_lo)}])
    if coords is None:
        return EnergyResult.infeasible("rate-unreachable")
    return evaluate_point(gear, r_eff, bandwidth, coords["gamma"], fe.sigma_j, pilot, ctx)


# --- multi-stage front-end fixing ---------------------------------------------

def fix_front_end(
    results_by_gear: dict[str, list[EnergyResult]],
    rates: list[float],
    rel_tie_tol: float = 1e-9,
) -> dict[str, FrontEnd]:
    """Pick one (sigma_j, b_max) per gear from design-time sweep results.

    A gear that is energy-optimal somewhere is fixed at the lowest rate
    of its optimal interval (the most probable operating point); a gear
    that never wins is fixed where its relative gap to the global
    minimum is smallest, ties broken toward the lower rate.
    """
    n = len(rates)
    e_min = [math.inf] * n
    for results in results_by_gear.values():
        for i, res in enumerate(results):
            if res.feasible and res.e_bit < e_min[i]:
                e_min[i] = res.e_bit

    front_ends: dict[str, FrontEnd] = {}
    for key, results in results_by_gear.items():
        chosen = None
        for i, res in enumerate(results):
            if res.feasible and res.e_bit <= e_min[i] * (1.0 + rel_tie_tol):
                chosen = res
                break
        if chosen is None:
            best_gap = math.inf
            for i, res in enumerate(results):
                if not res.feasible or not math.isfinite(e_min[i]):
                    continue
                gap = res.e_bit / e_min[i]
                if gap < best_gap - 1e-15:
                    best_gap = gap
                    chosen = res
        if chosen is None or chosen.point is None:
            continue  # gear infeasible at every rate: no front end to fix
        front_ends[key] = FrontEnd(
            sigma_j=chosen.point.sigma_j, b_max=chosen.point.bandwidth
        )
    return front_ends


def feasibility_frontier_violations(feasible_flags: list[bool]) -> list[int]:
    """Indices where feasibility resumes after a gap (reported, not asserted)."""
    violations = []
    seen_feasible = False
    in_gap = False
    for i, flag in enumerate(feasible_flags):
        if flag:
            if seen_feasible and in_gap:
                violations.append(i)
            seen_feasible = True
            in_gap = False
        elif seen_feasible:
            in_gap = True
    return violations
