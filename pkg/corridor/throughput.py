"""Throughput bounds, toll sweeps and (toll, demand) region maps.

For a fixed slice the optimal values of both certificate problems shift one
for one with the expected demand, so the Stable verdicts form a lower
interval of demands and the Unstable verdicts an upper one. Bisection over the
expected demand therefore locates the largest certified-stable demand (the
throughput lower bound) and the smallest certified-unstable one (the upper
bound). Every toll needs one slice build; all demands reuse it.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from corridor.dynamics import DemandSpec, diagnose_batch, simulate_batch
from corridor.verifier import VerdictKind, build_slice, classify, lipschitz_margin, solve_p1, solve_p2

logger = logging.getLogger(__name__)

VERDICT_CODES = {
    VerdictKind.STABLE: 1,
    VerdictKind.INCONCLUSIVE: 0,
    VerdictKind.UNSTABLE: -1,
}

MIXED = 'mixed'


@dataclass(frozen=True)
class ThroughputBounds:
    p: float
    lower: float
    upper: float
    tol: float
    # True when the bound sits on an end of the searched range instead of a
    # located verdict change
    lower_limited: bool = False
    upper_limited: bool = False
    # Demand at which gamma_P1 changes sign with no allowance for off-grid
    # states; not clamped to the searched range
    margin_free_lower: Optional[float] = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper} at p={self.p}")

    @property
    def gap(self):
        ''' Width of the inconclusive band. '''
        return self.upper - self.lower

    def as_record(self):
        return {
            'p': self.p,
            'lower': self.lower,
            'upper': self.upper,
            'tol': self.tol,
            'gap': self.gap,
            'lower_limited': self.lower_limited,
            'upper_limited': self.upper_limited,
            'margin_free_lower': self.margin_free_lower,
        }


@dataclass(frozen=True)
class SweepResult:
    bounds: List[ThroughputBounds]
    best_toll: float
    best_lower: float
    margin_free_best_toll: Optional[float] = None
    margin_free_best_lower: Optional[float] = None

    def as_record(self):
        return {
            'best_toll': self.best_toll,
            'best_lower': self.best_lower,
            'margin_free_best_toll': self.margin_free_best_toll,
            'margin_free_best_lower': self.margin_free_best_lower,
            'tolls': [b.p for b in self.bounds],
        }


def _check_range(d_range, tol):
    low, high = d_range
    if not 0 <= low < high:
        raise ValueError(f"demand range must satisfy 0 <= low < high, got [{low}, {high}]")
    if not tol > 0:
        raise ValueError(f"bisection tolerance must be positive, got {tol}")
    return float(low), float(high)


def _bisect(holds, low, high, tol):
    # holds(low) differs from holds(high); returns the bracket once narrower than tol
    at_low = holds(low)
    while high - low > tol:
        middle = (low + high) / 2
        if holds(middle) == at_low:
            low = middle
        else:
            high = middle
    return low, high


def bounds_from_grid(grid, margin, d_range, tol):
    ''' Throughput bounds on a prepared slice.

    A range whose low end is not Stable (or whose high end is) clamps the
    lower bound to that end and flags it; the upper bound is handled the
    same way with the Unstable verdict.
    '''
    low, high = _check_range(d_range, tol)

    def stable(dbar):
        return solve_p1(grid, dbar).gamma + margin < 0

    def unstable(dbar):
        return solve_p2(grid, dbar).gamma - margin >= 0

    if not stable(low):
        lower, lower_limited = low, True
    elif stable(high):
        lower, lower_limited = high, True
    else:
        lower, lower_limited = _bisect(stable, low, high, tol)[0], False

    if unstable(low):
        upper, upper_limited = low, True
    elif not unstable(high):
        upper, upper_limited = high, True
    else:
        upper, upper_limited = _bisect(unstable, low, high, tol)[1], False

    # gamma_P1 shifts one for one with the expected demand
    margin_free = -solve_p1(grid, 0.0).gamma
    return ThroughputBounds(grid.p, lower, upper, tol, lower_limited, upper_limited, margin_free)


def _slice(scenario, p, resolution=None):
    solver = scenario.solver
    grid = build_slice(scenario.network, scenario.compliance, p,
                       resolution or solver.resolution, solver.quadrature_nodes)
    return grid, lipschitz_margin(grid, solver.lipschitz_inflation)


def throughput_bounds(scenario, p, d_range=None, tol=None):
    solver = scenario.solver
    d_range = d_range or solver.d_range
    tol = tol or solver.bisection_tol
    grid, margin = _slice(scenario, p)
    bounds = bounds_from_grid(grid, margin, d_range, tol)
    logger.info("p=%g: throughput in [%.1f, %.1f] veh/h (margin %.1f, gap %.1f)",
                p, bounds.lower, bounds.upper, margin, bounds.gap)
    return bounds


def toll_sweep(scenario, p_grid, d_range=None, tol=None):
    ''' Bounds for every toll and the toll with the largest lower bound.

    The same argmax is taken over the margin-free lower bounds. Ties go to
    the smallest toll in both.
    '''
    p_grid = [float(p) for p in p_grid]
    if not p_grid:
        raise ValueError("the toll grid is empty")
    bounds = [throughput_bounds(scenario, p, d_range, tol) for p in p_grid]
    best = max(bounds, key=lambda b: (b.lower, -b.p))
    unclamped = max(bounds, key=lambda b: (b.margin_free_lower, -b.p))
    logger.info("best toll %g $/veh with lower bound %.1f veh/h (margin-free: %g $/veh, %.1f veh/h)",
                best.p, best.lower, unclamped.p, unclamped.margin_free_lower)
    return SweepResult(bounds, best.p, best.lower, unclamped.p, unclamped.margin_free_lower)


@dataclass(frozen=True)
class RegionMap:
    ''' Verdicts on a (toll, expected demand) grid.

    verdicts[i][j], diagnostics[i][j] and densities[i, j] belong to p_axis[i]
    and d_axis[j]. densities holds the seed-averaged tail mean 1-norm of the
    simulated state.
    '''
    p_axis: np.ndarray
    d_axis: np.ndarray
    verdicts: list
    diagnostics: Optional[list] = None
    densities: Optional[np.ndarray] = None

    def kind(self, i, j):
        return self.verdicts[i][j].kind

    def counts(self):
        counts = {kind: 0 for kind in VerdictKind}
        for row in self.verdicts:
            for cell in row:
                counts[cell.kind] += 1
        return counts

    def matrix(self):
        ''' Verdict codes with one row per demand and one column per toll. '''
        codes = np.array([[VERDICT_CODES[cell.kind] for cell in row] for row in self.verdicts])
        return codes.T

    def density_matrix(self):
        ''' Simulated tail mean 1-norms, laid out like matrix(). '''
        if self.densities is None:
            return None
        return np.asarray(self.densities).T

    def frontiers(self):
        ''' Per toll, the largest Stable demand and the smallest Unstable one. '''
        edges = []
        for i, p in enumerate(self.p_axis):
            stable = [d for j, d in enumerate(self.d_axis) if self.kind(i, j) == VerdictKind.STABLE]
            unstable = [d for j, d in enumerate(self.d_axis) if self.kind(i, j) == VerdictKind.UNSTABLE]
            edges.append({
                'p': float(p),
                'stable_edge': float(max(stable)) if stable else None,
                'unstable_edge': float(min(unstable)) if unstable else None,
            })
        return edges

    def records(self):
        for i, p in enumerate(self.p_axis):
            for j, dbar in enumerate(self.d_axis):
                cell = self.verdicts[i][j]
                yield {
                    'p': float(p),
                    'D_bar': float(dbar),
                    'verdict': cell.kind.value,
                    'gamma_p1': cell.gamma_p1,
                    'gamma_p2': cell.gamma_p2,
                    'sim_diagnostic': self.diagnostics[i][j] if self.diagnostics else '',
                    'sim_mean_norm': float(self.densities[i, j]) if self.densities is not None else None,
                }

    def contradictions(self):
        ''' Cells whose certified verdict disagrees with the simulation. '''
        if self.diagnostics is None:
            return []
        clashes = []
        for i, p in enumerate(self.p_axis):
            for j, dbar in enumerate(self.d_axis):
                kind, seen = self.kind(i, j), self.diagnostics[i][j]
                if kind == VerdictKind.INCONCLUSIVE:
                    continue
                if seen != kind.value:
                    clashes.append((float(p), float(dbar), kind.value, seen))
        return clashes


def _check_axis(name, axis):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or len(axis) == 0:
        raise ValueError(f"the {name} grid is empty")
    if np.any(np.diff(axis) <= 0):
        raise ValueError(f"the {name} grid must be strictly increasing")
    return axis


def simulate_cells(scenario, p_axis, d_axis):
    ''' Diagnose every (toll, demand) cell over the configured seeds.

    Cell (i, j) is stable or unstable when all of its seeds agree, mixed
    otherwise. Returns those labels and the seed-averaged tail mean 1-norm
    of every cell. The trajectories run as one batch in cell-major order.
    '''
    settings = scenario.simulation
    d_min = scenario.demand.d_min
    demands = [DemandSpec.from_mean(dbar, d_min) for dbar in d_axis]
    seeds = settings.seeds
    p_flat = np.repeat(np.asarray(p_axis, dtype=float), len(d_axis) * seeds)
    low = np.tile(np.repeat([d.d_min for d in demands], seeds), len(p_axis))
    high = np.tile(np.repeat([d.d_max for d in demands], seeds), len(p_axis))
    stats = simulate_batch(scenario.network, scenario.compliance, low, high, p_flat,
                           settings.horizon, settings.seed)
    diagnoses = diagnose_batch(stats, settings.threshold, settings.slope_tolerance)
    cells = np.array([d.value for d in diagnoses]).reshape(len(p_axis), len(d_axis), seeds)
    table = []
    for row in cells:
        table.append([
            str(seen[0]) if all(s == seen[0] for s in seen) else MIXED
            for seen in row
        ])
    densities = np.asarray(stats.mean_norm).reshape(len(p_axis), len(d_axis), seeds).mean(axis=2)
    return table, densities


def region_map(scenario, p_grid, d_grid, resolution=None, with_simulation=False):
    p_axis = _check_axis('toll', p_grid)
    d_axis = _check_axis('demand', d_grid)
    verdicts = []
    for p in p_axis:
        grid, margin = _slice(scenario, float(p), resolution)
        verdicts.append([classify(grid, float(dbar), margin) for dbar in d_axis])
        logger.debug("region column p=%g done", p)
    diagnostics = densities = None
    if with_simulation:
        diagnostics, densities = simulate_cells(scenario, p_axis, d_axis)
    region = RegionMap(p_axis, d_axis, verdicts, diagnostics, densities)
    counts = region.counts()
    logger.info("region %dx%d: %d stable, %d inconclusive, %d unstable",
                len(p_axis), len(d_axis), counts[VerdictKind.STABLE],
                counts[VerdictKind.INCONCLUSIVE], counts[VerdictKind.UNSTABLE])
    return region

