"""Markov-chain density dynamics of the buffer and the two routes.

A step samples the compliance rates at the current state, splits the buffer
outflow between the routes and applies the conservation law on every link.
Simulations draw three uniforms per step (demand, then C_e1, then C_e2) from
a per-trajectory numpy Generator; trajectory k of a batch follows the same
path as simulate() seeded with the k-th child of the batch seed sequence.
"""
import enum
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd

from corridor.compliance import compliance_from_uniforms, sample
from corridor.exceptions import StateSpaceError
from corridor.network import (
    DENSITY_TOLERANCE, jam_density, receiving_flow, routing_ratio, sending_flow,
)

logger = logging.getLogger(__name__)

# Uniforms are drawn in blocks of at most this many steps per trajectory and
# at most DRAW_BUDGET numbers per block over all trajectories
DRAW_BLOCK = 1000
DRAW_BUDGET = 3_000_000


class State(NamedTuple):
    ''' Densities of the buffer e0 and the routes e1, e2 (veh/km).

    The fields may also hold equally shaped arrays for batched evaluation.
    '''
    x0: float
    x1: float
    x2: float

    def norm(self):
        return np.abs(self.x0) + np.abs(self.x1) + np.abs(self.x2)


@dataclass(frozen=True)
class DemandSpec:
    d_min: float
    d_max: float

    def __post_init__(self):
        if not 0 <= self.d_min <= self.d_max:
            raise ValueError(
                f"demand bounds must satisfy 0 <= d_min <= d_max, got [{self.d_min}, {self.d_max}]"
            )

    @property
    def mean(self):
        return (self.d_min + self.d_max) / 2

    @classmethod
    def from_mean(cls, dbar, d_min):
        ''' Demand with expected value dbar, sweeping d_max at fixed d_min.

        Means below d_min cannot be reached that way; the demand is then
        deterministic at dbar.
        '''
        low = min(d_min, dbar)
        return cls(low, 2 * dbar - low)

    def draw(self, u):
        return self.d_min + (self.d_max - self.d_min) * u


class Diagnosis(str, enum.Enum):
    STABLE = 'stable'
    UNSTABLE = 'unstable'


@dataclass(frozen=True)
class Trajectory:
    # (horizon + 1) x 3 densities and the running Cesaro mean of their 1-norms
    states: np.ndarray
    running_avg: np.ndarray

    @property
    def horizon(self):
        return len(self.states) - 1

    def state(self, t):
        return State(*self.states[t])

    def to_frame(self):
        return pd.DataFrame({
            't': np.arange(len(self.states)),
            'x0': self.states[:, 0],
            'x1': self.states[:, 1],
            'x2': self.states[:, 2],
            'running_avg_norm': self.running_avg,
        })


class TailStatistics(NamedTuple):
    ''' Mean 1-norm and least-squares slope of x0 over the final part of a run. '''
    mean_norm: np.ndarray
    x0_slope: np.ndarray


def interlink_flows(net, x, c):
    ''' Flows from the buffer into e1 and e2 for a given compliance sample. '''
    alpha = routing_ratio(net, x)
    outflow = sending_flow(net.e0, x.x0)
    share1 = alpha * c.c1 + (1 - alpha) * (1 - c.c2)
    share2 = alpha * (1 - c.c1) + (1 - alpha) * c.c2
    q1 = np.minimum(share1 * outflow, receiving_flow(net.e1, x.x1))
    q2 = np.minimum(share2 * outflow, receiving_flow(net.e2, x.x2))
    if np.ndim(q1) == 0:
        return float(q1), float(q2)
    return q1, q2


def transition(net, x, d, c):
    ''' Conservation-law update for demand d >= 0 and compliance sample c. '''
    if np.any(np.asarray(d) < 0):
        raise ValueError(f"demand must be non-negative, got {np.min(d)} veh/h")
    q1, q2 = interlink_flows(net, x, c)
    dt = net.dt
    x0 = x.x0 + dt / net.e0.length * (d - q1 - q2)
    x1 = x.x1 + dt / net.e1.length * (q1 - sending_flow(net.e1, x.x1))
    x2 = x.x2 + dt / net.e2.length * (q2 - sending_flow(net.e2, x.x2))
    return _checked(net, x0, x1, x2)


def _checked(net, x0, x1, x2):
    jam1, jam2 = jam_density(net.e1), jam_density(net.e2)
    if (np.any(x0 < -DENSITY_TOLERANCE) or np.any(x1 < -DENSITY_TOLERANCE)
            or np.any(x2 < -DENSITY_TOLERANCE) or np.any(x1 > jam1 + DENSITY_TOLERANCE)
            or np.any(x2 > jam2 + DENSITY_TOLERANCE)):
        raise StateSpaceError(
            f"update left the state space (dt={net.dt} h); "
            f"min x0={np.min(x0)}, x1 range [{np.min(x1)}, {np.max(x1)}], "
            f"x2 range [{np.min(x2)}, {np.max(x2)}]"
        )
    state = State(np.maximum(x0, 0.0), np.clip(x1, 0.0, jam1), np.clip(x2, 0.0, jam2))
    if np.ndim(state.x0) == 0:
        return State(float(state.x0), float(state.x1), float(state.x2))
    return state


def step(net, compliance, x, p, d, rng):
    c = sample(compliance, x, p, rng)
    return transition(net, x, d, c)


def _advance(net, compliance, x, p, demand_low, demand_high, u):
    # u[..., 0] drives the demand, u[..., 1:] the two compliance rates
    d = demand_low + (demand_high - demand_low) * u[..., 0]
    c = compliance_from_uniforms(compliance, x, p, u[..., 1], u[..., 2])
    return transition(net, x, d, c)


def _uniform_blocks(generators, horizon):
    ''' Yield (steps, trajectories, 3) blocks of uniforms, one stream per trajectory. '''
    block = max(1, min(DRAW_BLOCK, DRAW_BUDGET // (3 * max(len(generators), 1))))
    done = 0
    while done < horizon:
        size = min(block, horizon - done)
        yield np.stack([g.random((size, 3)) for g in generators], axis=1)
        done += size


def seed_streams(seed, count):
    ''' Independent child seeds of one top-level seed, one per trajectory. '''
    sequence = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return sequence.spawn(count)


def simulate(net, compliance, demand, p, x0, horizon, seed):
    ''' Run one trajectory of the chain with i.i.d. uniform demand. '''
    if horizon < 0:
        raise ValueError(f"horizon must be non-negative, got {horizon}")
    generator = np.random.default_rng(seed)
    states = np.empty((horizon + 1, 3))
    states[0] = x0
    x = State(*map(float, x0))
    t = 0
    for block in _uniform_blocks([generator], horizon):
        for u in block[:, 0, :]:
            x = _advance(net, compliance, x, p, demand.d_min, demand.d_max, u)
            t += 1
            states[t] = x
    norms = np.abs(states).sum(axis=1)
    running_avg = np.cumsum(norms) / np.arange(1, horizon + 2)
    return Trajectory(states, running_avg)


def _tail_start(horizon, burn_in):
    if burn_in is None:
        burn_in = horizon // 2
    if horizon < 2 or burn_in < 1 or horizon < 2 * burn_in:
        raise ValueError(
            f"horizon {horizon} is too short for a burn-in of {burn_in} steps "
            "(needs horizon >= 2 x burn-in)"
        )
    return burn_in


def _slope(n, sum_t, sum_tt, sum_x, sum_tx):
    return (n * sum_tx - sum_t * sum_x) / (n * sum_tt - sum_t ** 2)


def tail_statistics(traj, burn_in=None):
    start = _tail_start(traj.horizon, burn_in)
    tail = traj.states[start:]
    t = np.arange(len(tail), dtype=float)
    x0 = tail[:, 0]
    slope = _slope(len(t), t.sum(), (t * t).sum(), x0.sum(), (t * x0).sum())
    return TailStatistics(np.abs(tail).sum(axis=1).mean(), slope)


def diagnose_stability(traj, threshold=500.0, slope_tolerance=1e-3, burn_in=None):
    ''' Finite-horizon surrogate of the time-average boundedness criterion. '''
    stats = tail_statistics(traj, burn_in)
    return _diagnose(stats.mean_norm, stats.x0_slope, threshold, slope_tolerance)


def _diagnose(mean_norm, slope, threshold, slope_tolerance):
    if mean_norm > threshold or slope > slope_tolerance:
        return Diagnosis.UNSTABLE
    return Diagnosis.STABLE


def simulate_batch(net, compliance, demand_low, demand_high, p, horizon, seed,
                   x0=(0.0, 0.0, 0.0), burn_in=None):
    ''' Run many trajectories in lock-step and keep only their tail statistics.

    demand_low, demand_high and p are equally long arrays, one entry per
    trajectory; trajectory k draws from the k-th child of the seed sequence.
    '''
    demand_low = np.asarray(demand_low, dtype=float)
    demand_high = np.asarray(demand_high, dtype=float)
    p = np.asarray(p, dtype=float)
    count = len(demand_low)
    start = _tail_start(horizon, burn_in)

    x = State(*(np.full(count, float(v)) for v in x0))
    n = horizon + 1 - start
    sum_norm = np.zeros(count)
    sum_x = np.zeros(count)
    sum_tx = np.zeros(count)
    t_local = np.arange(n, dtype=float)
    sum_t, sum_tt = t_local.sum(), (t_local * t_local).sum()

    def accumulate(t, state):
        if t >= start:
            sum_norm[:] += state.norm()
            sum_x[:] += state.x0
            sum_tx[:] += (t - start) * state.x0

    accumulate(0, x)
    t = 0
    generators = [np.random.default_rng(s) for s in seed_streams(seed, count)]
    for block in _uniform_blocks(generators, horizon):
        for u in block:
            x = _advance(net, compliance, x, p, demand_low, demand_high, u)
            t += 1
            accumulate(t, x)
    logger.debug("simulated %d trajectories for %d steps", count, horizon)
    return TailStatistics(sum_norm / n, _slope(n, sum_t, sum_tt, sum_x, sum_tx))


def diagnose_batch(stats, threshold=500.0, slope_tolerance=1e-3):
    return [
        _diagnose(mean_norm, slope, threshold, slope_tolerance)
        for mean_norm, slope in zip(stats.mean_norm, stats.x0_slope)
    ]
