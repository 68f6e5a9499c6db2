"""Stability and instability certificates on the critical slice.

Both certificates weigh the expected buffer-to-route flows against the route
discharges with a vector theta in [0, 1]^2:

    lhs(x, theta) = Dbar - sum_e (1 - theta_e) E[q_e(x)] - sum_e theta_e f_e(x_e)

over states whose buffer sits at its critical density. A min-max over theta
that stays negative everywhere proves stability; a max-min that stays
non-negative proves instability. The continuum of states is replaced by a
uniform grid, each problem becomes a three-variable epigraph LP, and a
Lipschitz margin keeps the grid verdicts conservative.
"""
import enum
import itertools
import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import linprog

from corridor.compliance import expected_interlink_flows
from corridor.dynamics import State
from corridor.exceptions import CertificateConflict, SolverError
from corridor.network import critical_density, jam_density, sending_flow

logger = logging.getLogger(__name__)

THETA_CORNERS = tuple(np.array(corner, dtype=float) for corner in itertools.product((0, 1), repeat=2))


class SlicePoint(NamedTuple):
    x1: float
    x2: float
    eq1: float
    eq2: float
    f1: float
    f2: float


@dataclass(frozen=True)
class SliceGrid:
    ''' Cached flows on a uniform grid of the critical slice.

    Arrays are indexed [i, j] with x1 = x1_axis[i] and x2 = x2_axis[j].
    '''
    x1_axis: np.ndarray
    x2_axis: np.ndarray
    eq1: np.ndarray
    eq2: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    p: float = 0.0

    @property
    def resolution(self):
        return len(self.x1_axis)

    @property
    def x1(self):
        return np.broadcast_to(self.x1_axis[:, None], self.eq1.shape)

    @property
    def x2(self):
        return np.broadcast_to(self.x2_axis[None, :], self.eq1.shape)

    def point(self, i, j):
        return SlicePoint(self.x1_axis[i], self.x2_axis[j], self.eq1[i, j], self.eq2[i, j],
                          self.f1[i, j], self.f2[i, j])

    def points(self):
        for i, j in np.ndindex(self.eq1.shape):
            yield self.point(i, j)


class Optimum(NamedTuple):
    theta: np.ndarray
    gamma: float


class CertificateKind(str, enum.Enum):
    STABILITY = 'stability'
    INSTABILITY = 'instability'


@dataclass(frozen=True)
class Certificate:
    theta: tuple
    gamma: float
    kind: CertificateKind
    margin: float
    p: float
    dbar: float
    resolution: int

    def __post_init__(self):
        if not all(0.0 <= t <= 1.0 for t in self.theta):
            raise ValueError(f"theta {self.theta} is outside [0, 1]^2")

    @property
    def certifies(self):
        if self.kind == CertificateKind.STABILITY:
            return self.gamma + self.margin < 0
        return self.gamma - self.margin >= 0

    def as_record(self):
        return {
            'p': self.p,
            'D_bar': self.dbar,
            'kind': self.kind.value,
            'theta': list(self.theta),
            'gamma': self.gamma,
            'margin': self.margin,
            'resolution': self.resolution,
        }


class VerdictKind(str, enum.Enum):
    STABLE = 'stable'
    UNSTABLE = 'unstable'
    INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    stability: Certificate
    instability: Certificate

    @property
    def certificate(self) -> Optional[Certificate]:
        if self.kind == VerdictKind.STABLE:
            return self.stability
        if self.kind == VerdictKind.UNSTABLE:
            return self.instability
        return None

    @property
    def gamma_p1(self):
        return self.stability.gamma

    @property
    def gamma_p2(self):
        return self.instability.gamma

    @property
    def margin(self):
        return self.stability.margin


def build_slice(net, compliance, p, resolution=33, nodes=16):
    if resolution < 2:
        raise ValueError(f"the slice grid needs at least 2 points per axis, got {resolution}")
    x1_axis = np.linspace(0.0, jam_density(net.e1), resolution)
    x2_axis = np.linspace(0.0, jam_density(net.e2), resolution)
    x1, x2 = np.meshgrid(x1_axis, x2_axis, indexing='ij')
    x = State(np.full_like(x1, critical_density(net.e0)), x1, x2)
    eq1, eq2 = expected_interlink_flows(net, compliance, x, p, nodes)
    logger.debug("built %dx%d slice at p=%g", resolution, resolution, p)
    return SliceGrid(
        x1_axis, x2_axis, np.asarray(eq1), np.asarray(eq2),
        np.asarray(sending_flow(net.e1, x1)), np.asarray(sending_flow(net.e2, x2)), p,
    )


def lhs(point, theta, dbar):
    ''' Weighted expected net inflow; works on a SlicePoint or a whole SliceGrid. '''
    theta1, theta2 = theta
    return (dbar - (1 - theta1) * point.eq1 - (1 - theta2) * point.eq2
            - theta1 * point.f1 - theta2 * point.f2)


def _epigraph(grid, dbar, maximize):
    # lhs_k = dbar - eq1 - eq2 + theta1 (eq1 - f1) + theta2 (eq2 - f2)
    slope1 = np.ravel(grid.eq1 - grid.f1)
    slope2 = np.ravel(grid.eq2 - grid.f2)
    offset = dbar - np.ravel(grid.eq1 + grid.eq2)
    sign = -1.0 if maximize else 1.0
    # minimise t subject to sign * (lhs_k - t) <= 0
    a_ub = np.column_stack([sign * slope1, sign * slope2, np.full(slope1.shape, -sign)])
    b_ub = -sign * offset
    result = linprog(
        c=[0.0, 0.0, -1.0 if maximize else 1.0],
        A_ub=a_ub, b_ub=b_ub,
        bounds=[(0.0, 1.0), (0.0, 1.0), (None, None)],
        method='highs',
    )
    problem = 'max-min (instability)' if maximize else 'min-max (stability)'
    if result.status != 0:
        raise SolverError(problem, result.status, result.message)
    theta = np.clip(result.x[:2], 0.0, 1.0)
    # Re-evaluate at the clipped theta so gamma is exactly the grid max/min
    values = lhs(grid, theta, dbar)
    gamma = float(values.min() if maximize else values.max())
    logger.debug("%s LP at dbar=%g: theta=%s gamma=%g", problem, dbar, theta, gamma)
    return Optimum(theta, gamma)


def solve_p1(grid, dbar):
    ''' min over theta of the max over the grid of lhs. '''
    return _epigraph(grid, dbar, maximize=False)


def solve_p2(grid, dbar):
    ''' max over theta of the min over the grid of lhs. '''
    return _epigraph(grid, dbar, maximize=True)


def lipschitz_margin(grid, inflation=1.5):
    ''' Allowance for states between grid nodes.

    The largest adjacent-node slope of lhs over the theta corners (lhs is
    affine in theta, so the corners bound every theta) times the largest
    1-norm distance from a slice point to its nearest node.
    '''
    h1 = grid.x1_axis[1] - grid.x1_axis[0]
    h2 = grid.x2_axis[1] - grid.x2_axis[0]
    slope = 0.0
    for theta in THETA_CORNERS:
        values = lhs(grid, theta, 0.0)
        slope = max(
            slope,
            float(np.max(np.abs(np.diff(values, axis=0)))) / h1,
            float(np.max(np.abs(np.diff(values, axis=1)))) / h2,
        )
    return inflation * slope * (h1 + h2) / 2


def classify(grid, dbar, margin):
    ''' Verdict for expected demand dbar on a prepared slice. '''
    p1 = solve_p1(grid, dbar)
    p2 = solve_p2(grid, dbar)
    common = dict(margin=margin, p=grid.p, dbar=dbar, resolution=grid.resolution)
    stability = Certificate(tuple(map(float, p1.theta)), p1.gamma, CertificateKind.STABILITY, **common)
    instability = Certificate(tuple(map(float, p2.theta)), p2.gamma, CertificateKind.INSTABILITY, **common)
    if stability.certifies and instability.certifies:
        raise CertificateConflict(
            f"p={grid.p}, dbar={dbar}: gamma_P1={p1.gamma} and gamma_P2={p2.gamma} "
            f"certify both outcomes with margin {margin}"
        )
    if stability.certifies:
        kind = VerdictKind.STABLE
    elif instability.certifies:
        kind = VerdictKind.UNSTABLE
    else:
        kind = VerdictKind.INCONCLUSIVE
    return Verdict(kind, stability, instability)


def verdict(net, compliance, p, dbar, resolution=33, nodes=16, inflation=1.5):
    grid = build_slice(net, compliance, p, resolution, nodes)
    result = classify(grid, dbar, lipschitz_margin(grid, inflation))
    logger.info("p=%g dbar=%g: %s (gamma_P1=%.2f, gamma_P2=%.2f, margin=%.2f)",
                p, dbar, result.kind.value, result.gamma_p1, result.gamma_p2, result.margin)
    return result
