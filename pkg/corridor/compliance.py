"""Stochastic driver compliance with the routing instruction.

The compliance rate towards route e is uniform on
[max(mean - eps, 0), min(mean + eps, 1)] around a logistic mean in the route
densities and the toll. The two rates are drawn independently given (x, p).
Every function broadcasts over arrays stored in the State fields.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import expit

from corridor.network import receiving_flow, routing_ratio, sending_flow

ROUTES = ('e1', 'e2')

# Sign each coefficient must have for the mean of C_e1 to fall with x_e1 and
# the toll and rise with x_e2 (and the mirror image for C_e2). The mean is
# 1 / (1 + exp(...)), so a positive coefficient makes it decrease.
EXPECTED_SIGNS = {
    'e1': {'beta1': 1, 'beta2': -1, 'beta3': 1},
    'e2': {'beta1': -1, 'beta2': 1, 'beta3': -1},
}


@dataclass(frozen=True)
class LinkCompliance:
    beta0: float
    beta1: float
    beta2: float
    beta3: float
    eps: float

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"half-width eps must lie in [0, 1], got {self.eps}")


@dataclass(frozen=True)
class ComplianceSpec:
    e1: LinkCompliance
    e2: LinkCompliance

    def link(self, name):
        if name not in ROUTES:
            raise ValueError(f"compliance is defined for e1 and e2, not {name!r}")
        return getattr(self, name)

    def monotonicity_violations(self):
        ''' Coefficients whose sign breaks the monotone-mean assumptions. '''
        violations = []
        for name, signs in EXPECTED_SIGNS.items():
            coefficients = self.link(name)
            for field, sign in signs.items():
                value = getattr(coefficients, field)
                if value * sign < 0:
                    violations.append(f"{name}_{field}={value} should be {'>=' if sign > 0 else '<='} 0")
        return violations


class ComplianceSample(NamedTuple):
    c1: float
    c2: float


def mean_compliance(spec, link, x, p):
    coefficients = spec.link(link)
    exponent = (coefficients.beta0 + coefficients.beta1 * np.asarray(x.x1, dtype=float)
                + coefficients.beta2 * np.asarray(x.x2, dtype=float) + coefficients.beta3 * p)
    mean = expit(-exponent)
    return float(mean) if np.ndim(mean) == 0 else mean


def support(spec, link, x, p):
    ''' Interval on which the compliance rate of a route is uniform. '''
    mean = mean_compliance(spec, link, x, p)
    eps = spec.link(link).eps
    lo = np.maximum(mean - eps, 0.0)
    hi = np.minimum(mean + eps, 1.0)
    if np.ndim(lo) == 0:
        return float(lo), float(hi)
    return lo, hi


def compliance_from_uniforms(spec, x, p, u1, u2):
    ''' Map uniform draws on [0, 1) to a compliance sample at (x, p). '''
    lo1, hi1 = support(spec, 'e1', x, p)
    lo2, hi2 = support(spec, 'e2', x, p)
    return ComplianceSample(lo1 + (hi1 - lo1) * u1, lo2 + (hi2 - lo2) * u2)


def sample(spec, x, p, rng):
    u = rng.random((2,) + np.shape(x.x1))
    c1, c2 = compliance_from_uniforms(spec, x, p, u[0], u[1])
    if np.ndim(c1) == 0:
        return ComplianceSample(float(c1), float(c2))
    return ComplianceSample(c1, c2)


def _split_shares(alpha, c1, c2):
    share1 = alpha * c1 + (1 - alpha) * (1 - c2)
    share2 = alpha * (1 - c1) + (1 - alpha) * c2
    return share1, share2


def expected_interlink_flows(net, spec, x, p, nodes=16):
    ''' Expected buffer-to-route flows under the compliance distribution.

    Tensor-product Gauss-Legendre quadrature over the two support intervals.
    Where both supports collapse to a point the flows are evaluated directly.
    '''
    alpha = routing_ratio(net, x)
    outflow = np.asarray(sending_flow(net.e0, x.x0), dtype=float)
    supply1 = np.asarray(receiving_flow(net.e1, x.x1), dtype=float)
    supply2 = np.asarray(receiving_flow(net.e2, x.x2), dtype=float)

    lo1, hi1 = (np.asarray(v, dtype=float) for v in support(spec, 'e1', x, p))
    lo2, hi2 = (np.asarray(v, dtype=float) for v in support(spec, 'e2', x, p))
    shape = np.broadcast_shapes(outflow.shape, supply1.shape, supply2.shape, lo1.shape, lo2.shape)

    abscissae, weights = leggauss(nodes)
    weights = weights / 2.0
    # Axis -2 carries the nodes of c1, axis -1 those of c2
    c1 = ((lo1 + hi1) / 2)[..., None, None] + ((hi1 - lo1) / 2)[..., None, None] * abscissae[:, None]
    c2 = ((lo2 + hi2) / 2)[..., None, None] + ((hi2 - lo2) / 2)[..., None, None] * abscissae[None, :]
    share1, share2 = _split_shares(alpha, c1, c2)
    q1 = np.minimum(share1 * outflow[..., None, None], supply1[..., None, None])
    q2 = np.minimum(share2 * outflow[..., None, None], supply2[..., None, None])
    tensor = weights[:, None] * weights[None, :]
    expected1 = np.broadcast_to(np.sum(q1 * tensor, axis=(-2, -1)), shape)
    expected2 = np.broadcast_to(np.sum(q2 * tensor, axis=(-2, -1)), shape)

    degenerate = np.broadcast_to((hi1 == lo1) & (hi2 == lo2), shape)
    if np.any(degenerate):
        share1, share2 = _split_shares(alpha, lo1, lo2)
        direct1 = np.broadcast_to(np.minimum(share1 * outflow, supply1), shape)
        direct2 = np.broadcast_to(np.minimum(share2 * outflow, supply2), shape)
        expected1 = np.where(degenerate, direct1, expected1)
        expected2 = np.where(degenerate, direct2, expected2)

    if expected1.ndim == 0:
        return float(expected1), float(expected2)
    return expected1, expected2
