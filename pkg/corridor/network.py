"""Topology and fundamental diagrams of the buffer + two parallel routes.

Units are fixed throughout the app: km, veh/km, veh/h and h. Flow functions
accept scalars or numpy arrays of densities and return the same shape.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

# Densities may drift this far outside a diagram's domain before it is an error
DENSITY_TOLERANCE = 1e-9


class DomainError(ValueError):
    ''' A density outside the domain of a flow function. '''


class NotApplicableError(ValueError):
    ''' The quantity is not defined for this link (e.g. jam density of e0). '''


def _output(value):
    # Plain floats for scalar input, arrays otherwise
    if np.ndim(value) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class SendingDiagram:
    v: float
    Q: float

    def __post_init__(self):
        if not self.v > 0:
            raise ValueError(f"free-flow speed v must be positive, got {self.v}")
        if not self.Q >= 0:
            raise ValueError(f"capacity Q must be non-negative, got {self.Q}")


@dataclass(frozen=True)
class ReceivingDiagram:
    R: float
    w: float
    Q: float

    def __post_init__(self):
        if not self.w > 0:
            raise ValueError(f"backward wave speed w must be positive, got {self.w}")
        if not self.R >= self.Q:
            raise ValueError(
                f"backward intercept R={self.R} must be at least the capacity Q={self.Q}"
            )


@dataclass(frozen=True)
class LinkSpec:
    length: float
    sending: SendingDiagram
    receiving: Optional[ReceivingDiagram] = None

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"link length must be positive, got {self.length}")
        if self.receiving is not None and not self.receiving.R > 0:
            raise ValueError("jam density R/w must be positive")

    @classmethod
    def buffer(cls, length, v, Q):
        return cls(length, SendingDiagram(v, Q))

    @classmethod
    def routed(cls, length, v, Q, R, w):
        ''' A route link whose sending and receiving sides share capacity Q. '''
        return cls(length, SendingDiagram(v, Q), ReceivingDiagram(R, w, Q))

    @property
    def capacity(self):
        return self.sending.Q


@dataclass(frozen=True)
class NetworkSpec:
    e0: LinkSpec
    e1: LinkSpec
    e2: LinkSpec
    dt: float
    # None routes in proportion to the capacities of e1 and e2
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.e1.receiving is None or self.e2.receiving is None:
            raise ValueError("routes e1 and e2 need a receiving diagram")
        if self.alpha is not None and not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"routing ratio alpha must lie in [0, 1], got {self.alpha}")
        if self.e1.capacity + self.e2.capacity <= 0 and self.alpha is None:
            raise ValueError("capacity-proportional routing needs Q_e1 + Q_e2 > 0")
        if not self.dt > 0:
            raise ValueError(f"time step dt must be positive, got {self.dt}")
        bound = self.max_stable_step()
        if self.dt > bound * (1 + 1e-12):
            raise ValueError(
                f"time step dt={self.dt} h exceeds min_e(l_e/v_e, l_e/w_e)={bound:g} h; "
                "the density update would not stay in the state space"
            )

    def links(self):
        return {'e0': self.e0, 'e1': self.e1, 'e2': self.e2}

    def max_stable_step(self):
        ''' Largest dt keeping every update non-negative and below jam density. '''
        steps = [link.length / link.sending.v for link in (self.e0, self.e1, self.e2)]
        steps += [link.length / link.receiving.w for link in (self.e1, self.e2)]
        return min(steps)


def sending_flow(link, x):
    ''' min{v x, Q} for densities x >= 0. '''
    x = np.asarray(x, dtype=float)
    if np.any(x < -DENSITY_TOLERANCE):
        raise DomainError(f"negative density {np.min(x)} veh/km")
    x = np.maximum(x, 0.0)
    return _output(np.minimum(link.sending.v * x, link.sending.Q))


def receiving_flow(link, x):
    ''' max{0, min{R - w x, Q}} for densities in [0, R/w]. '''
    if link.receiving is None:
        raise NotApplicableError("the buffer link has no receiving flow")
    x = np.asarray(x, dtype=float)
    jam = jam_density(link)
    if np.any(x < -DENSITY_TOLERANCE) or np.any(x > jam + DENSITY_TOLERANCE):
        raise DomainError(f"density outside [0, {jam}] veh/km")
    diagram = link.receiving
    supply = np.minimum(diagram.R - diagram.w * x, diagram.Q)
    return _output(np.maximum(supply, 0.0))


def critical_density(link):
    ''' Lowest density at which the sending flow attains capacity. '''
    return link.sending.Q / link.sending.v


def jam_density(link):
    if link.receiving is None:
        raise NotApplicableError("the buffer link has infinite storage")
    return link.receiving.R / link.receiving.w


def routing_ratio(spec, x=None):
    ''' Share of the buffer outflow instructed towards e1.

    Only the constant policy is implemented; the state argument keeps the
    interface open for state-dependent routing.
    '''
    if spec.alpha is not None:
        return spec.alpha
    q1, q2 = spec.e1.capacity, spec.e2.capacity
    return q1 / (q1 + q2)
