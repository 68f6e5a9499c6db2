"""The validated scenario a command runs on.

Every section of a scenario file maps to one field of ScenarioConfig. The
numerical sections hold the domain objects themselves; the remaining ones
hold plain settings records.
"""
from dataclasses import asdict, dataclass

import numpy as np

from corridor.compliance import ComplianceSpec
from corridor.dynamics import DemandSpec
from corridor.network import NetworkSpec


def grid_axis(start, stop, step):
    ''' start, start + step, ... up to and including stop (within rounding). '''
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


@dataclass(frozen=True)
class SolverSettings:
    resolution: int
    quadrature_nodes: int
    lipschitz_inflation: float
    bisection_tol: float
    dbar_low: float
    dbar_high: float

    @property
    def d_range(self):
        return (self.dbar_low, self.dbar_high)


@dataclass(frozen=True)
class SimulationSettings:
    horizon: int
    seeds: int
    seed: int
    threshold: float
    slope_tolerance: float


@dataclass(frozen=True)
class SweepGrid:
    p_min: float
    p_max: float
    p_step: float

    def tolls(self):
        return grid_axis(self.p_min, self.p_max, self.p_step)


@dataclass(frozen=True)
class RegionGrid:
    p_min: float
    p_max: float
    p_step: float
    dbar_min: float
    dbar_max: float
    dbar_step: float
    # Also diagnose every cell by simulation
    simulate: bool = False

    def tolls(self):
        return grid_axis(self.p_min, self.p_max, self.p_step)

    def demands(self):
        return grid_axis(self.dbar_min, self.dbar_max, self.dbar_step)


@dataclass(frozen=True)
class ScenarioConfig:
    network: NetworkSpec
    compliance: ComplianceSpec
    demand: DemandSpec
    toll: float
    solver: SolverSettings
    simulation: SimulationSettings
    sweep: SweepGrid
    region: RegionGrid

    def to_sections(self):
        ''' Plain nested dict with the section and key names of a scenario file. '''
        net = self.network
        network = {}
        for name, link in net.links().items():
            network[f'{name}_length'] = link.length
            network[f'{name}_v'] = link.sending.v
            network[f'{name}_q'] = link.sending.Q
            if link.receiving is not None:
                network[f'{name}_r'] = link.receiving.R
                network[f'{name}_w'] = link.receiving.w
        network['alpha'] = net.alpha
        network['dt'] = net.dt

        compliance = {}
        for name in ('e1', 'e2'):
            for field, value in asdict(self.compliance.link(name)).items():
                compliance[f'{name}_{field}'] = value

        return {
            'network': network,
            'compliance': compliance,
            'demand': asdict(self.demand),
            'policy': {'toll': self.toll},
            'solver': asdict(self.solver),
            'simulation': asdict(self.simulation),
            'sweep': asdict(self.sweep),
            'region': asdict(self.region),
        }
