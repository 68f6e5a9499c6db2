"""Command dispatch: one function per command, each writing its artifacts.

run_command never raises for failures of the modules it drives; it writes
an error record and returns the exit status instead.
"""
import logging
from typing import NamedTuple

from django.core.exceptions import ValidationError

from corridor import results
from corridor.dynamics import diagnose_stability, simulate, tail_statistics
from corridor.exceptions import NumericError
from corridor.throughput import region_map, throughput_bounds, toll_sweep
from corridor.verifier import verdict

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2

SWEEP_COLUMNS = ['p', 'lower', 'upper', 'tol', 'gap', 'lower_limited', 'upper_limited', 'margin_free_lower']
REGION_COLUMNS = ['p', 'D_bar', 'verdict', 'gamma_p1', 'gamma_p2', 'sim_diagnostic', 'sim_mean_norm']


class RunResult(NamedTuple):
    status: int
    files: list
    message: str = ''


def run_simulate(config, folder, options):
    sim = config.simulation
    traj = simulate(config.network, config.compliance, config.demand, config.toll,
                    (0.0, 0.0, 0.0), sim.horizon, sim.seed)
    stats = tail_statistics(traj)
    diagnosis = diagnose_stability(traj, sim.threshold, sim.slope_tolerance)
    return [
        results.write_csv(folder, 'trajectory.csv', traj.to_frame()),
        results.write_json(folder, 'diagnosis.json', {
            'p': config.toll,
            'D_bar': config.demand.mean,
            'seed': sim.seed,
            'horizon': sim.horizon,
            'diagnosis': diagnosis.value,
            'tail_mean_norm': float(stats.mean_norm),
            'tail_x0_slope': float(stats.x0_slope),
        }),
    ]


def run_verify(config, folder, options):
    solver = config.solver
    result = verdict(config.network, config.compliance, config.toll, config.demand.mean,
                     solver.resolution, solver.quadrature_nodes, solver.lipschitz_inflation)
    certificate = result.certificate
    return [results.write_json(folder, 'certificate.json', {
        'verdict': result.kind.value,
        'certificate': certificate.as_record() if certificate else None,
        'stability': result.stability.as_record(),
        'instability': result.instability.as_record(),
    })]


def run_throughput(config, folder, options):
    bounds = throughput_bounds(config, config.toll)
    return [results.write_json(folder, 'bounds.json', [bounds.as_record()])]


def run_sweep(config, folder, options):
    sweep = toll_sweep(config, config.sweep.tolls())
    records = [b.as_record() for b in sweep.bounds]
    return [
        results.write_records(folder, 'sweep.csv', records, SWEEP_COLUMNS),
        results.write_json(folder, 'bounds.json', records),
        results.write_json(folder, 'summary.json', sweep.as_record()),
    ]


def run_region(config, folder, options):
    grid = config.region
    region = region_map(config, grid.tolls(), grid.demands(), with_simulation=grid.simulate)
    counts = region.counts()
    files = [
        results.write_records(folder, 'region.csv', region.records(), REGION_COLUMNS),
        results.write_matrix(folder, 'region_matrix.dat', region.matrix(),
                             region.p_axis, region.d_axis),
        results.write_json(folder, 'frontiers.json', region.frontiers()),
        results.write_json(folder, 'region_summary.json', {
            'eps_e2': config.compliance.e2.eps,
            'counts': {kind.value: count for kind, count in counts.items()},
        }),
    ]
    if region.diagnostics is not None:
        files.append(results.write_matrix(folder, 'region_density.dat', region.density_matrix(),
                                          region.p_axis, region.d_axis))
        clashes = region.contradictions()
        if clashes:
            logger.warning("%d cells contradict the simulation: %s", len(clashes), clashes)
    return files


COMMANDS = {
    'simulate': run_simulate,
    'verify': run_verify,
    'throughput': run_throughput,
    'sweep': run_sweep,
    'region': run_region,
}


def record_failure(command, folder, error):
    ''' Write error.json for a failed run and return its exit status. '''
    if isinstance(error, NumericError):
        status, kind = EXIT_NUMERIC, 'numeric'
    else:
        status, kind = EXIT_VALIDATION, 'validation'
    if isinstance(error, ValidationError):
        message = '; '.join(error.messages)
    else:
        message = str(error)
    logger.error("%s failed (%s): %s", command, kind, message)
    results.write_error(folder, command, kind, message)
    return status, message


def run_command(command, config, folder=None, options=None):
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}, expected one of {sorted(COMMANDS)}")
    options = options or {}
    folder = results.output_directory(folder)
    files = [results.write_manifest(folder, command, config, options)]
    try:
        files += COMMANDS[command](config, folder, options)
    except (ValidationError, ValueError, NumericError) as error:
        status, message = record_failure(command, folder, error)
        return RunResult(status, files, message)
    return RunResult(EXIT_OK, files)
