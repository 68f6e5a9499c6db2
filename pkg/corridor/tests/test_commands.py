import filecmp
import json
import os
from io import StringIO
from unittest import mock

import pandas as pd
from django.core.management import call_command
from django.core.management.base import CommandError

from corridor.exceptions import SolverError

from .scenario_test_case import ScenarioTestCase

SMALL = '''[solver]
resolution = 9
dbar_high = 8000

[simulation]
horizon = 200
seeds = 2

[sweep]
p_min = 0
p_max = 1
p_step = 0.5

[region]
p_min = 0
p_max = 5
p_step = 5
dbar_min = 4500
dbar_max = 4600
dbar_step = 50
'''


class CommandTestCase(ScenarioTestCase):
    def setUp(self):
        super().setUp()
        self.config = self.write_config(SMALL)

    def run_command(self, name, folder='run', **options):
        out = os.path.join(self.results_folder, folder)
        call_command(name, config=self.config, out=out, stdout=StringIO(), **options)
        return out

    def load(self, folder, name):
        with open(os.path.join(folder, name)) as result_file:
            return json.load(result_file)

    def test_simulate(self):
        out = self.run_command('simulate', seed=3)
        frame = pd.read_csv(os.path.join(out, 'trajectory.csv'))
        self.assertEqual(len(frame), 201)
        diagnosis = self.load(out, 'diagnosis.json')
        self.assertIn(diagnosis['diagnosis'], ('stable', 'unstable'))
        self.assertEqual(diagnosis['seed'], 3)
        self.assertEqual(self.load(out, 'manifest.json')['seed'], 3)

    def test_verify(self):
        out = self.run_command('verify', toll=5.0, dbar=8000.0, resolution=33)
        certificate = self.load(out, 'certificate.json')
        self.assertEqual(certificate['verdict'], 'unstable')
        self.assertEqual(certificate['certificate']['kind'], 'instability')
        self.assertEqual(certificate['certificate']['D_bar'], 8000)
        self.assertEqual(certificate['stability']['kind'], 'stability')

    def test_verify_inconclusive(self):
        out = self.run_command('verify', toll=5.0, dbar=4750.0, resolution=33)
        certificate = self.load(out, 'certificate.json')
        self.assertEqual(certificate['verdict'], 'inconclusive')
        self.assertIsNone(certificate['certificate'])

    def test_throughput(self):
        out = self.run_command('throughput', toll=5.0, resolution=33)
        bounds = self.load(out, 'bounds.json')
        self.assertEqual(len(bounds), 1)
        self.assertLessEqual(bounds[0]['lower'], bounds[0]['upper'])

    def test_sweep(self):
        out = self.run_command('sweep')
        frame = pd.read_csv(os.path.join(out, 'sweep.csv'))
        self.assertEqual(list(frame['p']), [0.0, 0.5, 1.0])
        summary = self.load(out, 'summary.json')
        self.assertIn(summary['best_toll'], [0.0, 0.5, 1.0])
        self.assertEqual(len(self.load(out, 'bounds.json')), 3)

    def test_region(self):
        out = self.run_command('region', simulate=True)
        frame = pd.read_csv(os.path.join(out, 'region.csv'))
        self.assertEqual(len(frame), 2 * 3)
        self.assertEqual(list(frame.columns),
                         ['p', 'D_bar', 'verdict', 'gamma_p1', 'gamma_p2', 'sim_diagnostic', 'sim_mean_norm'])
        self.assertTrue(set(frame['sim_diagnostic']) <= {'stable', 'unstable', 'mixed'})
        self.assertTrue((frame['sim_mean_norm'] >= 0).all())
        for name in ('region_matrix.dat', 'region_density.dat'):
            with open(os.path.join(out, name)) as matrix_file:
                self.assertEqual(len(matrix_file.read().splitlines()), 1 + 3)
        self.assertEqual(len(self.load(out, 'frontiers.json')), 2)
        summary = self.load(out, 'region_summary.json')
        self.assertEqual(sum(summary['counts'].values()), 6)
        self.assertEqual(summary['eps_e2'], 0.1)
        manifest = self.load(out, 'manifest.json')
        self.assertEqual(manifest['options'], {'simulate': True})
        self.assertTrue(manifest['scenario']['region']['simulate'])

    def test_region_without_simulation(self):
        out = self.run_command('region')
        frame = pd.read_csv(os.path.join(out, 'region.csv'))
        self.assertTrue(frame['sim_mean_norm'].isna().all())
        self.assertFalse(os.path.exists(os.path.join(out, 'region_density.dat')))

    def check_rerun(self, command, names, **options):
        ''' A manifest reproduces the outputs of its run byte for byte. '''
        config = self.config
        first = self.run_command(command, folder=f'{command}_first', **options)
        self.config = os.path.join(first, 'manifest.json')
        second = self.run_command(command, folder=f'{command}_second')
        self.config = config
        for name in names:
            self.assertTrue(filecmp.cmp(os.path.join(first, name), os.path.join(second, name), shallow=False))

    def test_rerun_from_manifest(self):
        self.check_rerun('sweep', ('sweep.csv', 'bounds.json', 'summary.json'), toll=2.0)

    def test_rerun_region_with_simulation(self):
        self.check_rerun('region', ('region.csv', 'region_density.dat', 'region_summary.json'),
                         simulate=True, seed=4)

    def test_validation_error(self):
        self.config = self.write_config('[network]\ndt = 0.02\n', 'bad.ini')
        with self.assertRaises(CommandError) as error:
            self.run_command('verify')
        self.assertEqual(error.exception.returncode, 1)
        record = self.load(os.path.join(self.results_folder, 'run'), 'error.json')
        self.assertEqual(record['command'], 'verify')
        self.assertEqual(record['kind'], 'validation')

    def test_numeric_error(self):
        failure = SolverError('min-max (stability)', 4, 'numerical difficulties')
        with mock.patch('corridor.runner.verdict', side_effect=failure):
            with self.assertRaises(CommandError) as error:
                self.run_command('verify')
        self.assertEqual(error.exception.returncode, 2)
        record = self.load(os.path.join(self.results_folder, 'run'), 'error.json')
        self.assertEqual(record['kind'], 'numeric')
        self.assertIn('status 4', record['message'])
