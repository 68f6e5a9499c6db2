import os
import shutil

from django.conf import settings
from django.test import SimpleTestCase

from corridor.compliance import ComplianceSpec, LinkCompliance
from corridor.config import load_scenario

results_folder = str(settings.BASE_DIR / 'test_results')


# TestCases working on the default two-route scenario
class ScenarioTestCase(SimpleTestCase):
    def setUp(self):
        # Delete the scratch results directory and contents
        shutil.rmtree(results_folder, ignore_errors=True, onerror=None)

        # Create the directory, assuming it's there but empty
        os.mkdir(results_folder)
        self.results_folder = results_folder

        self.scenario = load_scenario()
        self.net = self.scenario.network
        self.compliance = self.scenario.compliance

    def tearDown(self):
        # Delete the scratch results directory and contents
        shutil.rmtree(results_folder, ignore_errors=False, onerror=None)

    def deterministic_compliance(self):
        ''' Default coefficients with both compliance rates at their mean. '''
        return ComplianceSpec(
            LinkCompliance(-4.0, 0.01, -0.02, 0.3, 0.0),
            LinkCompliance(1.0, -0.02, 0.03, -0.6, 0.0),
        )

    def write_config(self, text, name='scenario.ini'):
        filename = os.path.join(self.results_folder, name)
        with open(filename, 'w') as config_file:
            config_file.write(text)
        return filename
