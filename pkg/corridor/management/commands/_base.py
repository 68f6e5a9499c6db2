from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from corridor import results
from corridor.config import load_scenario
from corridor.runner import EXIT_OK, record_failure, run_command


class ScenarioCommand(BaseCommand):
    ''' Shared flags and error handling of the experiment commands. '''
    command_name = None

    def add_arguments(self, parser):
        parser.add_argument('--config', help='Scenario file (INI or JSON, or a run manifest)')
        parser.add_argument('--out', help='Output directory (default: RESULTS_DIRECTORY)')
        parser.add_argument('--seed', type=int, help='Top-level random seed')
        parser.add_argument('--toll', type=float, help='Toll p in $/veh')
        parser.add_argument('--dbar', type=float, help='Expected demand in veh/h (moves d_max)')
        parser.add_argument('--resolution', type=int, help='Slice grid points per axis')
        parser.add_argument('--horizon', type=int, help='Simulation steps')
        parser.add_argument('--eps-e2', type=float, dest='eps_e2',
                            help='Half-width of the e2 compliance distribution')

    def scenario_overrides(self, options):
        ''' Flags applied to the scenario before validation; the manifest records them. '''
        return {
            key: options[key]
            for key in ('seed', 'toll', 'dbar', 'resolution', 'horizon', 'eps_e2')
            if options.get(key) is not None
        }

    def handle(self, *args, **options):
        folder = results.output_directory(options['out'])
        overrides = self.scenario_overrides(options)
        try:
            config = load_scenario(options['config'], **overrides)
        except (ValidationError, ValueError) as error:
            status, message = record_failure(self.command_name, folder, error)
            raise CommandError(message, returncode=status)

        outcome = run_command(self.command_name, config, folder, overrides)
        if outcome.status != EXIT_OK:
            raise CommandError(outcome.message, returncode=outcome.status)
        for filename in outcome.files:
            self.stdout.write(f'wrote {filename}')
        self.stdout.write(self.style.SUCCESS(f'{self.command_name} finished'))
