from corridor.management.commands._base import ScenarioCommand


class Command(ScenarioCommand):
    help = 'Map certified verdicts over the (toll, expected demand) grid'
    command_name = 'region'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--simulate', action='store_true', default=None,
                            help='Also diagnose every cell by simulation ([region] simulate)')

    def scenario_overrides(self, options):
        overrides = super().scenario_overrides(options)
        if options.get('simulate'):
            overrides['simulate'] = True
        return overrides
