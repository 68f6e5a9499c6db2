from corridor.management.commands._base import ScenarioCommand


class Command(ScenarioCommand):
    help = 'Bound the throughput at the configured toll'
    command_name = 'throughput'
