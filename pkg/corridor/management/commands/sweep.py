from corridor.management.commands._base import ScenarioCommand


class Command(ScenarioCommand):
    help = 'Throughput bounds over the toll grid and the toll with the best lower bound'
    command_name = 'sweep'
