from corridor.management.commands._base import ScenarioCommand


class Command(ScenarioCommand):
    help = 'Simulate one trajectory and diagnose its stability'
    command_name = 'simulate'
