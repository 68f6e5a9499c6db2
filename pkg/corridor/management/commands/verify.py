from corridor.management.commands._base import ScenarioCommand


class Command(ScenarioCommand):
    help = 'Certify stability or instability at the configured toll and demand'
    command_name = 'verify'
