from arithmetic.management.base import JsonCommand
from arithmetic.pell import fundamental_unit_solution
from arithmetic.serializers import PellSolutionSerializer


class Command(JsonCommand):
    help = 'Fundamental solution of the Pell equation x^2 - D*y^2 = +-1'

    def add_arguments(self, parser):
        parser.add_argument('--D', type=int, required=True, help='Square-free D >= 2')
        parser.add_argument('--norm', type=int, choices=[1, -1], default=1, help='+1 (default) or -1')

    def handle(self, *args, **options):
        solution = fundamental_unit_solution(options['D'], options['norm'])
        self.emit(PellSolutionSerializer(solution).data)
