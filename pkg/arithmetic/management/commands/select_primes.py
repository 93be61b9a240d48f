from arithmetic.management.base import JsonCommand
from arithmetic.numtheory import crt_smallest_M, select_blocks
from arithmetic.serializers import BlockPairSerializer


class Command(JsonCommand):
    help = "Greedy disjoint odd-prime blocks L, L' with phi/L in (1/2, 1/2 + eps)"

    def add_arguments(self, parser):
        parser.add_argument('--eps', required=True, help="Rational in (0, 1/2), e.g. 1/4 or 0.15")

    def handle(self, *args, **options):
        blocks = select_blocks(options['eps'])
        M, m1, m2 = crt_smallest_M(blocks.L.product, blocks.Lp.product)
        data = dict(BlockPairSerializer(blocks).data)
        data.update({'M': str(M), 'm1': str(m1), 'm2': str(m2)})
        self.emit(data)
