from arithmetic.management.base import JsonCommand
from certificates.construct import square_class_test, square_decompose
from certificates.serializers import DecompositionSerializer


class Command(JsonCommand):
    help = "Test alpha for membership in Q_+ * (K^x)^2 and give A, beta with A alpha = beta^2"

    def add_arguments(self, parser):
        self.add_alpha_arguments(parser)

    def handle(self, *args, **options):
        alpha = self.parse_alpha(options)
        result = {
            'alpha': alpha,
            'D': alpha.field.D,
            'in_square_class': square_class_test(alpha),
            'A': None,
            'beta': None,
            'identity_verified': False,
        }
        if result['in_square_class']:
            A, beta = square_decompose(alpha)
            result.update(A=A, beta=beta, identity_verified=beta * beta == A * alpha)
        self.emit(DecompositionSerializer(result).data)
