from django.core.management.base import CommandError

from arithmetic.management.base import EXIT_VERIFICATION_FAILED, JsonCommand
from certificates.tasks import strong_sequence_task


class Command(JsonCommand):
    help = "Strongly evenly divisible approximations of alpha in Q_+ * (K^x)^2 for a range of n"

    def add_arguments(self, parser):
        self.add_alpha_arguments(parser)
        parser.add_argument('--n-from', type=int, default=1)
        parser.add_argument('--n-to', type=int, default=None, help='Defaults to --n-from')
        parser.add_argument('--norm', type=int, default=1, choices=[1, -1], help='Norm of the Pell unit zeta')
        parser.add_argument('--output', help='Write the certificates to this file instead of stdout')
        parser.add_argument('--background', action='store_true', help='Run through the Celery task queue')

    def handle(self, *args, **options):
        self.parse_alpha(options)
        n_from = options['n_from']
        n_to = options['n_to'] if options['n_to'] is not None else n_from
        if n_from < 1 or n_to < n_from:
            raise ValueError(f"need 1 <= n-from <= n-to, got {n_from}..{n_to}")

        task_args = (options['alpha'], options['D'], n_from, n_to, options['norm'])
        if options['background']:
            certificates = self.run_task(strong_sequence_task, *task_args)
            if certificates is None:
                return
        else:
            certificates = strong_sequence_task(*task_args)

        # A single n prints a bare certificate so it can be fed straight to verify.
        self.emit(certificates[0] if n_from == n_to else certificates, options['output'])

        failed = [cert['params']['n'] for cert in certificates if not all(cert['checks'].values())]
        if failed:
            raise CommandError(f"Certificates failed checks for n = {failed}", returncode=EXIT_VERIFICATION_FAILED)
