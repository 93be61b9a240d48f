from django.core.management.base import CommandError

from arithmetic.management.base import EXIT_VERIFICATION_FAILED, JsonCommand
from certificates.construct import construct
from certificates.explain import explain_certificate
from certificates.records import Mode
from certificates.serializers import CertificateSerializer
from certificates.tasks import build_certificate_task


class Command(JsonCommand):
    help = "Build and self-verify an evenly divisible approximation P/Q of alpha"

    def add_arguments(self, parser):
        self.add_alpha_arguments(parser)
        parser.add_argument('--eps', required=True, help='Rational in (0, 1/2), e.g. 1/4')
        parser.add_argument(
            '--mode',
            default=Mode.SYMMETRIC.value,
            choices=[Mode.SYMMETRIC.value, Mode.TWISTED_P.value, Mode.TWISTED_Q.value],
        )
        parser.add_argument('--norm', type=int, default=1, choices=[1, -1], help='Norm of the Pell unit zeta')
        parser.add_argument('--explain', action='store_true', help='Describe the construction on stderr')
        parser.add_argument('--output', help='Write the certificate to this file instead of stdout')
        parser.add_argument('--background', action='store_true', help='Run through the Celery task queue')

    def handle(self, *args, **options):
        alpha = self.parse_alpha(options)

        if options['background']:
            if options['explain']:
                raise self.usage_error(ValueError("--explain cannot be combined with --background"))
            data = self.run_task(
                build_certificate_task, options['alpha'], options['D'], options['eps'],
                options['mode'], options['norm'],
            )
            if data is None:
                return
            self.emit(data, options['output'])
            if not all(data.get('checks', {}).values()):
                raise CommandError("Certificate failed self-verification", returncode=EXIT_VERIFICATION_FAILED)
            return

        cert = construct(alpha, options['eps'], options['mode'], options['norm'])
        if options['explain']:
            for line in explain_certificate(cert):
                self.stderr.write(line)
        self.emit(CertificateSerializer(cert).data, options['output'])
        if not cert.verified:
            failed = [name for name, ok in cert.checks.items() if not ok]
            raise CommandError(f"Certificate failed checks: {failed}", returncode=EXIT_VERIFICATION_FAILED)
