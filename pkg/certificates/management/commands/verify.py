import json
from pathlib import Path

from django.core.management.base import CommandError
from rest_framework.exceptions import ValidationError

from arithmetic.management.base import EXIT_VERIFICATION_FAILED, JsonCommand
from arithmetic.qfield import QuadElem
from certificates.serializers import CertificateSerializer, VerificationReportSerializer
from certificates.verification import verify_certificate


class Command(JsonCommand):
    help = "Re-verify certificates from a JSON file (one certificate or a list)"

    def add_arguments(self, parser):
        parser.add_argument('--cert', required=True, help='Certificate JSON file')
        parser.add_argument('--alpha', help='Also require the certificate to be for this alpha')
        parser.add_argument('--output', help='Write the report to this file instead of stdout')

    def load(self, path: str):
        try:
            document = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise self.usage_error(exc) from exc
        documents = document if isinstance(document, list) else [document]
        certificates = []
        for item in documents:
            serializer = CertificateSerializer(data=item)
            try:
                serializer.is_valid(raise_exception=True)
            except ValidationError as exc:
                raise self.usage_error(ValueError(f"Invalid certificate: {exc.detail}")) from exc
            certificates.append(serializer.save())
        return certificates, isinstance(document, list)

    def handle(self, *args, **options):
        certificates, many = self.load(options['cert'])
        reports = []
        for cert in certificates:
            alpha = None
            if options['alpha']:
                alpha = QuadElem.parse(options['alpha'], cert.D)
            reports.append(verify_certificate(cert, alpha))

        data = VerificationReportSerializer(reports, many=True).data
        self.emit(data if many else data[0], options['output'])

        failed = [report.failures for report in reports if not report.passed]
        if failed:
            raise CommandError(f"Verification failed: {failed}", returncode=EXIT_VERIFICATION_FAILED)
