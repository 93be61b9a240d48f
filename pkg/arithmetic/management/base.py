from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from rest_framework.renderers import JSONRenderer

from arithmetic.exceptions import (
    ConstructionError,
    FieldMismatchError,
    NonIntegralError,
    NotSquareFreeError,
)
from arithmetic.qfield import QuadElem

USAGE_ERRORS = (
    ValueError,
    FieldMismatchError,
    NotSquareFreeError,
    NonIntegralError,
    ConstructionError,
)
# UndecidableComparisonError, PrecisionCapExceededError, IdentityCheckError and
# anything else that went wrong in the arithmetic itself.
NUMERIC_ERRORS = (ArithmeticError,)

EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC_FAILURE = 3


class JsonCommand(BaseCommand):
    """Base for commands that print (or write) a JSON document"""

    def render(self, data) -> str:
        return JSONRenderer().render(data, renderer_context={'indent': 2}).decode()

    def emit(self, data, output: str = None):
        text = self.render(data)
        if output:
            Path(output).write_text(text + '\n')
            self.stderr.write(f"Wrote {output}")
        else:
            self.stdout.write(text)

    def usage_error(self, exc: Exception) -> CommandError:
        return CommandError(str(exc), returncode=EXIT_USAGE)

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except USAGE_ERRORS as exc:
            raise self.usage_error(exc) from exc
        except NUMERIC_ERRORS as exc:
            raise CommandError(f"numeric failure: {exc}", returncode=EXIT_NUMERIC_FAILURE) from exc

    # Shared argument handling for commands that take an element of Q[sqrt(D)].

    def add_alpha_arguments(self, parser):
        parser.add_argument('--alpha', required=True, help='Element of Q[sqrt(D)], e.g. "3+2*sqrt(2)"')
        parser.add_argument('--D', type=int, required=True, help='Square-free D >= 2')

    def parse_alpha(self, options):
        return QuadElem.parse(options['alpha'], options['D'])

    def run_task(self, task, *args):
        """Run a Celery task; returns its result, or None once queued on a worker"""
        result = task.delay(*args)
        if result.ready():
            return result.get()
        self.stdout.write(self.style.SUCCESS(f"Queued task {result.id}"))
        return None
