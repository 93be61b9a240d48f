import csv
import io
from pathlib import Path

from arithmetic.management.base import JsonCommand
from spectrum.serializers import CSV_COLUMNS, csv_row
from spectrum.tasks import min_gap_profile_task


def parse_checkpoints(text: str):
    try:
        return [int(part) for part in text.replace(' ', '').split(',') if part]
    except ValueError:
        raise ValueError(f"--checkpoints must be a comma-separated list of integers, got {text!r}")


class Command(JsonCommand):
    help = "delta_min(N) of the spectrum {alpha m^2 + n^2} at a list of checkpoints"

    def add_arguments(self, parser):
        self.add_alpha_arguments(parser)
        parser.add_argument('--levels', type=int, help='Number of levels N; defaults to the last checkpoint')
        parser.add_argument('--checkpoints', help='Comma-separated increasing N values, e.g. 100,1000,10000')
        parser.add_argument('--precision-bits', type=int, default=None, help='Starting precision of the level enclosures')
        parser.add_argument('--format', choices=['json', 'csv'], default='json')
        parser.add_argument('--weyl', action='store_true', help='Report lambda_N * pi / (4 sqrt(alpha) N)')
        parser.add_argument('--workers', type=int, default=None, help='Threads generating partitions of the m-range')
        parser.add_argument('--output', help='Write the profile to this file instead of stdout')
        parser.add_argument('--background', action='store_true', help='Run through the Celery task queue')

    def checkpoints(self, options):
        levels = options['levels']
        checkpoints = parse_checkpoints(options['checkpoints']) if options['checkpoints'] else []
        if levels is None and not checkpoints:
            raise ValueError("give --levels, --checkpoints or both")
        if levels is not None:
            if any(N > levels for N in checkpoints):
                raise ValueError(f"checkpoints {checkpoints} go beyond --levels {levels}")
            if not checkpoints or checkpoints[-1] != levels:
                checkpoints.append(levels)
        return checkpoints

    def handle(self, *args, **options):
        alpha = self.parse_alpha(options)
        checkpoints = self.checkpoints(options)
        if options['workers'] is not None and options['workers'] < 1:
            raise ValueError("--workers must be at least 1")

        task_args = (options['alpha'], options['D'], checkpoints, options['precision_bits'], options['workers'])
        if options['background']:
            result = self.run_task(min_gap_profile_task, *task_args)
            if result is None:
                return
        else:
            result = min_gap_profile_task(*task_args)

        if options['format'] == 'csv':
            self.emit_csv(result['rows'], options['output'])
            if options['weyl']:
                self.stderr.write(f"weyl_ratio {result['weyl_ratio']}")
            return

        data = {
            'alpha': str(alpha),
            'D': str(alpha.field.D),
            'levels': checkpoints[-1],
            'rows': result['rows'],
        }
        if options['weyl']:
            data['weyl_ratio'] = result['weyl_ratio']
        self.emit(data, options['output'])

    def emit_csv(self, rows, output=None):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(csv_row(row))
        text = buffer.getvalue()
        if output:
            Path(output).write_text(text)
            self.stderr.write(f"Wrote {output}")
        else:
            self.stdout.write(text, ending='')
