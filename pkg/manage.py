#!/usr/bin/env python
"""Django's command-line utility, and the quadapprox CLI entry point."""
import os
import sys


def main(argv=None) -> int:
    """
    Run a management command and return its exit code: 0 on success,
    1 when a certificate fails verification, 2 on a usage error, 3 when
    the arithmetic itself fails (precision cap, broken identity).

    Hyphenated names such as `select-primes` map to their command modules.
    """
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'quadapprox.settings')
    try:
        import django
        from django.core.management import execute_from_command_line, get_commands
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc

    django.setup()

    argv = list(sys.argv if argv is None else argv)
    if len(argv) > 1 and not argv[1].startswith('-'):
        argv[1] = argv[1].replace('-', '_')
        if argv[1] != 'help' and argv[1] not in get_commands():
            sys.stderr.write(f"Unknown command: {argv[1]!r}\n")
            return 2
    try:
        execute_from_command_line(argv)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
