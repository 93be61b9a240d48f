import sys

from django.apps import AppConfig


class ArithmeticConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'arithmetic'
    verbose_name = 'Quadratic field arithmetic'

    def ready(self):
        # Certificates carry integers with millions of digits.
        if hasattr(sys, 'set_int_max_str_digits'):
            sys.set_int_max_str_digits(0)
