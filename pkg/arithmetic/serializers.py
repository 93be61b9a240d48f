import re
from fractions import Fraction

import mpmath
from mpmath.libmp import MPZ
from rest_framework import serializers

_INTEGER_TEXT = re.compile(r'^-?[0-9]+$')


class DecimalIntegerField(serializers.Field):
    """Arbitrary-size integer carried as a decimal string"""

    default_error_messages = {
        'invalid': 'A decimal integer (string or number) is required.',
    }

    def to_representation(self, value):
        return str(MPZ(int(value)))

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail('invalid')
        if isinstance(data, int):
            return data
        if isinstance(data, str) and _INTEGER_TEXT.match(data.strip()):
            return int(MPZ(data.strip()))
        self.fail('invalid')


class RationalField(serializers.CharField):
    """Rational number as 'p/q' or a decimal string"""

    def to_representation(self, value):
        return str(value)

    def to_internal_value(self, data):
        text = super().to_internal_value(data)
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise serializers.ValidationError(f"'{text}' is not a rational number")


def hex_float(value: mpmath.mpf) -> str:
    """Exact binary text of an mpf: sign, hex mantissa, power of two"""
    man, exp = value.man_exp
    man, exp = int(man), int(exp)
    sign = '-' if man < 0 else ''
    return f"{sign}0x{abs(man):x}p{exp}"


class EnclosureSerializer(serializers.Serializer):
    """An outward-rounded real enclosure [lo, hi] at a working precision"""

    lo = serializers.CharField()
    hi = serializers.CharField()
    approx = serializers.CharField()
    precision_bits = serializers.IntegerField(min_value=1)

    @staticmethod
    def from_bounds(lo: mpmath.mpf, hi: mpmath.mpf, precision_bits: int) -> dict:
        with mpmath.workprec(precision_bits):
            mid = (lo + hi) / 2
        return {
            'lo': hex_float(lo),
            'hi': hex_float(hi),
            'approx': mpmath.nstr(mid, 17),
            'precision_bits': precision_bits,
        }


class PellSolutionSerializer(serializers.Serializer):
    x = DecimalIntegerField()
    y = DecimalIntegerField()
    D = DecimalIntegerField()
    norm = serializers.IntegerField()


class PrimeBlockSerializer(serializers.Serializer):
    primes = serializers.ListField(child=serializers.IntegerField(min_value=2))
    product = DecimalIntegerField()
    ratio = RationalField(source='totient_ratio')


class BlockPairSerializer(serializers.Serializer):
    L = PrimeBlockSerializer()
    Lprime = PrimeBlockSerializer(source='Lp')
    eps = RationalField()
