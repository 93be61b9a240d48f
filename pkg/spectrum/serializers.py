import mpmath
from rest_framework import serializers

from arithmetic.serializers import EnclosureSerializer

from .services import GapRecord, ProfileRow, SpectrumLevel

CSV_COLUMNS = ('N', 'delta_min', 'i', 'm1', 'n1', 'm2', 'n2', 'lambda_i', 'lambda_next')


def scaled_enclosure(lo: int, hi: int, bits: int) -> dict:
    """Enclosure of [lo, hi] / 2**bits with exact hex endpoints"""
    with mpmath.workprec(max(bits, hi.bit_length()) + 16):
        mid = mpmath.ldexp(mpmath.mpf(lo + hi), -bits - 1)
        approx = mpmath.nstr(mid, 20)
    return {
        'lo': f"0x{lo:x}p-{bits}" if lo >= 0 else f"-0x{-lo:x}p-{bits}",
        'hi': f"0x{hi:x}p-{bits}" if hi >= 0 else f"-0x{-hi:x}p-{bits}",
        'approx': approx,
        'precision_bits': bits,
    }


def level_enclosure(level: SpectrumLevel) -> dict:
    return scaled_enclosure(level.lo, level.hi, level.bits)


def gap_enclosure(gap: GapRecord) -> dict:
    return scaled_enclosure(gap.lo, gap.hi, gap.bits)


class ProfileRowSerializer(serializers.Serializer):
    """One delta_min checkpoint; the gap columns are null for N = 1"""

    N = serializers.IntegerField()
    delta_min = EnclosureSerializer(allow_null=True)
    i = serializers.IntegerField(allow_null=True)
    m1 = serializers.IntegerField(allow_null=True)
    n1 = serializers.IntegerField(allow_null=True)
    m2 = serializers.IntegerField(allow_null=True)
    n2 = serializers.IntegerField(allow_null=True)
    lambda_i = EnclosureSerializer(allow_null=True)
    lambda_next = EnclosureSerializer(allow_null=True)

    @staticmethod
    def flatten(row: ProfileRow) -> dict:
        gap = row.gap
        if gap is None:
            return {'N': row.N, **{column: None for column in CSV_COLUMNS[1:]}}
        (m1, n1), (m2, n2) = gap.pair
        return {
            'N': row.N,
            'delta_min': gap_enclosure(gap),
            'i': gap.index,
            'm1': m1,
            'n1': n1,
            'm2': m2,
            'n2': n2,
            'lambda_i': level_enclosure(gap.lower),
            'lambda_next': level_enclosure(gap.upper),
        }


def csv_row(data: dict) -> list:
    """CSV cells for a serialized profile row; reals as decimal approximations"""
    cells = []
    for column in CSV_COLUMNS:
        value = data[column]
        if value is None:
            cells.append('')
        elif isinstance(value, dict):
            cells.append(value['approx'])
        else:
            cells.append(value)
    return cells
