from sympy import factorint
from rest_framework import serializers

from arithmetic.exceptions import FieldMismatchError, NotSquareFreeError
from arithmetic.numtheory import PrimeBlock
from arithmetic.qfield import QuadElem, field_for
from arithmetic.serializers import DecimalIntegerField, EnclosureSerializer, RationalField

from .records import ApproxCertificate, ConstructionParams, Mode


class QuadElemField(serializers.CharField):
    """Canonical text of a field element; parsed against D in the parent's validate()"""

    def to_representation(self, value):
        return str(value)


class ParamsSerializer(serializers.Serializer):
    L = DecimalIntegerField()
    Lprime = DecimalIntegerField()
    M = DecimalIntegerField()
    m1 = DecimalIntegerField()
    m2 = DecimalIntegerField()
    n = DecimalIntegerField()
    N = DecimalIntegerField()

    def _check_block(self, value):
        if value < 1 or any(e > 1 for e in factorint(value).values()):
            raise serializers.ValidationError("Block products must be square-free positive integers")
        return value

    def validate_L(self, value):
        return self._check_block(value)

    def validate_Lprime(self, value):
        return self._check_block(value)


def _pair():
    return serializers.ListField(child=DecimalIntegerField(), min_length=2, max_length=2)


class CertificateSerializer(serializers.Serializer):
    """JSON form of an ApproxCertificate; all integers are decimal strings"""

    alpha = QuadElemField()
    D = DecimalIntegerField()
    A = DecimalIntegerField()
    mode = serializers.ChoiceField(choices=[mode.value for mode in Mode])
    zeta = QuadElemField()
    beta = QuadElemField(required=False, allow_null=True)
    params = ParamsSerializer()
    P = DecimalIntegerField()
    P_split = _pair()
    Q = DecimalIntegerField()
    Q_split = _pair()
    eps = RationalField()
    claimed_exponent = RationalField()
    error_bound = EnclosureSerializer(required=False, allow_null=True)
    flags = serializers.ListField(child=serializers.CharField(), required=False)
    checks = serializers.DictField(child=serializers.BooleanField(), required=False)

    def validate(self, attrs):
        D = attrs['D']
        try:
            field_for(D)
            for name in ('alpha', 'zeta', 'beta'):
                if attrs.get(name) is not None:
                    attrs[name] = QuadElem.parse(attrs[name], D)
        except (FieldMismatchError, NotSquareFreeError, ValueError) as exc:
            raise serializers.ValidationError(str(exc))
        if attrs['mode'] == Mode.STRONG.value and attrs.get('beta') is None:
            raise serializers.ValidationError("Strong certificates need beta")
        return attrs

    def create(self, validated_data):
        p = validated_data['params']
        alpha = validated_data['alpha']
        A = validated_data['A']
        params = ConstructionParams(
            alpha=alpha,
            A=A,
            alpha_int=A * alpha,
            zeta=validated_data['zeta'],
            eps=validated_data['eps'],
            L_block=PrimeBlock(tuple(factorint(p['L']))),
            Lp_block=PrimeBlock(tuple(factorint(p['Lprime']))),
            M=p['M'],
            m1=p['m1'],
            m2=p['m2'],
            n=p['n'],
            N=p['N'],
            mode=Mode(validated_data['mode']),
            beta=validated_data.get('beta'),
        )
        return ApproxCertificate(
            params=params,
            P=validated_data['P'],
            Q=validated_data['Q'],
            P_split=tuple(validated_data['P_split']),
            Q_split=tuple(validated_data['Q_split']),
            claimed_exponent=validated_data['claimed_exponent'],
            error_bound=validated_data.get('error_bound'),
            flags=tuple(validated_data.get('flags', ())),
            checks=dict(validated_data.get('checks', {})),
        )


class CheckResultSerializer(serializers.Serializer):
    passed = serializers.BooleanField()
    detail = serializers.CharField(allow_blank=True)
    skipped = serializers.BooleanField()


class VerificationReportSerializer(serializers.Serializer):
    passed = serializers.BooleanField()
    checks = serializers.DictField(child=CheckResultSerializer())
    induced_P = DecimalIntegerField(allow_null=True)
    induced_Q = DecimalIntegerField(allow_null=True)
    induced_Q_split = serializers.ListField(child=DecimalIntegerField(), allow_null=True)
    error_bound = EnclosureSerializer(allow_null=True)


class DecompositionSerializer(serializers.Serializer):
    alpha = QuadElemField()
    D = DecimalIntegerField()
    in_square_class = serializers.BooleanField()
    A = DecimalIntegerField(allow_null=True)
    beta = QuadElemField(allow_null=True)
    identity_verified = serializers.BooleanField()
