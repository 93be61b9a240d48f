"""
Divisibility decompositions of traces of powers.

For an algebraic integer omega and a square-free L the trace of omega^L
splits as Phi_L(omega) * Psi_L(omega), where Phi_L is the Mobius-signed product
of the traces of omega^(L/l) over the divisors l of L. The twisted trace
(omega - conj(omega)) * sqrt(D) splits the same way for any square-free L.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from mpmath.libmp import MPZ
from sympy import Poly, cyclotomic_poly, factorint, symbols

from .exceptions import ConstructionError, NonExactDivisionError, NonIntegralError
from .numtheory import euler_phi, mobius, squarefree_divisors
from .qfield import GUARD_BITS, Ordering, PowerProduct, QuadElem, compare_abs, interval_bounds, iv_precision

logger = logging.getLogger(__name__)

MAGNITUDE_LOG_BOUND = 2
MAGNITUDE_PRECISION_BITS = 128


def _require_integral(omega: QuadElem):
    if not omega.is_integral().is_integral:
        raise NonIntegralError(f"{omega} is not an algebraic integer")


def trace_power(omega: QuadElem, k: int) -> int:
    """tr(omega^k) as an exact integer"""
    _require_integral(omega)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return int(omega.pow_int(k).trace())


def twisted_trace_power(omega: QuadElem, k: int) -> int:
    """(omega^k - conj(omega)^k) * sqrt(D) as an exact integer"""
    _require_integral(omega)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return int(omega.pow_int(k).twisted_trace())


@dataclass(frozen=True)
class TraceFactorization:
    omega: QuadElem
    L: int
    total: int
    phi_part: int
    psi_part: int
    twisted: bool

    def __post_init__(self):
        if self.phi_part * self.psi_part != self.total:
            raise NonExactDivisionError(f"Phi * Psi != total for L={self.L}")

    @property
    def split(self) -> Tuple[int, int]:
        return self.phi_part, self.psi_part


def _exact_div(numerator, denominator, what: str):
    if denominator == 0:
        raise NonExactDivisionError(f"zero trace in the denominator of {what}")
    quotient, remainder = divmod(numerator, denominator)
    if remainder:
        raise NonExactDivisionError(f"{what} is not an exact quotient")
    return quotient


def phi_psi(omega: QuadElem, L: int, twisted: bool = False) -> TraceFactorization:
    """Split tr(omega^L) (or its twisted analogue) as Phi_L * Psi_L"""
    _require_integral(omega)
    if L < 1 or any(e > 1 for e in factorint(L).values()):
        raise ValueError(f"L must be a square-free positive integer, got {L}")
    if twisted:
        if omega.is_rational:
            raise ConstructionError("the twisted trace of a rational element vanishes")
        value = lambda k: omega.pow_int(k).twisted_trace()
    else:
        if L % 2 == 0:
            raise ValueError(f"untwisted factorization needs odd L, got {L}")
        if omega.trace() == 0:
            raise ConstructionError(f"tr({omega}) = 0")
        value = lambda k: omega.pow_int(k).trace()

    numerator, denominator = MPZ(1), MPZ(1)
    total = None
    for ell in squarefree_divisors(L):
        term = MPZ(int(value(L // ell)))
        if ell == 1:
            total = term
        if mobius(ell) == 1:
            numerator *= term
        else:
            denominator *= term

    kind = 'twisted ' if twisted else ''
    phi_part = _exact_div(numerator, denominator, f"{kind}Phi_{L}")
    psi_part = _exact_div(total, phi_part, f"{kind}Psi_{L}")
    return TraceFactorization(
        omega=omega,
        L=L,
        total=int(total),
        phi_part=int(phi_part),
        psi_part=int(psi_part),
        twisted=twisted,
    )



def cyclotomic_value(omega: QuadElem, L: int, twisted: bool = False) -> int:
    """
    Value of the homogenized reflected cyclotomic polynomial at (omega, conj(omega)).

    This is Phi_{2L} for the untwisted split and Phi_L for the twisted one,
    evaluated directly from the polynomial's coefficients.
    """
    if twisted and L == 1:
        return int(omega.twisted_trace())
    order = L if twisted else 2 * L
    t = symbols('t')
    coeffs = [int(c) for c in Poly(cyclotomic_poly(order, t), t).all_coeffs()]
    degree = len(coeffs) - 1
    x, y = omega, omega.conjugate()
    result = omega.field.element(0)
    for i, c in enumerate(coeffs):
        if c:
            result = result + c * x.pow_int(degree - i) * y.pow_int(i)
    if not result.is_rational or result.u.denominator != 1:
        raise NonExactDivisionError(f"cyclotomic value of order {order} is not an integer")
    return int(result.u)


@dataclass(frozen=True)
class MagnitudeReport:
    """Log-ratios of |Phi| and |Psi| against their predicted sizes"""

    fact: TraceFactorization
    phi_log_ratio: Tuple[float, float]
    psi_log_ratio: Tuple[float, float]
    phi_ok: bool
    psi_ok: bool
    precision_bits: int

    @property
    def passed(self) -> bool:
        return self.phi_ok and self.psi_ok


def _log_ratio(value: PowerProduct, predicted: PowerProduct, bits: int):
    with iv_precision(bits + GUARD_BITS):
        return interval_bounds(value.log_abs(bits) - predicted.log_abs(bits))


def magnitude_bounds(fact: TraceFactorization, precision_bits: int = MAGNITUDE_PRECISION_BITS) -> MagnitudeReport:
    """Check e^-2 <= |Phi| / |omega|^phi(L) <= e^2 and the matching bound for Psi"""
    omega = fact.omega
    ratio = PowerProduct.of((omega.conjugate(), 1), (omega, -1))
    if compare_abs(ratio, Fraction(1, 2)) is Ordering.GT:
        raise ConstructionError(f"|conj(omega)/omega| > 1/2 for omega = {omega}")
    if fact.twisted and fact.L == 1:
        raise ConstructionError("twisted magnitude bounds need L > 1")

    phi_L = euler_phi(fact.L)
    phi_predicted = PowerProduct.of((omega, phi_L))
    psi_predicted = PowerProduct.of((omega, fact.L - phi_L))
    if fact.twisted:
        psi_predicted = psi_predicted * PowerProduct.of((Fraction(omega.field.D), Fraction(1, 2)))

    phi_lo, phi_hi = _log_ratio(PowerProduct.of((Fraction(fact.phi_part), 1)), phi_predicted, precision_bits)
    psi_lo, psi_hi = _log_ratio(PowerProduct.of((Fraction(fact.psi_part), 1)), psi_predicted, precision_bits)
    report = MagnitudeReport(
        fact=fact,
        phi_log_ratio=(float(phi_lo), float(phi_hi)),
        psi_log_ratio=(float(psi_lo), float(psi_hi)),
        phi_ok=-MAGNITUDE_LOG_BOUND <= phi_lo and phi_hi <= MAGNITUDE_LOG_BOUND,
        psi_ok=-MAGNITUDE_LOG_BOUND <= psi_lo and psi_hi <= MAGNITUDE_LOG_BOUND,
        precision_bits=precision_bits,
    )
    if not report.passed:
        logger.warning(f"Magnitude bounds failed for L={fact.L}: {report.phi_log_ratio}, {report.psi_log_ratio}")
    return report
