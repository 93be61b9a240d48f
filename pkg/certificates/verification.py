"""
Independent certificate verifier.

Nothing here calls the builders: every claim is re-checked from P, Q, their
splits and the stored parameters. Failed checks are recorded in the report,
never raised.
"""
import logging
import math
from fractions import Fraction

from arithmetic.conf import get_setting
from arithmetic.qfield import (
    Ordering,
    PowerProduct,
    QuadElem,
    compare_abs,
    eval_interval,
    interval_bounds,
    iv_precision,
    log2_interval,
)
from arithmetic.serializers import EnclosureSerializer

from .records import ApproxCertificate, ConstructionParams, Mode, VerificationReport

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
SPLIT_LOG_CONSTANT = -4
STRONG_LOG_CONSTANT = 2
RESOURCE_SLACK_BITS = 64


def resource_bound_bits(params: ConstructionParams) -> int:
    """Largest bit-size any integer of a certificate with these parameters may have"""
    zeta_bits = log2_interval(params.zeta)[1]
    alpha_bits = log2_interval(abs(params.alpha_int) + 2)[1]
    D_bits = math.log2(params.alpha.field.D)
    return math.ceil(params.N * zeta_bits + (params.M + 1) * alpha_bits + D_bits) + RESOURCE_SLACK_BITS


def approximation_error(alpha_int: QuadElem, P: int, Q: int) -> QuadElem:
    """alpha_int * Q - P as an exact field element"""
    return alpha_int * Q - P


def error_enclosure(alpha_int: QuadElem, P: int, Q: int, precision_bits: int = None) -> dict:
    """|alpha_int * Q - P| as a decimal-free enclosure"""
    bits = precision_bits or get_setting('QA_DEFAULT_PRECISION_BITS', 192)
    with iv_precision(bits):
        magnitude = abs(eval_interval(approximation_error(alpha_int, P, Q), bits))
    lo, hi = interval_bounds(magnitude)
    return EnclosureSerializer.from_bounds(lo, hi, bits)


def split_exponent(params: ConstructionParams, side: str) -> Fraction:
    """Exponent g in min(d1, d2) >> |X|^g for side 'P' or 'Q'"""
    if params.mode is Mode.STRONG:
        return HALF
    block = params.L if side == 'P' else params.Lprime
    return HALF if block == 2 else HALF - params.eps


def strong_small_n(params: ConstructionParams) -> bool:
    """True while |conj(beta zeta^n) / (beta zeta^n)| > 1/2"""
    omega = params.beta * params.zeta.pow_int(params.n)
    ratio = PowerProduct.of((omega.conjugate(), 1), (omega, -1))
    return compare_abs(ratio, HALF) is Ordering.GT


def _within(value: PowerProduct, low: Fraction, high: Fraction) -> bool:
    return compare_abs(value, high) is Ordering.LT and compare_abs(value, low) is Ordering.GT


def _check_sizes(cert: ApproxCertificate, report: VerificationReport) -> bool:
    bound = resource_bound_bits(cert.params)
    sizes = [abs(x).bit_length() for x in (cert.P, cert.Q, *cert.P_split, *cert.Q_split)]
    ok = max(sizes) <= bound
    report.record('size', ok, f"largest integer {max(sizes)} bits, bound {bound}")
    return ok


def _check_split_products(cert: ApproxCertificate, report: VerificationReport):
    d1, d2 = cert.P_split
    e1, e2 = cert.Q_split
    ok = d1 * d2 == cert.P and e1 * e2 == cert.Q and cert.P != 0 and cert.Q != 0
    report.record('split_product', ok, '' if ok else "P_split or Q_split does not multiply out")


def _check_approximation(cert: ApproxCertificate, report: VerificationReport):
    params = cert.params
    alpha_int = params.alpha_int
    error = approximation_error(alpha_int, cert.P, cert.Q)
    if params.mode is Mode.STRONG:
        expected = Fraction(1)
        # C = e^2 * D * |alpha - conj(alpha)|
        bound = PowerProduct.exp(STRONG_LOG_CONSTANT) * PowerProduct.of(
            (params.alpha.field.D, 1),
            (alpha_int - alpha_int.conjugate(), 1),
            (cert.Q, -1),
        )
        detail = "|alpha Q - P| <= e^2 D |alpha - conj(alpha)| / |Q|"
    else:
        expected = 1 - params.eps
        bound = PowerProduct.of((cert.Q, -expected))
        detail = f"|alpha Q - P| <= |Q|^-{expected}"
    if cert.claimed_exponent != expected:
        report.record('approx', False, f"claimed exponent {cert.claimed_exponent}, construction gives {expected}")
        return
    ok = compare_abs(error, bound) is Ordering.LT
    report.record('approx', ok, detail)
    report.error_bound = error_enclosure(alpha_int, cert.P, cert.Q)


def _check_split(cert: ApproxCertificate, report: VerificationReport, side: str, skip: bool):
    name = f"split_{side}"
    if skip:
        report.record(name, True, "magnitude bounds skipped below the small-n threshold", skipped=True)
        return
    total, (d1, d2) = (cert.P, cert.P_split) if side == 'P' else (cert.Q, cert.Q_split)
    exponent = split_exponent(cert.params, side)
    smallest = min(abs(d1), abs(d2))
    bound = PowerProduct.exp(SPLIT_LOG_CONSTANT) * PowerProduct.of(
        (cert.params.alpha.field.D, Fraction(-1, 4)),
        (total, exponent),
    )
    ok = smallest != 0 and compare_abs(smallest, bound) is Ordering.GT
    report.record(name, ok, f"min split >= e^-4 D^-1/4 |{side}|^{exponent}")


def _check_q_magnitude(cert: ApproxCertificate, report: VerificationReport):
    params = cert.params
    D = params.alpha.field.D
    if params.mode is Mode.STRONG:
        ratio = PowerProduct.of((cert.Q, 1), (params.zeta, -params.N), (D, -HALF))
    else:
        ratio = PowerProduct.of((cert.Q, 1), (params.alpha_int, -params.M), (params.zeta, -params.N))
        if params.mode.twisted:
            ratio = ratio * PowerProduct.of((D, -HALF))
    ok = _within(ratio, HALF, Fraction(2))
    report.record('q_magnitude', ok, "|Q| / predicted size in [1/2, 2]")


def verify_certificate(cert: ApproxCertificate, alpha: QuadElem = None) -> VerificationReport:
    """Re-check a certificate from scratch; the report says which checks failed"""
    report = VerificationReport()
    params = cert.params

    if alpha is not None and alpha != params.alpha:
        report.record('alpha', False, f"certificate is for {params.alpha}, not {alpha}")

    errors = params.consistency_errors()
    report.record('params', not errors, '; '.join(errors))
    if errors:
        logger.warning(f"Certificate parameters inconsistent: {errors}")
        return report

    report.induced_P, report.induced_Q = cert.induced_pair
    report.induced_Q_split = cert.induced_Q_split

    try:
        if not _check_sizes(cert, report):
            logger.warning("Certificate integers exceed the resource bound; skipping numeric checks")
            return report
        _check_split_products(cert, report)
        _check_approximation(cert, report)
        skip = params.mode is Mode.STRONG and strong_small_n(params)
        _check_split(cert, report, 'P', skip)
        _check_split(cert, report, 'Q', skip)
        _check_q_magnitude(cert, report)
    except (ArithmeticError, ValueError) as exc:
        report.record('numeric', False, str(exc))

    if report.passed:
        logger.info(f"Certificate for {params.alpha} ({params.mode.value}, n={params.n}) verified")
    else:
        logger.warning(f"Certificate verification failed: {report.failures}")
    return report
