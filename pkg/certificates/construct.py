"""
Builders for evenly divisible approximations P/Q of a quadratic irrational.

All constructions work with alpha_int = A * alpha, an algebraic integer, and a
unit zeta from the Pell equation:

* symmetric: P = tr(alpha^(M+1) zeta^N) and Q = tr(alpha^M zeta^N), split
  through the trace factorizations with disjoint odd prime blocks L, L'.
* twisted: the same with twisted traces, one side using the block L = 2.
* strong: for alpha in Q_+ * (K^x)^2, P_n and Q_n are twisted traces of
  squares and split as (x - y)(x + y).
"""
import logging
from dataclasses import replace
from fractions import Fraction
from math import isqrt
from typing import List, Optional, Tuple, Union

from sympy import factorint

from arithmetic.conf import get_setting
from arithmetic.exceptions import ConstructionError, IdentityCheckError
from arithmetic.numtheory import PrimeBlock, check_eps, crt_smallest_M, select_block, select_blocks
from arithmetic.pell import unit_zeta
from arithmetic.qfield import Ordering, PowerProduct, QuadElem, compare_abs
from arithmetic.tracefact import phi_psi

from .records import ApproxCertificate, ConstructionParams, Mode
from .verification import verify_certificate

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
GROWTH_LOG_BOUND = 2


def prepare_alpha(alpha: QuadElem) -> Tuple[int, QuadElem]:
    """Validate alpha and return (A, A * alpha) with A * alpha integral"""
    if alpha.is_rational:
        raise ConstructionError(f"alpha = {alpha} is rational")
    if alpha.sign() <= 0:
        raise ConstructionError(f"alpha = {alpha} is not positive")
    return alpha.clear_denominator()


def inequalities_hold(alpha_int: QuadElem, zeta: QuadElem, eps: Fraction, L: int, Lp: int,
                      M: int, m1: int, m2: int, n: int, twisted: bool = False) -> bool:
    """
    The three conditions on n:

        |zeta/conj(zeta)|^(n L')  > 2 |conj(alpha)/alpha|^m1
        |zeta/conj(zeta)|^(n L)   > 2 |conj(alpha)/alpha|^m2
        |zeta|^(eps N)            > c |alpha - conj(alpha)| |N(alpha)|^M |alpha|^(-eps M)

    with c = 4 (c = 4D for twisted traces).
    """
    zeta_bar, alpha_bar = zeta.conjugate(), alpha_int.conjugate()
    for exponent, m in ((n * Lp, m1), (n * L, m2)):
        left = PowerProduct.of((zeta, exponent), (zeta_bar, -exponent))
        right = PowerProduct.of((2, 1), (alpha_bar, m), (alpha_int, -m))
        if compare_abs(left, right) is not Ordering.GT:
            return False

    N = n * L * Lp
    c = 4 * alpha_int.field.D if twisted else 4
    left = PowerProduct.of((zeta, eps * N))
    right = PowerProduct.of(
        (c, 1),
        (alpha_int - alpha_bar, 1),
        (alpha_int.norm(), M),
        (alpha_int, -eps * M),
    )
    return compare_abs(left, right) is Ordering.GT


def choose_n(alpha_int: QuadElem, zeta: QuadElem, eps: Fraction, L: int, Lp: int,
             M: int, m1: int, m2: int, twisted: bool = False) -> int:
    """Smallest n >= 1 satisfying inequalities_hold"""
    limit = get_setting('QA_CHOOSE_N_LIMIT', 10_000)
    for n in range(1, limit + 1):
        if inequalities_hold(alpha_int, zeta, eps, L, Lp, M, m1, m2, n, twisted):
            logger.info(f"Chose n={n} (N={n * L * Lp})")
            return n
    raise ConstructionError(f"no n <= {limit} satisfies the size conditions")


def _finalize(cert: ApproxCertificate) -> ApproxCertificate:
    report = verify_certificate(cert)
    cert = replace(cert, error_bound=report.error_bound, checks=report.summary())
    if report.passed:
        logger.info(f"Built {cert.mode} certificate: P has {cert.P.bit_length()} bits, Q has {cert.Q.bit_length()} bits")
    else:
        logger.error(f"Built {cert.mode} certificate fails verification: {report.failures}")
    return cert


def _even_construct(alpha: QuadElem, eps, mode: Mode, norm: int = 1) -> ApproxCertificate:
    eps = check_eps(eps)
    A, alpha_int = prepare_alpha(alpha)
    zeta = unit_zeta(alpha.field.D, norm)

    if mode is Mode.SYMMETRIC:
        blocks = select_blocks(eps)
        L_block, Lp_block = blocks.L, blocks.Lp
    elif mode is Mode.TWISTED_P:
        L_block, Lp_block = PrimeBlock.two(), select_block(eps)
    elif mode is Mode.TWISTED_Q:
        L_block, Lp_block = select_block(eps), PrimeBlock.two()
    else:
        raise ConstructionError(f"{mode.value} is not an evenly divisible construction")

    L, Lp = L_block.product, Lp_block.product
    M, m1, m2 = crt_smallest_M(L, Lp)
    n = choose_n(alpha_int, zeta, eps, L, Lp, M, m1, m2, twisted=mode.twisted)
    N = n * L * Lp

    omega_P = alpha_int.pow_int(m1) * zeta.pow_int(n * Lp)
    omega_Q = alpha_int.pow_int(m2) * zeta.pow_int(n * L)
    P_fact = phi_psi(omega_P, L, twisted=mode.twisted)
    Q_fact = phi_psi(omega_Q, Lp, twisted=mode.twisted)

    params = ConstructionParams(
        alpha=alpha,
        A=A,
        alpha_int=alpha_int,
        zeta=zeta,
        eps=eps,
        L_block=L_block,
        Lp_block=Lp_block,
        M=M,
        m1=m1,
        m2=m2,
        n=n,
        N=N,
        mode=mode,
        inequalities=(True, True, True),
    )
    cert = ApproxCertificate(
        params=params,
        P=P_fact.total,
        Q=Q_fact.total,
        P_split=P_fact.split,
        Q_split=Q_fact.split,
        claimed_exponent=1 - eps,
    )
    return _finalize(cert)


def symmetric_construct(alpha: QuadElem, eps, norm: int = 1) -> ApproxCertificate:
    """Trace construction with odd prime blocks on both sides"""
    return _even_construct(alpha, eps, Mode.SYMMETRIC, norm)


def twisted_construct(alpha: QuadElem, eps, two_side: str = 'P', norm: int = 1) -> ApproxCertificate:
    """Twisted-trace construction with the block L = 2 on `two_side` ('P' or 'Q')"""
    side = two_side.upper()
    if side == 'BOTH':
        raise ConstructionError("L = L' = 2 would need both M + 1 and M to be even")
    if side not in ('P', 'Q'):
        raise ConstructionError(f"two_side must be 'P' or 'Q', got {two_side!r}")
    return _even_construct(alpha, eps, Mode.TWISTED_P if side == 'P' else Mode.TWISTED_Q, norm)


def construct(alpha: QuadElem, eps, mode: Union[Mode, str] = Mode.SYMMETRIC, norm: int = 1) -> ApproxCertificate:
    mode = Mode(mode)
    if mode is Mode.SYMMETRIC:
        return symmetric_construct(alpha, eps, norm)
    if mode is Mode.STRONG:
        raise ConstructionError("use strong_sequence for the strong construction")
    return twisted_construct(alpha, eps, 'P' if mode is Mode.TWISTED_P else 'Q', norm)


# -- strong construction ------------------------------------------------------

def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def square_class_test(alpha: QuadElem) -> bool:
    """alpha in Q_+ * (K^x)^2: N(alpha) is a rational square and tr(alpha) > 0"""
    if alpha.is_zero:
        raise ValueError("square_class_test needs a non-zero element")
    return _rational_sqrt(alpha.norm()) is not None and alpha.trace() > 0


def _reduce_square_factors(A: int, beta: QuadElem) -> Tuple[int, QuadElem]:
    for prime, exponent in factorint(A).items():
        while exponent >= 2:
            reduced = beta * Fraction(1, prime)
            if not reduced.is_integral().is_integral:
                break
            A //= prime * prime
            beta = reduced
            exponent -= 2
    return A, beta


def square_decompose(alpha: QuadElem) -> Tuple[int, QuadElem]:
    """
    (A, beta) with A * alpha = beta^2 and beta integral.

    With s^2 = N(alpha), (alpha + s)^2 = alpha * (tr(alpha) + 2s). Both signs
    of s are tried and the smaller A is kept.
    """
    if not square_class_test(alpha):
        raise ConstructionError(f"{alpha} is not in Q_+ * (K^x)^2")
    s = _rational_sqrt(alpha.norm())

    candidates = []
    for root in (s, -s):
        c = alpha.trace() + 2 * root
        if c <= 0:
            continue
        p, q = c.numerator, c.denominator
        k, beta = (q * (alpha + root)).clear_denominator()
        candidates.append(_reduce_square_factors(p * q * k * k, beta))

    A, beta = min(candidates, key=lambda pair: pair[0])
    if beta.sign() < 0:
        beta = -beta
    if beta * beta != A * alpha:
        raise IdentityCheckError(f"square decomposition of {alpha} failed")
    return A, beta


def _growth_ok(Q: int, previous_Q: int, zeta: QuadElem) -> bool:
    """|Q_n| / |Q_(n-1)| lies in |zeta|^2 * [e^-2, e^2]"""
    ratio = PowerProduct.of((Q, 1), (previous_Q, -1), (zeta, -2))
    return (compare_abs(ratio, PowerProduct.exp(GROWTH_LOG_BOUND)) is Ordering.LT
            and compare_abs(ratio, PowerProduct.exp(-GROWTH_LOG_BOUND)) is Ordering.GT)


def strong_sequence(alpha: QuadElem, n_from: int, n_to: int, norm: int = 1) -> List[ApproxCertificate]:
    """Strongly evenly divisible approximations for n_from <= n <= n_to"""
    if n_from < 1 or n_to < n_from:
        raise ValueError(f"need 1 <= n_from <= n_to, got {n_from}..{n_to}")
    if alpha.is_rational:
        raise ConstructionError(f"alpha = {alpha} is rational; there is nothing to approximate")
    A, beta = square_decompose(alpha)
    alpha_int = A * alpha
    zeta = unit_zeta(alpha.field.D, norm)
    two = PrimeBlock.two()
    logger.info(f"Strong construction for {alpha}: A={A}, beta={beta}, zeta={zeta}")

    zeta_n = zeta.pow_int(n_from - 1)
    previous_Q = int(zeta_n.twisted_trace() * zeta_n.trace()) or None
    certificates = []
    for n in range(n_from, n_to + 1):
        zeta_n = zeta_n * zeta
        omega = beta * zeta_n
        P_split = (int(omega.twisted_trace()), int(omega.trace()))
        Q_split = (int(zeta_n.twisted_trace()), int(zeta_n.trace()))
        P, Q = P_split[0] * P_split[1], Q_split[0] * Q_split[1]

        zeta_2n = zeta_n * zeta_n
        if P != (alpha_int * zeta_2n).twisted_trace() or Q != zeta_2n.twisted_trace():
            raise IdentityCheckError(f"twisted trace product identity failed at n={n}")

        flags = []
        if compare_abs(PowerProduct.of((omega.conjugate(), 1), (omega, -1)), HALF) is Ordering.GT:
            flags.append('small-n')
        if previous_Q is not None and not _growth_ok(Q, previous_Q, zeta):
            logger.warning(f"Denominator growth out of range at n={n}")
            flags.append('growth-out-of-range')

        params = ConstructionParams(
            alpha=alpha,
            A=A,
            alpha_int=alpha_int,
            zeta=zeta,
            eps=Fraction(0),
            L_block=two,
            Lp_block=two,
            M=0,
            m1=0,
            m2=0,
            n=n,
            N=2 * n,
            mode=Mode.STRONG,
            beta=beta,
        )
        cert = ApproxCertificate(
            params=params,
            P=P,
            Q=Q,
            P_split=P_split,
            Q_split=Q_split,
            claimed_exponent=Fraction(1),
            flags=tuple(flags),
        )
        certificates.append(_finalize(cert))
        previous_Q = Q
    return certificates
