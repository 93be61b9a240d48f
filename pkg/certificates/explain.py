from typing import List

from arithmetic.numtheory import euler_phi
from arithmetic.tracefact import cyclotomic_value, magnitude_bounds, phi_psi

from .records import ApproxCertificate, Mode

# Direct cyclotomic evaluation is only attempted for small blocks.
CYCLOTOMIC_CHECK_LIMIT = 105


def _side_lines(name: str, omega, L: int, twisted: bool) -> List[str]:
    fact = phi_psi(omega, L, twisted=twisted)
    report = magnitude_bounds(fact)
    kind = 'twisted trace' if twisted else 'trace'
    lines = [
        f"{name} = {kind} of omega_{name}^{L}, omega_{name} has {omega.integer_coords()[0].bit_length()} bits",
        f"  split Phi_{L} * Psi_{L}: {fact.phi_part.bit_length()} + {fact.psi_part.bit_length()} bits, "
        f"phi({L})/{L} = {euler_phi(L)}/{L}",
        f"  log |Phi| / predicted in [{report.phi_log_ratio[0]:.4f}, {report.phi_log_ratio[1]:.4f}], "
        f"log |Psi| / predicted in [{report.psi_log_ratio[0]:.4f}, {report.psi_log_ratio[1]:.4f}] "
        f"({'within' if report.passed else 'OUTSIDE'} [-2, 2])",
    ]
    if L <= CYCLOTOMIC_CHECK_LIMIT and not (twisted and L == 1):
        agrees = cyclotomic_value(omega, L, twisted=twisted) == fact.phi_part
        lines.append(f"  Phi_{L} equals the homogenized cyclotomic value: {agrees}")
    return lines


def explain_certificate(cert: ApproxCertificate) -> List[str]:
    """Human-readable account of how an evenly divisible certificate was built"""
    p = cert.params
    lines = [
        f"alpha = {p.alpha}, A = {p.A}, A*alpha = {p.alpha_int}",
        f"zeta = {p.zeta} (norm {p.zeta.norm()})",
    ]
    if p.mode is Mode.STRONG:
        lines.append(f"beta = {p.beta}, beta^2 = A*alpha; n = {p.n}")
        lines.append(f"P = {cert.P_split[0]} * {cert.P_split[1]}, Q = {cert.Q_split[0]} * {cert.Q_split[1]}")
    else:
        lines += [
            f"eps = {p.eps}, L = {p.L} {p.L_block.primes}, L' = {p.Lprime} {p.Lp_block.primes}",
            f"M = {p.M} = {p.m1}*L - 1 = {p.m2}*L', n = {p.n}, N = n*L*L' = {p.N}",
        ]
        omega_P = p.alpha_int.pow_int(p.m1) * p.zeta.pow_int(p.n * p.Lprime)
        omega_Q = p.alpha_int.pow_int(p.m2) * p.zeta.pow_int(p.n * p.L)
        lines += _side_lines('P', omega_P, p.L, p.mode.twisted)
        lines += _side_lines('Q', omega_Q, p.Lprime, p.mode.twisted)
    lines.append(f"P has {cert.P.bit_length()} bits, Q has {cert.Q.bit_length()} bits")
    lines.append(f"induced approximation to alpha: P / (A*Q) with A*Q = {cert.A}*Q")
    lines.append(f"checks: {cert.checks}")
    return lines
