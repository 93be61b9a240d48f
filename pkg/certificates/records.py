"""Value types shared by the builders, the verifier and the JSON layer."""
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from arithmetic.numtheory import PrimeBlock
from arithmetic.qfield import QuadElem


class Mode(str, enum.Enum):
    SYMMETRIC = 'symmetric'
    TWISTED_P = 'twisted-p'
    TWISTED_Q = 'twisted-q'
    STRONG = 'strong'

    @property
    def twisted(self) -> bool:
        return self is not Mode.SYMMETRIC


@dataclass(frozen=True)
class ConstructionParams:
    """Every parameter a construction fixed, enough to re-derive P and Q"""

    alpha: QuadElem
    A: int
    alpha_int: QuadElem
    zeta: QuadElem
    eps: Fraction
    L_block: PrimeBlock
    Lp_block: PrimeBlock
    M: int
    m1: int
    m2: int
    n: int
    N: int
    mode: Mode
    beta: Optional[QuadElem] = None
    inequalities: Tuple[bool, ...] = ()

    @property
    def L(self) -> int:
        return self.L_block.product

    @property
    def Lprime(self) -> int:
        return self.Lp_block.product

    def consistency_errors(self) -> List[str]:
        errors = []
        if self.A < 1 or self.alpha_int != self.A * self.alpha:
            errors.append("alpha_int != A * alpha")
        if not self.alpha_int.is_integral().is_integral:
            errors.append("A * alpha is not an algebraic integer")
        if abs(self.zeta.norm()) != 1:
            errors.append("zeta is not a unit")
        if self.mode is Mode.STRONG:
            if self.beta is None or self.beta * self.beta != self.alpha_int:
                errors.append("beta^2 != A * alpha")
            if self.N != 2 * self.n:
                errors.append("N != 2n")
        else:
            if self.N != self.n * self.L * self.Lprime:
                errors.append("N != n * L * L'")
            if self.M + 1 != self.m1 * self.L or self.M != self.m2 * self.Lprime:
                errors.append("M + 1 != m1 * L or M != m2 * L'")
            if not 0 < self.eps < Fraction(1, 2):
                errors.append("eps outside (0, 1/2)")
        return errors


@dataclass(frozen=True)
class ApproxCertificate:
    """P/Q approximating alpha_int with divisor splits of P and Q"""

    params: ConstructionParams
    P: int
    Q: int
    P_split: Tuple[int, int]
    Q_split: Tuple[int, int]
    claimed_exponent: Fraction
    error_bound: Optional[dict] = None
    flags: Tuple[str, ...] = ()
    checks: Dict[str, bool] = field(default_factory=dict)

    # Flat accessors used by the JSON layer.

    @property
    def alpha(self) -> QuadElem:
        return self.params.alpha

    @property
    def D(self) -> int:
        return self.params.alpha.field.D

    @property
    def A(self) -> int:
        return self.params.A

    @property
    def mode(self) -> str:
        return self.params.mode.value

    @property
    def zeta(self) -> QuadElem:
        return self.params.zeta

    @property
    def beta(self) -> Optional[QuadElem]:
        return self.params.beta

    @property
    def eps(self) -> Fraction:
        return self.params.eps

    @property
    def verified(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    @property
    def induced_pair(self) -> Tuple[int, int]:
        """(P, A*Q) approximating the original alpha"""
        return self.P, self.A * self.Q

    @property
    def induced_Q_split(self) -> Tuple[int, int]:
        return self.A * self.Q_split[0], self.Q_split[1]


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    detail: str = ''
    skipped: bool = False


@dataclass
class VerificationReport:
    checks: Dict[str, CheckResult] = field(default_factory=dict)
    induced_P: Optional[int] = None
    induced_Q: Optional[int] = None
    induced_Q_split: Optional[Tuple[int, int]] = None
    error_bound: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())

    @property
    def failures(self) -> List[str]:
        return [f"{name}: {check.detail}" for name, check in self.checks.items() if not check.passed]

    def record(self, name: str, passed: bool, detail: str = '', skipped: bool = False):
        self.checks[name] = CheckResult(passed=bool(passed), detail=detail, skipped=skipped)

    def summary(self) -> Dict[str, bool]:
        return {name: check.passed for name, check in self.checks.items()}
