import logging
from dataclasses import dataclass
from typing import List, Tuple

from sympy.ntheory.continued_fraction import continued_fraction_periodic

from .exceptions import ConstructionError
from .qfield import QuadElem, field_for

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CFExpansion:
    """Periodic continued fraction [a0; period...] of sqrt(D)"""

    D: int
    a0: int
    period: Tuple[int, ...]

    @property
    def period_length(self) -> int:
        return len(self.period)


@dataclass(frozen=True)
class PellSolution:
    """Positive solution of x^2 - D*y^2 = norm"""

    x: int
    y: int
    D: int
    norm: int

    def __post_init__(self):
        if self.norm not in (1, -1):
            raise ValueError(f"norm must be +1 or -1, got {self.norm}")
        if self.x * self.x - self.D * self.y * self.y != self.norm:
            raise ValueError(f"({self.x}, {self.y}) does not solve x^2 - {self.D}y^2 = {self.norm}")

    def as_element(self) -> QuadElem:
        return field_for(self.D).element(self.x, self.y)


def cf_sqrt(D: int) -> CFExpansion:
    """Continued fraction of sqrt(D) for square-free D >= 2"""
    field_for(D)
    terms = continued_fraction_periodic(0, 1, D)
    a0, period = terms[0], terms[1]
    return CFExpansion(D=D, a0=int(a0), period=tuple(int(a) for a in period))


def _convergent(terms: List[int]) -> Tuple[int, int]:
    p_prev, p = 1, terms[0]
    q_prev, q = 0, 1
    for a in terms[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q


def fundamental_unit_solution(D: int, want_norm: int = 1) -> PellSolution:
    """
    Fundamental solution of x^2 - D*y^2 = want_norm.

    The convergent just before the end of the first period solves the equation
    with norm (-1)^period_length; squaring it turns a norm -1 solution into the
    fundamental norm +1 solution.
    """
    if want_norm not in (1, -1):
        raise ValueError(f"want_norm must be +1 or -1, got {want_norm}")

    expansion = cf_sqrt(D)
    r = expansion.period_length
    x, y = _convergent([expansion.a0, *expansion.period[:-1]])
    base_norm = -1 if r % 2 else 1

    if want_norm == -1:
        if base_norm != -1:
            raise ConstructionError(
                f"no norm -1 solution for D = {D}: continued fraction period {r} is even"
            )
        return PellSolution(x=x, y=y, D=D, norm=-1)

    if base_norm == -1:
        x, y = x * x + D * y * y, 2 * x * y
    logger.debug(f"Pell D={D}: period length {r}, fundamental solution has {x.bit_length()} bits")
    return PellSolution(x=x, y=y, D=D, norm=1)


def unit_zeta(D: int, norm: int = 1) -> QuadElem:
    """The unit x + y*sqrt(D) > 1 used as zeta; norm +1 unless asked otherwise"""
    return fundamental_unit_solution(D, norm).as_element()
