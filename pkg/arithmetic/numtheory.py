import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from typing import Collection, Tuple, Union

from sympy import factorint, nextprime, totient
from sympy.ntheory.modular import crt

from .conf import get_setting

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError(f"mobius needs n >= 1, got {n}")
    exponents = factorint(n).values()
    if any(e > 1 for e in exponents):
        return 0
    return -1 if len(exponents) % 2 else 1


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError(f"euler_phi needs n >= 1, got {n}")
    return int(totient(n))


def squarefree_divisors(n: int) -> Tuple[int, ...]:
    """Divisors of a square-free n, ascending"""
    divisors = [1]
    for prime in sorted(factorint(n)):
        divisors += [d * prime for d in divisors]
    return tuple(sorted(divisors))


@dataclass(frozen=True)
class PrimeBlock:
    """A product L of distinct odd primes with its ratio phi(L)/L"""

    primes: Tuple[int, ...]
    product: int = field(init=False)
    totient_ratio: Fraction = field(init=False)

    def __post_init__(self):
        primes = tuple(sorted(self.primes))
        if len(set(primes)) != len(primes):
            raise ValueError(f"primes must be distinct, got {primes}")
        object.__setattr__(self, 'primes', primes)
        object.__setattr__(self, 'product', prod(primes))
        object.__setattr__(self, 'totient_ratio', prod((Fraction(p - 1, p) for p in primes), start=Fraction(1)))

    @classmethod
    def two(cls) -> 'PrimeBlock':
        """The block L = 2 used by the twisted constructions"""
        return cls((2,))


@dataclass(frozen=True)
class BlockPair:
    L: PrimeBlock
    Lp: PrimeBlock
    eps: Fraction

    def __post_init__(self):
        if set(self.L.primes) & set(self.Lp.primes):
            raise ValueError("prime blocks must be disjoint")


def as_fraction(eps: Union[str, int, float, Fraction]) -> Fraction:
    """Exact rational from '1/4', '0.15', a Fraction or an int"""
    if isinstance(eps, float):
        # float -> shortest decimal, so 0.15 means 3/20 and not its binary expansion
        return Fraction(repr(eps))
    return Fraction(eps)


def check_eps(eps: Fraction) -> Fraction:
    eps = as_fraction(eps)
    if not 0 < eps < HALF:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    return eps


def select_block(eps: Fraction, exclude: Collection[int] = ()) -> PrimeBlock:
    """
    Greedy block of odd primes with phi(L)/L in (1/2, 1/2 + eps).

    Primes are scanned in increasing order, skipping `exclude`; a prime is
    taken while the running product of (1 - 1/p) stays above 1/2.
    """
    eps = check_eps(eps)
    ratio = Fraction(1)
    chosen = []
    p = 3
    while not ratio < HALF + eps:
        if p not in exclude:
            candidate = ratio * Fraction(p - 1, p)
            if candidate > HALF:
                ratio = candidate
                chosen.append(p)
        p = int(nextprime(p))
    return PrimeBlock(tuple(chosen))


def select_blocks(eps: Fraction) -> BlockPair:
    """L takes the smallest primes greedily, L' repeats the greedy scan on the rest"""
    eps = check_eps(eps)
    L = select_block(eps)
    Lp = select_block(eps, exclude=set(L.primes))
    logger.info(f"Selected blocks for eps={eps}: L={L.primes} ({L.product}), L'={Lp.primes} ({Lp.product})")

    budget = get_setting('QA_BLOCK_BUDGET', 10 ** 7)
    if L.product * Lp.product > budget:
        logger.warning(
            f"L*L' = {L.product * Lp.product} exceeds the block budget {budget}; "
            f"powers will have at least that many bits"
        )
    return BlockPair(L=L, Lp=Lp, eps=eps)


def crt_smallest_M(L: int, Lp: int) -> Tuple[int, int, int]:
    """Smallest M >= 1 with L | M + 1 and L' | M, plus m1 = (M+1)/L and m2 = M/L'"""
    if L < 1 or Lp < 1:
        raise ValueError(f"moduli must be positive, got L={L}, L'={Lp}")
    if gcd(L, Lp) != 1:
        raise ValueError(f"L={L} and L'={Lp} are not coprime")
    residue, modulus = crt([L, Lp], [L - 1, 0])
    M = int(residue) or int(modulus)
    return M, (M + 1) // L, M // Lp
