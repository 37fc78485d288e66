"""From a GF(2) dependency to a congruence of squares, and from there to factors."""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal

from .errors import NotASquare
from .gf2 import Gf2Vector
from .number_theory import gcd, is_probable_prime
from .sieve import FactorBase, SmoothRelation

DEFAULT_RETRY_CAP = 128
DEFAULT_RECURSION_BUDGET = 16


@dataclass(frozen=True)
class Congruence:
    """``a^2 = b^2 (mod n)``; checked on construction."""

    a: int
    b: int
    n: int

    def __post_init__(self):
        if (self.a * self.a - self.b * self.b) % self.n:
            raise NotASquare(f"a^2 != b^2 mod {self.n} for a={self.a}, b={self.b}")


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]
    status: Literal["complete", "partial"]

    def __post_init__(self):
        product = 1
        for f, m in self.factors:
            if not 1 < f < self.n or self.n % f:
                raise ValueError(f"{f} is not a proper factor of {self.n}")
            product *= f**m
        if product != self.n:
            raise ValueError(f"factors multiply to {product}, not {self.n}")

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    def format(self) -> str:
        terms = [str(f) if m == 1 else f"{f}^{m}" for f, m in self.factors]
        return f"{self.n} = {' * '.join(terms)}"


def assemble(
    dep: Gf2Vector,
    relations: Sequence[SmoothRelation],
    fb: FactorBase,
    n: int,
) -> Congruence:
    """Multiply the selected relations into ``a^2 = b^2 (mod n)``.

    ``a`` is the product of the x values; ``b`` is rebuilt from the halved
    summed exponents, so the square root is exact without forming the product
    of the Q values.
    """
    chosen = dep.support()
    if not chosen:
        raise ValueError("empty dependency")
    if dep.length != len(relations):
        raise ValueError("dependency length does not match relation count")

    a = 1
    negatives = 0
    totals = [0] * (len(fb) - 1)
    for i in chosen:
        rel = relations[i]
        a = a * rel.x % n
        negatives += rel.sign_negative
        for j, e in enumerate(rel.exponents):
            totals[j] += e

    if negatives % 2:
        raise NotASquare("odd number of negative Q(x) in dependency")
    b = 1
    for p, e in zip(fb.primes, totals):
        if e % 2:
            raise NotASquare(f"odd total exponent {e} for prime {p}")
        if e:
            b = b * pow(p, e // 2, n) % n
    return Congruence(a, b, n)


def extract_factor(c: Congruence) -> int | None:
    """A nontrivial divisor from ``gcd(a -+ b, n)``, or None if ``a = +-b``."""
    for g in (gcd((c.a - c.b) % c.n, c.n), gcd((c.a + c.b) % c.n, c.n)):
        if 1 < g < c.n:
            return g
    return None


def finalize(
    n: int,
    found: int,
    split: Callable[[int], int | None] | None = None,
    budget: int = DEFAULT_RECURSION_BUDGET,
) -> Factorization:
    """Complete the factorization of ``n`` given one proper divisor ``found``.

    Composite pieces are handed to ``split`` (by default the full pipeline),
    which returns a proper divisor or None.  When the budget runs out or a
    piece cannot be split, the result is marked partial.
    """
    if not (1 < found < n and n % found == 0):
        raise ValueError(f"{found} is not a proper divisor of {n}")
    if split is None:
        from .factor import find_divisor as split

    leaves: Counter[int] = Counter()
    status: Literal["complete", "partial"] = "complete"
    stack = [found, n // found]
    while stack:
        m = stack.pop()
        if is_probable_prime(m):
            leaves[m] += 1
            continue
        d = split(m) if budget > 0 else None
        budget -= 1
        if d is None:
            leaves[m] += 1
            status = "partial"
        else:
            stack.extend((d, m // d))
    return Factorization(n, tuple(sorted(leaves.items())), status)
