"""Number-theoretic primitives used by the sieve.

Everything here works on plain Python ints, so values of any size are exact.
"""

from __future__ import annotations

import math
import random

import numpy as np

from .errors import NonResidue, OutOfDomain, PrimeDividesN

__all__ = [
    "primes_up_to",
    "legendre_symbol",
    "sqrt_mod",
    "isqrt",
    "gcd",
    "is_probable_prime",
    "integer_root",
    "perfect_power",
]

# First 13 primes: deterministic Miller-Rabin for n < 3317044064679887385961981.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981
_MR_RANDOM_ROUNDS = 20


def primes_up_to(bound: int) -> list[int]:
    """Return the primes in ``[2, bound]`` in ascending order."""
    if bound < 2:
        return []
    is_prime = np.ones(bound + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).tolist()


def legendre_symbol(n: int, p: int) -> int:
    """Legendre symbol (n/p) for an odd prime p, via Euler's criterion."""
    if p == 2:
        raise OutOfDomain("legendre_symbol is defined here for odd primes only")
    r = pow(n % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def sqrt_mod(n: int, p: int) -> tuple[int, int]:
    """Both square roots of n modulo the prime p.

    Returns ``(s, p - s)`` with ``s`` the smaller root; for ``p == 2`` and odd
    ``n`` this is ``(1, 1)``.

    Raises:
        PrimeDividesN: if ``p | n``; ``p`` is then a factor of n.
        NonResidue: if n is not a square modulo p.
    """
    a = n % p
    if a == 0:
        raise PrimeDividesN(p)
    if p == 2:
        return 1, 1
    if legendre_symbol(a, p) != 1:
        raise NonResidue(f"{n} is not a quadratic residue mod {p}")

    if p % 4 == 3:
        s = pow(a, (p + 1) // 4, p)
    else:
        s = _tonelli_shanks(a, p)
    s = min(s, p - s)
    return s, p - s


def _tonelli_shanks(a: int, p: int) -> int:
    # p - 1 = q * 2^e with q odd
    q, e = p - 1, 0
    while q % 2 == 0:
        q //= 2
        e += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    c = pow(z, q, p)
    x = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = e
    while t != 1:
        # least i with t^(2^i) == 1
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        x = x * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return x


def isqrt(n: int) -> int:
    """Floor of the square root of ``n``."""
    return math.isqrt(n)


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def _miller_rabin_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_probable_prime(n: int, rng: random.Random | None = None) -> bool:
    """Miller-Rabin primality test.

    Deterministic below about 3.3e24; above that, 20 extra random witnesses
    bound the false-positive rate by 4**-20.
    """
    if n < 2:
        raise OutOfDomain(f"primality is undefined for {n}")
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False

    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if not all(_miller_rabin_round(n, d, s, a) for a in _MR_BASES):
        return False
    if n < _MR_DETERMINISTIC_LIMIT:
        return True
    rng = rng or random.Random(n)
    return all(
        _miller_rabin_round(n, d, s, rng.randrange(2, n - 1))
        for _ in range(_MR_RANDOM_ROUNDS)
    )


def integer_root(n: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer."""
    if n < 2 or k == 1:
        return n
    # float estimate, then correct exactly
    r = int(round(math.exp(math.log(n) / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def perfect_power(n: int) -> tuple[int, int] | None:
    """Return ``(m, k)`` with ``m**k == n`` and k maximal, or None if n is not a perfect power."""
    if n < 4:
        return None
    best = None
    for k in range(2, n.bit_length() + 1):
        m = integer_root(n, k)
        if m < 2:
            break
        if m**k == n:
            best = (m, k)
    return best
