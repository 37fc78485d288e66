"""Slow, obviously-correct reference implementations used as test oracles."""


def trial_division_primes(bound):
    """Primes <= bound by plain trial division (independent of the library sieve)."""
    out = []
    for m in range(2, bound + 1):
        if all(m % p for p in out if p * p <= m):
            out.append(m)
    return out


def trial_factor(n):
    """Full factorization of a small positive integer as {p: e}."""
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_smooth(value, primes):
    value = abs(value)
    if value == 0:
        return False
    for p in primes:
        while value % p == 0:
            value //= p
    return value == 1
