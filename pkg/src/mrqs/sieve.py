"""Factor base construction, parameter selection and exact-division sieving.

The sieve polynomial is ``Q(x) = x^2 - n`` evaluated on a window of x around
``isqrt(n)``.  Every x whose ``|Q(x)|`` factors completely over the factor base
becomes a :class:`SmoothRelation` carrying the full exponent vector.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import OutOfDomain, ParseError, ShardTooLarge, TooSmall
from .number_theory import isqrt, legendre_symbol, primes_up_to, sqrt_mod

# Largest shard a single mapper may sieve in one call.
DEFAULT_MAX_SHARD_WIDTH = 1 << 24
MIN_BOUND = 500
DEFAULT_MULTIPLIER = 2.5

_U64_LIMIT = 1 << 64


@dataclass(frozen=True)
class FactorBaseEntry:
    p: int
    roots: tuple[int, ...] = ()


@dataclass(frozen=True)
class FoundFactor:
    """A nontrivial factor discovered before sieving (e.g. a small prime dividing n)."""

    factor: int


@dataclass(frozen=True)
class FactorBase:
    """Sign slot ``-1`` followed by the primes modulo which n is a square.

    ``entries[0]`` is always the ``-1`` entry, so factor-base index ``j >= 1``
    lines up with ``SmoothRelation.exponents[j - 1]``.
    """

    n: int
    entries: tuple[FactorBaseEntry, ...]
    includes_minus_one: bool = field(default=True, init=False)

    def __post_init__(self):
        if not self.entries or self.entries[0].p != -1:
            raise ValueError("factor base must start with the -1 sign entry")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def primes(self) -> list[int]:
        return [e.p for e in self.entries[1:]]

    @property
    def bound(self) -> int:
        return self.entries[-1].p if len(self.entries) > 1 else 0

    def dumps(self) -> str:
        lines = ["0 -1"]
        for i, entry in enumerate(self.entries[1:], start=1):
            lines.append(" ".join(map(str, (i, entry.p, *entry.roots))))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, n: int, source="<string>") -> FactorBase:
        entries = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            fields = line.split()
            try:
                values = [int(f) for f in fields]
            except ValueError:
                raise ParseError(source, lineno, f"non-integer field in {line!r}") from None
            if len(values) < 2 or values[0] != lineno - 1:
                raise ParseError(source, lineno, f"bad factor-base record {line!r}")
            if lineno == 1:
                if values != [0, -1]:
                    raise ParseError(source, lineno, "first record must be '0 -1'")
                entries.append(FactorBaseEntry(-1))
                continue
            p, roots = values[1], tuple(values[2:])
            if not 1 <= len(roots) <= 2 or any(not 0 <= s < p for s in roots):
                raise ParseError(source, lineno, f"bad roots in {line!r}")
            entries.append(FactorBaseEntry(p, roots))
        if not entries:
            raise ParseError(source, 1, "empty factor-base file")
        return cls(n, tuple(entries))

    def write(self, path: str | os.PathLike) -> int:
        data = self.dumps().encode("ascii")
        Path(path).write_bytes(data)
        return len(data)

    @classmethod
    def read(cls, path: str | os.PathLike, n: int) -> FactorBase:
        return cls.loads(Path(path).read_text(encoding="ascii"), n, source=path)


@dataclass(frozen=True)
class SieveParameters:
    """Smoothness bound B and the x-window around ``center = isqrt(n)``.

    The window is ``[center - half_width, center + half_width]`` unless
    ``size`` is given, in which case it is ``size`` values starting at
    ``center - half_width``.  The low end is clipped at 1.
    """

    smoothness_bound: int
    half_width: int
    center: int
    size: int | None = None

    @property
    def lo(self) -> int:
        return max(1, self.center - self.half_width)

    @property
    def hi(self) -> int:
        if self.size is not None:
            return self.center - self.half_width + self.size - 1
        return self.center + self.half_width

    @property
    def sieve_size(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class SmoothRelation:
    """An x whose ``Q(x)`` splits completely over the factor base.

    ``exponents[j]`` is the full exponent of the (j+1)-th factor-base entry,
    i.e. of ``fb.primes[j]``; the sign lives in ``sign_negative``.
    """

    x: int
    sign_negative: bool
    exponents: tuple[int, ...]

    def value(self, primes) -> int:
        """Rebuild ``Q(x)`` from the stored factorization."""
        v = -1 if self.sign_negative else 1
        for p, e in zip(primes, self.exponents):
            if e:
                v *= p**e
        return v


def default_bound(n: int, multiplier: float = DEFAULT_MULTIPLIER) -> int:
    ln = math.log(n)
    b = math.ceil(math.exp(0.5 * math.sqrt(ln * math.log(ln))) * multiplier)
    return max(MIN_BOUND, b)


def select_parameters(
    n: int,
    bound: int | None = None,
    half_width: int | None = None,
    *,
    sieve_size: int | None = None,
    multiplier: float = DEFAULT_MULTIPLIER,
) -> SieveParameters:
    """Pick the smoothness bound and sieve window for ``n``.

    Without overrides, ``B = ceil(exp(sqrt(ln n ln ln n) / 2) * multiplier)``
    (at least 500; smaller bounds leave too few primes in the base for the
    single-polynomial sieve to ever collect enough relations) and
    ``M = max(ceil(B**1.5), 10 B)``.  Explicit ``bound`` and ``half_width``
    are used verbatim.  ``sieve_size`` fixes the number of x
    values exactly (it may be even) and implies ``M = sieve_size // 2``.
    """
    if n < 15:
        raise TooSmall(f"{n} is too small for the quadratic sieve; use trial division")
    if n % 2 == 0:
        raise OutOfDomain("n must be odd")
    if bound is None:
        bound = default_bound(n, multiplier)
    if sieve_size is not None:
        if sieve_size < 1:
            raise OutOfDomain("sieve_size must be positive")
        half_width = sieve_size // 2
    elif half_width is None:
        half_width = max(math.ceil(bound**1.5), 10 * bound)
    return SieveParameters(bound, half_width, isqrt(n), sieve_size)


def build_factor_base(n: int, bound: int) -> FactorBase | FoundFactor:
    """Factor base for ``n`` over the primes up to ``bound``.

    Returns :class:`FoundFactor` instead if some prime ``p <= bound`` divides n.
    """
    entries = [FactorBaseEntry(-1)]
    for p in primes_up_to(bound):
        if p < n and n % p == 0:
            return FoundFactor(p)
        if p == 2:
            entries.append(FactorBaseEntry(2, (1,)))
        elif legendre_symbol(n, p) == 1:
            entries.append(FactorBaseEntry(p, sqrt_mod(n, p)))
    return FactorBase(n, tuple(entries))


def q_of(x: int, n: int) -> int:
    return x * x - n


def first_root_in(lo: int, s: int, p: int) -> int:
    """Smallest ``z >= lo`` with ``z % p == s % p``."""
    return lo + (s - lo) % p


def _abs_q_values(lo: int, width: int, n: int) -> np.ndarray:
    hi = lo + width - 1
    peak = max(abs(q_of(lo, n)), abs(q_of(hi, n)))
    # negative Q(x) occupy the first `neg` slots
    first_nonneg = isqrt(n - 1) + 1
    neg = min(width, max(0, first_nonneg - lo))

    if peak < _U64_LIMIT:
        # Q(lo + i) = Q(lo) + i (2 lo + i), computed modulo 2^64; the true
        # magnitude fits, so negating the negative slots recovers |Q| exactly.
        i = np.arange(width, dtype=np.uint64)
        base = np.uint64(q_of(lo, n) % _U64_LIMIT)
        step = np.uint64(2 * lo % _U64_LIMIT)
        with np.errstate(over="ignore"):
            r = base + i * (step + i)
            r[:neg] = ~r[:neg] + np.uint64(1)
        return r
    return np.array([abs(q_of(x, n)) for x in range(lo, hi + 1)], dtype=object)


def sieve_shard(
    lo: int,
    hi: int,
    fb: FactorBase,
    n: int,
    max_width: int = DEFAULT_MAX_SHARD_WIDTH,
) -> list[SmoothRelation]:
    """Sieve ``x`` in ``[lo, hi]`` by exact division and return the smooth relations.

    For each prime and each root ``s`` of ``x^2 = n (mod p)``, every ``x``
    congruent to ``s`` has ``|Q(x)|`` divided by the highest power of p and
    the exponent recorded.  Whatever is left at 1 is smooth.  Relations come
    back in ascending x.
    """
    return _sieve(lo, hi, fb, n, max_width)[1]


def sieve_residues(
    lo: int, hi: int, fb: FactorBase, n: int, max_width: int = DEFAULT_MAX_SHARD_WIDTH
) -> tuple[list[int], list[SmoothRelation]]:
    """Like :func:`sieve_shard`, but also return what is left of each ``|Q(x)|``."""
    r, relations = _sieve(lo, hi, fb, n, max_width)
    return [int(v) for v in r.tolist()], relations


def _sieve(lo, hi, fb, n, max_width):
    if lo < 1 or hi < lo:
        raise OutOfDomain(f"bad shard bounds [{lo}, {hi}]")
    width = hi - lo + 1
    if width > max_width:
        raise ShardTooLarge(f"shard of {width} values exceeds the limit of {max_width}")

    r = _abs_q_values(lo, width, n)
    if not r.all():
        raise OutOfDomain(f"{n} is a perfect square")
    wide = r.dtype == object

    hits = []  # (factor-base index, positions, exponents)
    for j, entry in enumerate(fb.entries[1:], start=1):
        p = entry.p
        pp = p if wide else np.uint64(p)
        for s in entry.roots:
            start = first_root_in(lo, s, p) - lo
            if start >= width:
                continue
            view = r[start::p]
            exps = np.zeros(len(view), dtype=np.int64)
            idx = np.flatnonzero(view % pp == 0)
            touched = idx
            while idx.size:
                view[idx] //= pp
                exps[idx] += 1
                idx = idx[view[idx] % pp == 0]
            if touched.size:
                hits.append((j, start + touched * p, exps[touched]))

    smooth = np.flatnonzero(r == 1)
    if smooth.size == 0:
        return r, []
    row_of = np.full(width, -1, dtype=np.int64)
    row_of[smooth] = np.arange(smooth.size)
    table = np.zeros((smooth.size, len(fb) - 1), dtype=np.int64)
    for j, pos, e in hits:
        rows = row_of[pos]
        keep = rows >= 0
        table[rows[keep], j - 1] = e[keep]

    first_nonneg = isqrt(n - 1) + 1
    relations = []
    for row, off in zip(table.tolist(), smooth.tolist()):
        x = lo + off
        relations.append(SmoothRelation(x, x < first_nonneg, tuple(row)))
    return r, relations


def trial_divide_small(n: int, bound: int) -> tuple[list[tuple[int, int]], int]:
    """Strip every prime factor ``<= bound`` from ``n``.

    Returns ``([(p, e), ...], cofactor)``.
    """
    found = []
    for p in primes_up_to(bound):
        if p * p > n:
            break
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            found.append((p, e))
    if 1 < n <= bound:
        found.append((n, 1))
        n = 1
    return found, n
