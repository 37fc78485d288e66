"""Whole-number factorization: pre-filters, then the map-reduce sieve."""

from __future__ import annotations

import tempfile
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import OutOfDomain, SieveExhausted
from .mapreduce import JobConfig, JobStats, RecordMode, run_job
from .number_theory import is_probable_prime, perfect_power
from .sieve import DEFAULT_MULTIPLIER, select_parameters, trial_divide_small
from .squares import Factorization

TRIAL_DIVISION_BOUND = 10**4


@dataclass(frozen=True)
class ShortCircuit:
    """n was fully factored without sieving; ``factors`` may be ``((n, 1),)`` for prime n."""

    factors: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Proceed:
    """Small factors stripped; ``cofactor`` is an odd composite, not a perfect power."""

    small: tuple[tuple[int, int], ...]
    cofactor: int


@dataclass
class SieveOptions:
    bound: int | None = None
    half_width: int | None = None
    sieve_size: int | None = None
    multiplier: float = DEFAULT_MULTIPLIER
    workers: int = 1
    shard_size: int = 65536
    record_mode: RecordMode = "interval"
    workdir: Path | None = None
    max_rounds: int = 8
    retry_cap: int = 128
    stats: list[JobStats] = field(default_factory=list)


def preflight(n: int) -> ShortCircuit | Proceed:
    """Trial division to 10^4, perfect-power detection, then a primality check."""
    if n < 2:
        raise OutOfDomain(f"cannot factor {n}")
    small, cofactor = trial_divide_small(n, TRIAL_DIVISION_BOUND)
    factors = Counter(dict(small))
    if cofactor == 1:
        return ShortCircuit(tuple(sorted(factors.items())))

    power = perfect_power(cofactor)
    if power is not None:
        root, k = power
        for p, e in _factor_all(root, SieveOptions()).items():
            factors[p] += e * k
        return ShortCircuit(tuple(sorted(factors.items())))

    if is_probable_prime(cofactor):
        factors[cofactor] += 1
        return ShortCircuit(tuple(sorted(factors.items())))
    return Proceed(tuple(small), cofactor)


def _sieve(m: int, options: SieveOptions) -> Factorization:
    params = select_parameters(
        m,
        options.bound,
        options.half_width,
        sieve_size=options.sieve_size,
        multiplier=options.multiplier,
    )

    def job(workdir: Path) -> Factorization:
        config = JobConfig(
            n=m,
            params=params,
            workdir=workdir,
            num_workers=options.workers,
            shard_size=options.shard_size,
            record_mode=options.record_mode,
            max_rounds=options.max_rounds,
            retry_cap=options.retry_cap,
        )
        result, stats = run_job(config)
        options.stats.append(stats)
        return result

    if options.workdir is not None:
        return job(Path(options.workdir))
    with tempfile.TemporaryDirectory(prefix="mrqs-") as tmp:
        return job(Path(tmp))


def _factor_all(n: int, options: SieveOptions) -> Counter[int]:
    """Prime factorization of n as a Counter (composite leaves if sieving gives up)."""
    pre = preflight(n)
    if isinstance(pre, ShortCircuit):
        return Counter(dict(pre.factors))
    out = Counter(dict(pre.small))
    for p, e in _sieve(pre.cofactor, options).factors:
        out[p] += e
    return out


def factorize(n: int, options: SieveOptions | None = None) -> Factorization:
    """Factor a composite n.  Sieve options apply to the top-level job only."""
    options = options or SieveOptions()
    if n < 4 or is_probable_prime(n):
        raise OutOfDomain(f"{n} is not composite")
    pre = preflight(n)
    if isinstance(pre, ShortCircuit):
        leaves = pre.factors
    else:
        factors = Counter(dict(pre.small))
        for p, e in _sieve(pre.cofactor, options).factors:
            factors[p] += e
        leaves = tuple(sorted(factors.items()))
    status = "complete" if all(is_probable_prime(p) for p, _ in leaves) else "partial"
    return Factorization(n, leaves, status)


def find_divisor(m: int) -> int | None:
    """Some proper divisor of composite m using default settings, or None."""
    pre = preflight(m)
    if isinstance(pre, ShortCircuit):
        candidates = [p for p, _ in pre.factors if p < m]
    else:
        candidates = [p for p, _ in pre.small]
        if not candidates:
            try:
                candidates = [p for p, _ in _sieve(pre.cofactor, SieveOptions()).factors]
            except SieveExhausted:
                return None
    return candidates[0] if candidates else None
