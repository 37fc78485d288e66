"""Local controller / mapper / reducer runtime for the sieving phase.

All hand-offs go through files in a work directory::

    workdir/
      factor_base.txt          controller -> mappers
      shards/shard_<id>.txt    controller -> one mapper each
      relations/shard_<id>.rel mapper -> reducer (all under one key)
      stats.txt                run telemetry, one key=value per line

Mappers run in a process pool; the reducer is a single in-process step.
"""

from __future__ import annotations

import logging
import os
import shutil
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import islice
from pathlib import Path
from typing import Literal

from .errors import NotASquare, ParseError, SieveExhausted
from .gf2 import build_matrix, enumerate_dependencies, kernel_basis
from .sieve import (
    DEFAULT_MAX_SHARD_WIDTH,
    FactorBase,
    FoundFactor,
    SieveParameters,
    SmoothRelation,
    build_factor_base,
    q_of,
    sieve_shard,
)
from .squares import DEFAULT_RETRY_CAP, Factorization, assemble, extract_factor, finalize

log = logging.getLogger(__name__)

RecordMode = Literal["per_value", "interval"]
_WRITE_CHUNK = 1 << 16


@dataclass(frozen=True)
class JobConfig:
    n: int
    params: SieveParameters
    workdir: Path
    fb_path: Path | None = None
    num_workers: int = 1
    shard_size: int = 65536
    record_mode: RecordMode = "interval"
    relation_surplus: int = 10
    max_rounds: int = 8
    retry_cap: int = DEFAULT_RETRY_CAP
    max_shard_width: int = DEFAULT_MAX_SHARD_WIDTH

    def __post_init__(self):
        object.__setattr__(self, "workdir", Path(self.workdir))
        if self.fb_path is None:
            object.__setattr__(self, "fb_path", self.workdir / "factor_base.txt")
        if self.num_workers < 1:
            raise ValueError("num_workers must be >= 1")
        if self.shard_size < 1:
            raise ValueError("shard_size must be >= 1")
        if self.record_mode not in ("per_value", "interval"):
            raise ValueError(f"unknown record mode {self.record_mode!r}")


@dataclass(frozen=True)
class Shard:
    shard_id: int
    path: Path
    x_lo: int
    x_hi: int

    @property
    def size(self) -> int:
        return self.x_hi - self.x_lo + 1


@dataclass
class JobStats:
    """Run telemetry.

    ``sieve_size`` counts x values sieved over all rounds (flanks are only
    sieved once).  ``input_records`` and ``bytes_written["input"]`` count the
    shard files after splitting.
    """

    digits: int = 0
    factor_base_size: int = 0
    smoothness_bound: int = 0
    sieve_size: int = 0
    input_records: int = 0
    relations_found: int = 0
    rounds: int = 0
    shards: int = 0
    bytes_written: dict[str, int] = field(
        default_factory=lambda: {"factor_base": 0, "input": 0, "relations": 0}
    )
    wall_times: dict[str, float] = field(
        default_factory=lambda: {"controller": 0.0, "map": 0.0, "reduce": 0.0}
    )

    def as_dict(self) -> dict[str, int | float]:
        out: dict[str, int | float] = {
            "digits": self.digits,
            "factor_base_size": self.factor_base_size,
            "smoothness_bound": self.smoothness_bound,
            "sieve_size": self.sieve_size,
            "input_records": self.input_records,
            "relations_found": self.relations_found,
            "rounds": self.rounds,
            "shards": self.shards,
        }
        out.update({f"bytes_{k}": v for k, v in self.bytes_written.items()})
        out.update({f"time_{k}_s": round(v, 6) for k, v in self.wall_times.items()})
        return out

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.as_dict().items())


@dataclass(frozen=True)
class NeedMoreRelations:
    relations_found: int
    reason: str


# -- file formats -------------------------------------------------------------


def format_relation(rel: SmoothRelation) -> str:
    return " ".join(map(str, (rel.x, int(rel.sign_negative), *rel.exponents)))


def parse_relation(line: str, fb: FactorBase, n: int, source="<string>", lineno=0) -> SmoothRelation:
    fields = line.split()
    try:
        values = [int(f) for f in fields]
    except ValueError:
        raise ParseError(source, lineno, f"non-integer field in {line!r}") from None
    if len(values) != len(fb) + 1:
        raise ParseError(source, lineno, f"expected {len(fb) + 1} fields, got {len(values)}")
    x, sign, *exps = values
    if x < 1 or sign not in (0, 1) or min(exps, default=0) < 0:
        raise ParseError(source, lineno, f"invalid relation {line!r}")
    rel = SmoothRelation(x, bool(sign), tuple(exps))
    if rel.value(fb.primes) != q_of(x, n):
        raise ParseError(source, lineno, f"exponents do not factor Q({x})")
    return rel


def write_relations(path: Path, relations: Iterable[SmoothRelation]) -> int:
    data = "".join(format_relation(r) + "\n" for r in relations).encode("ascii")
    path.write_bytes(data)
    return len(data)


def read_relations(path: Path, fb: FactorBase, n: int) -> list[SmoothRelation]:
    with open(path, encoding="ascii") as fh:
        return [
            parse_relation(line, fb, n, path, lineno)
            for lineno, line in enumerate(fh, start=1)
            if line.strip()
        ]


def read_shard_ranges(path: Path) -> list[tuple[int, int]]:
    """Contiguous x ranges described by a shard file (either record mode)."""
    ranges: list[tuple[int, int]] = []
    expected = None
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            fields = line.split()
            try:
                values = [int(f) for f in fields]
            except ValueError:
                raise ParseError(path, lineno, f"non-integer field in {line!r}") from None
            if len(values) == 1:
                lo, count = values[0], 1
            elif len(values) == 2:
                lo, count = values
            else:
                raise ParseError(path, lineno, f"expected 1 or 2 fields, got {len(values)}")
            if lo < 1 or count < 1:
                raise ParseError(path, lineno, f"invalid record {line!r}")
            if expected is not None and lo != expected:
                raise ParseError(path, lineno, f"gap in shard: expected {expected}, got {lo}")
            expected = lo + count
            if ranges and ranges[-1][1] + 1 == lo:
                ranges[-1] = (ranges[-1][0], lo + count - 1)
            else:
                ranges.append((lo, lo + count - 1))
    if not ranges:
        raise ParseError(path, 1, "empty shard file")
    return ranges


# -- controller ---------------------------------------------------------------


def _write_lines(path: Path, lines: Iterable[str]) -> int:
    written = 0
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        while chunk := list(islice(lines, _WRITE_CHUNK)):
            text = "\n".join(chunk) + "\n"
            fh.write(text)
            written += len(text)
    return written


def _materialize(
    config: JobConfig, ranges: Sequence[tuple[int, int]], round_no: int, first_id: int
) -> list[Shard]:
    """Write one round's x ranges to a single input file, then split it into shards."""
    shard_dir = config.workdir / "shards"
    shard_dir.mkdir(parents=True, exist_ok=True)
    step = config.shard_size
    bounds = [
        (start, min(hi, start + step - 1))
        for lo, hi in ranges
        for start in range(lo, hi + 1, step)
    ]

    if config.record_mode == "per_value":
        records = (str(x) for lo, hi in ranges for x in range(lo, hi + 1))
    else:
        records = (f"{lo} {hi - lo + 1}" for lo, hi in bounds)
    per_value = config.record_mode == "per_value"

    single = config.workdir / f"input_round_{round_no}.txt"
    _write_lines(single, records)

    shards = []
    with open(single, encoding="ascii") as src:
        for offset, (lo, hi) in enumerate(bounds):
            sid = first_id + offset
            path = shard_dir / f"shard_{sid}.txt"
            with open(path, "w", encoding="ascii", newline="\n") as dst:
                dst.writelines(islice(src, hi - lo + 1 if per_value else 1))
            shards.append(Shard(sid, path, lo, hi))
    single.unlink()
    return shards


def controller_prepare(config: JobConfig) -> tuple[FactorBase, list[Shard]] | FoundFactor:
    """Build and write the factor base, then lay out the first round's shards."""
    fb = build_factor_base(config.n, config.params.smoothness_bound)
    if isinstance(fb, FoundFactor):
        return fb
    config.workdir.mkdir(parents=True, exist_ok=True)
    for sub in ("shards", "relations"):
        shutil.rmtree(config.workdir / sub, ignore_errors=True)
    fb.write(config.fb_path)
    p = config.params
    return fb, _materialize(config, [(p.lo, p.hi)], 0, 0)


# -- mapper -------------------------------------------------------------------


@lru_cache(maxsize=8)
def _load_factor_base(path: str, mtime_ns: int, n: int) -> FactorBase:
    return FactorBase.read(path, n)


def run_mapper(
    shard: Shard,
    fb_path: Path,
    n: int,
    out_dir: Path | None = None,
    max_width: int = DEFAULT_MAX_SHARD_WIDTH,
) -> Path:
    """Sieve one shard and write its relations file.

    The output depends only on the shard's x range, the factor base and n.
    """
    fb_path = Path(fb_path)
    fb = _load_factor_base(str(fb_path), fb_path.stat().st_mtime_ns, n)
    ranges = read_shard_ranges(shard.path)
    if ranges[0][0] != shard.x_lo or ranges[-1][1] != shard.x_hi:
        raise ParseError(shard.path, 1, f"shard contents do not match [{shard.x_lo}, {shard.x_hi}]")
    relations = [rel for lo, hi in ranges for rel in sieve_shard(lo, hi, fb, n, max_width)]

    out_dir = Path(out_dir) if out_dir is not None else shard.path.parent.parent / "relations"
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / f"shard_{shard.shard_id}.rel"
    write_relations(out, relations)
    return out


def _map_phase(config: JobConfig, shards: Sequence[Shard], pool: Executor | None) -> list[Path]:
    out_dir = config.workdir / "relations"
    args = [(s, config.fb_path, config.n, out_dir, config.max_shard_width) for s in shards]
    if pool is None:
        return [run_mapper(*a) for a in args]
    futures = [pool.submit(run_mapper, *a) for a in args]
    return [f.result() for f in futures]


# -- reducer ------------------------------------------------------------------


def run_reducer(
    relation_files: Sequence[Path],
    fb: FactorBase,
    n: int,
    retry_cap: int = DEFAULT_RETRY_CAP,
    relation_surplus: int = 10,
    split: Callable[[int], int | None] | None = None,
) -> Factorization | NeedMoreRelations:
    """Collect every mapper's relations and try dependencies until one splits n.

    Files are read in the given order (shard id order), so the result is the
    same however the map phase was scheduled.
    """
    relations = [rel for path in relation_files for rel in read_relations(Path(path), fb, n)]
    needed = len(fb) + relation_surplus
    if len(relations) < needed:
        return NeedMoreRelations(len(relations), f"have {len(relations)} relations, need {needed}")

    matrix = build_matrix(relations, len(fb))
    basis = kernel_basis(matrix)
    log.debug("reducer: %d relations, kernel dimension %d", len(relations), len(basis))
    for tried, dep in enumerate(enumerate_dependencies(basis, retry_cap), start=1):
        try:
            congruence = assemble(dep, relations, fb, n)
        except NotASquare as exc:
            raise NotASquare(f"internal corruption: {exc}") from exc
        factor = extract_factor(congruence)
        if factor is not None:
            log.debug("reducer: dependency %d split n", tried)
            return finalize(n, factor, split)
    return NeedMoreRelations(len(relations), "every dependency gave a trivial congruence")


# -- job driver ---------------------------------------------------------------


def _shard_bytes(shards: Iterable[Shard]) -> int:
    return sum(s.path.stat().st_size for s in shards)


def _count_records(config: JobConfig, shards: Sequence[Shard]) -> int:
    if config.record_mode == "per_value":
        return sum(s.size for s in shards)
    return len(shards)


def run_job(
    config: JobConfig, split: Callable[[int], int | None] | None = None
) -> tuple[Factorization, JobStats]:
    """Controller, mappers, reducer; widen the window and repeat on shortfall.

    Each extra round doubles the half-width and sieves only the two new flanks.
    """
    n = config.n
    stats = JobStats(digits=len(str(n)), smoothness_bound=config.params.smoothness_bound)

    t0 = time.perf_counter()
    prepared = controller_prepare(config)
    if isinstance(prepared, FoundFactor):
        stats.wall_times["controller"] += time.perf_counter() - t0
        result = finalize(n, prepared.factor, split)
        _write_stats(config, stats)
        return result, stats
    fb, shards = prepared
    stats.factor_base_size = len(fb)
    stats.bytes_written["factor_base"] = config.fb_path.stat().st_size
    stats.wall_times["controller"] += time.perf_counter() - t0

    params = config.params
    lo, hi = params.lo, params.hi
    next_id = len(shards)
    relation_files: list[Path] = []
    pool = ProcessPoolExecutor(config.num_workers) if config.num_workers > 1 else None
    try:
        while True:
            stats.rounds += 1
            stats.shards += len(shards)
            stats.sieve_size += sum(s.size for s in shards)
            stats.input_records += _count_records(config, shards)
            stats.bytes_written["input"] += _shard_bytes(shards)

            t0 = time.perf_counter()
            new_files = _map_phase(config, shards, pool)
            relation_files.extend(new_files)
            stats.bytes_written["relations"] += sum(p.stat().st_size for p in new_files)
            stats.wall_times["map"] += time.perf_counter() - t0

            t0 = time.perf_counter()
            result = run_reducer(
                relation_files, fb, n, config.retry_cap, config.relation_surplus, split
            )
            stats.wall_times["reduce"] += time.perf_counter() - t0
            if isinstance(result, Factorization):
                stats.relations_found = _relation_count(relation_files)
                _write_stats(config, stats)
                return result, stats

            stats.relations_found = result.relations_found
            log.info("round %d: %s", stats.rounds, result.reason)
            if stats.rounds >= config.max_rounds:
                _write_stats(config, stats)
                raise SieveExhausted(
                    f"no factor after {stats.rounds} rounds ({result.reason})", stats
                )

            t0 = time.perf_counter()
            grow = params.half_width
            params = replace(params, half_width=2 * params.half_width)
            new_lo, new_hi = max(1, lo - grow), hi + grow
            flanks = [r for r in ((new_lo, lo - 1), (hi + 1, new_hi)) if r[0] <= r[1]]
            lo, hi = new_lo, new_hi
            shards = _materialize(config, flanks, stats.rounds, next_id)
            next_id += len(shards)
            stats.wall_times["controller"] += time.perf_counter() - t0
    finally:
        if pool is not None:
            pool.shutdown()


def _relation_count(paths: Iterable[Path]) -> int:
    total = 0
    for p in paths:
        with open(p, "rb") as fh:
            total += sum(1 for line in fh if line.strip())
    return total


def _write_stats(config: JobConfig, stats: JobStats) -> None:
    text = stats.to_text() + f"record_mode={config.record_mode}\ninput_bytes_counted=post_split\n"
    (config.workdir / "stats.txt").write_text(text, encoding="ascii")


def default_workers() -> int:
    return os.cpu_count() or 1
