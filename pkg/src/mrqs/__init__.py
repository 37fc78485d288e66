"""Quadratic sieve factorization with a file-sharded map-reduce sieving phase."""

from .factor import SieveOptions, factorize, preflight
from .gf2 import Gf2Matrix, Gf2Vector, build_matrix, kernel_basis, parity_vector
from .mapreduce import JobConfig, JobStats, run_job
from .sieve import (
    FactorBase,
    FoundFactor,
    SieveParameters,
    SmoothRelation,
    build_factor_base,
    select_parameters,
    sieve_shard,
)
from .squares import Congruence, Factorization, assemble, extract_factor

__all__ = [
    "Congruence",
    "FactorBase",
    "Factorization",
    "FoundFactor",
    "Gf2Matrix",
    "Gf2Vector",
    "JobConfig",
    "JobStats",
    "SieveOptions",
    "SieveParameters",
    "SmoothRelation",
    "assemble",
    "build_factor_base",
    "build_matrix",
    "extract_factor",
    "factorize",
    "kernel_basis",
    "parity_vector",
    "preflight",
    "run_job",
    "select_parameters",
    "sieve_shard",
]
