import random
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mrqs.gf2 import (
    Gf2Matrix,
    Gf2Vector,
    build_matrix,
    enumerate_dependencies,
    kernel_basis,
    parity_vector,
)
from mrqs.sieve import SmoothRelation
from oracles import trial_factor

SMALL_PRIMES = (2, 3, 5, 7)


def relation_for(value):
    """Relation whose 'Q' is ``value``, factored over 2, 3, 5, 7."""
    f = trial_factor(abs(value))
    assert set(f) <= set(SMALL_PRIMES)
    return SmoothRelation(value, value < 0, tuple(f.get(p, 0) for p in SMALL_PRIMES))


def brute_kernel(m: Gf2Matrix) -> set[int]:
    out = set()
    for bits in range(1 << m.num_cols):
        if not (m @ Gf2Vector(bits, m.num_cols)).bits:
            out.add(bits)
    return out


def span(vectors) -> set[int]:
    out = {0}
    for v in vectors:
        out |= {s ^ v.bits for s in out}
    return out


def random_matrix(rng, rows, cols):
    return Gf2Matrix(tuple(Gf2Vector(rng.getrandbits(cols), cols) for _ in range(rows)), cols)


def test_vector_basics():
    v = Gf2Vector.from_list([1, 0, 1, 1])
    assert v.to_list() == [1, 0, 1, 1]
    assert v.support() == [0, 2, 3]
    assert (v ^ v).bits == 0
    with pytest.raises(ValueError):
        Gf2Vector(0b10000, 4)


@pytest.mark.parametrize(
    "value, expected",
    [(6, [0, 1, 1, 0, 0]), (45, [0, 0, 0, 1, 0]), (75, [0, 0, 1, 0, 0])],
)
def test_parity_vectors_of_worked_example(value, expected):
    assert parity_vector(relation_for(value)).to_list() == expected


def test_parity_sign_bit():
    assert parity_vector(SmoothRelation(5, True, (0, 0, 0, 0))).to_list() == [1, 0, 0, 0, 0]


@given(st.lists(st.integers(min_value=0, max_value=20), min_size=1, max_size=12), st.data())
def test_parity_ignores_even_increments(exps, data):
    j = data.draw(st.integers(min_value=0, max_value=len(exps) - 1))
    bumped = list(exps)
    bumped[j] += 2
    a = parity_vector(SmoothRelation(1, False, tuple(exps)))
    b = parity_vector(SmoothRelation(1, False, tuple(bumped)))
    assert a == b


def test_build_matrix_worked_example():
    rels = [relation_for(v) for v in (6, 45, 75)]
    m = build_matrix(rels, 5)
    assert (m.num_rows, m.num_cols) == (5, 3)
    assert m.rows[0].bits == 0
    # brute force: no nonempty subset of {6, 45, 75} has an even-exponent product
    assert brute_kernel(m) == {0}
    assert kernel_basis(m) == []


def test_build_matrix_columns_read_back():
    rng = random.Random(5)
    rels = [
        SmoothRelation(i + 1, rng.random() < 0.5, tuple(rng.randrange(5) for _ in range(9)))
        for i in range(30)
    ]
    m = build_matrix(rels, 10)
    for i, rel in enumerate(rels):
        assert m.column(i) == parity_vector(rel)


def test_build_matrix_square_relation_gives_zero_column():
    m = build_matrix([SmoothRelation(9, False, (2, 0, 4, 0))], 5)
    assert m.column(0).bits == 0
    assert kernel_basis(m) == [Gf2Vector(1, 1)]


def test_build_matrix_rejects_empty_and_mismatched():
    with pytest.raises(ValueError):
        build_matrix([], 3)
    with pytest.raises(ValueError):
        build_matrix([SmoothRelation(1, False, (1,))], 5)


def test_kernel_of_zero_and_identity():
    zero = Gf2Matrix(tuple(Gf2Vector(0, 3) for _ in range(2)), 3)
    assert len(kernel_basis(zero)) == 3
    ident = Gf2Matrix(tuple(Gf2Vector(1 << i, 3) for i in range(3)), 3)
    assert kernel_basis(ident) == []


def test_kernel_matches_brute_force_random():
    rng = random.Random(77)
    for _ in range(100):
        cols = rng.randrange(1, 11)
        m = random_matrix(rng, rng.randrange(1, 12), cols)
        basis = kernel_basis(m)
        assert all(v and not (m @ v).bits for v in basis)
        assert len(span(basis)) == 2 ** len(basis)  # independent
        assert span(basis) == brute_kernel(m)


def test_kernel_dimension_lower_bound():
    rng = random.Random(1)
    m = random_matrix(rng, 40, 60)
    assert len(kernel_basis(m)) >= 60 - 40


def test_enumerate_dependencies_order():
    b1, b2 = Gf2Vector(0b011, 3), Gf2Vector(0b110, 3)
    assert list(enumerate_dependencies([b1, b2], 3)) == [b1, b2, Gf2Vector(0b101, 3)]
    assert list(enumerate_dependencies([b1, b2], 2)) == [b1, b2]
    assert list(enumerate_dependencies([], 10)) == []
    assert list(enumerate_dependencies([b1], 0)) == []


def test_enumerated_dependencies_are_kernel_vectors():
    rng = random.Random(9)
    m = random_matrix(rng, 8, 16)
    deps = list(enumerate_dependencies(kernel_basis(m), 50))
    assert len(deps) == len({d.bits for d in deps})
    for d in deps:
        assert d and not (m @ d).bits


def test_matmul_against_definition():
    rng = random.Random(4)
    m = random_matrix(rng, 5, 6)
    for bits in product((0, 1), repeat=6):
        v = Gf2Vector.from_list(bits)
        expected = [
            sum(m.rows[j][i] * bits[i] for i in range(6)) % 2 for j in range(5)
        ]
        assert (m @ v).to_list() == expected
