import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sps import SpanBasis, field_make, span_insert, spans_orthogonal
from sps.algebra import Field, is_prime
from sps.errors import BudgetExceededError


def test_prime_fields():
    assert field_make(2).order == 2
    assert field_make(5).order == 5
    with pytest.raises(ValueError):
        Field(4)
    with pytest.raises(ValueError):
        Field(5, 0)


def test_prime_test():
    def reference(m):
        return m >= 2 and all(m % f for f in range(2, m))

    for m in range(-2, 200):
        assert is_prime(m) == reference(m)


def test_extension_field_fermat():
    # x^(2^10) == x for all elements of GF(2^10); spot-check 10 random ones
    F = field_make(2, 10)
    rng = random.Random(42)
    for _ in range(10):
        a = F.rand_element(rng)
        assert F.pow(a, 2**10) == a


def test_modulus_is_deterministic_and_monic():
    F = field_make(2, 10)
    assert F.modulus == Field(2, 10).modulus
    assert F.modulus[-1] == 1
    assert len(F.modulus) == 11
    # the canonical degree-2 modulus over GF(2) is x^2 + x + 1
    assert Field(2, 2).modulus == (1, 1, 1)


def test_irreducible_search_budget():
    with pytest.raises(BudgetExceededError):
        Field(2, 30, search_budget=1000)


@pytest.mark.parametrize("p,e", [(2, 4), (5, 2), (3, 3)])
def test_field_axioms_random_triples(p, e):
    F = field_make(p, e)
    rng = random.Random(7)
    for _ in range(1000):
        a, b, c = (F.rand_element(rng) for _ in range(3))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        if a != F.zero:
            assert F.mul(a, F.inv(a)) == F.one


def test_span_insert_basics():
    F2 = field_make(2)
    b = SpanBasis.empty(F2, 3)
    b, ins = span_insert(b, (1, 0, 1))
    assert ins and b.rank == 1
    b2, ins = span_insert(b, (1, 0, 1))
    assert not ins and b2 is b

    F5 = field_make(5)
    b = SpanBasis.from_vectors(F5, 3, [(1, 0, 0), (0, 1, 0)])
    _, ins = b.insert((2, 3, 0))
    assert not ins


def test_span_membership_and_coordinates():
    F5 = field_make(5)
    b = SpanBasis.from_vectors(F5, 4, [(1, 2, 0, 0), (0, 0, 1, 3)])
    v = (2, 4, 3, 9 % 5)
    assert b.contains(v)
    coords = b.coordinates(v)
    assert coords == (2, 3)
    assert not b.contains((1, 0, 0, 0))
    assert b.coordinates((1, 0, 0, 0)) is None


def test_spans_orthogonal_examples():
    F2 = field_make(2)
    x1 = SpanBasis.from_vectors(F2, 3, [(1, 0, 0)])
    x2 = SpanBasis.from_vectors(F2, 3, [(0, 1, 0)])
    x3 = SpanBasis.from_vectors(F2, 3, [(0, 0, 1)])
    x1x2 = SpanBasis.from_vectors(F2, 3, [(1, 1, 0)])
    both = SpanBasis.from_vectors(F2, 3, [(1, 0, 0), (0, 1, 0)])
    assert spans_orthogonal([x1, x2, x3])
    assert not spans_orthogonal([x1, x1x2, x2])
    assert spans_orthogonal([both, x3])


vectors_f2 = st.lists(
    st.tuples(*[st.integers(0, 1)] * 5), min_size=1, max_size=8
)
vectors_f5 = st.lists(
    st.tuples(*[st.integers(0, 4)] * 4), min_size=1, max_size=8
)


@settings(max_examples=60, deadline=None)
@given(vecs=vectors_f2, data=st.data())
def test_span_insertion_order_invariance_f2(vecs, data):
    # the reduced echelon form is canonical, so any insertion order must
    # rebuild the identical basis
    F = field_make(2)
    perm = data.draw(st.permutations(vecs))
    a = SpanBasis.from_vectors(F, 5, vecs)
    b = SpanBasis.from_vectors(F, 5, perm)
    assert a == b
    assert a.rank <= 5


@settings(max_examples=60, deadline=None)
@given(vecs=vectors_f5, data=st.data())
def test_span_insertion_order_invariance_f5(vecs, data):
    F = field_make(5)
    perm = data.draw(st.permutations(vecs))
    assert SpanBasis.from_vectors(F, 4, vecs) == SpanBasis.from_vectors(F, 4, perm)


def test_rank_never_exceeds_dimension():
    F2 = field_make(2)
    rng = random.Random(3)
    b = SpanBasis.empty(F2, 4)
    for _ in range(5):
        b, _ = b.insert(tuple(rng.randrange(2) for _ in range(4)))
    assert b.rank <= 4
