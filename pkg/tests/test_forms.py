import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sps import (
    Term,
    field_make,
    form,
    lists_coprime,
    lists_similar,
    normalize,
    similar,
    similar_sublist,
)
from helpers import brute_product, random_form, random_ideal

F2 = field_make(2)
F5 = field_make(5)


def test_normalize_examples():
    can, sc = normalize(form(F5, [3, 2]))
    assert can.coeffs == (1, 4) and sc == 3  # 3^-1 = 2 mod 5
    can, sc = normalize(form(F2, [0, 1]))
    assert can.coeffs == (0, 1) and sc == 1
    can, sc = normalize(form(F5, [0, 0, 2]))
    assert can.coeffs == (0, 0, 1) and sc == 2
    with pytest.raises(ValueError):
        normalize(form(F5, [0, 0]))


def test_similar_examples():
    assert similar(form(F5, [2, 2]), form(F5, [1, 1])) == 2
    assert similar(form(F5, [1, 0]), form(F5, [0, 1])) is None
    assert similar(form(F2, [1, 1]), form(F2, [1, 1])) == 1
    # zero forms: similar only to zero
    assert similar(form(F5, [0, 0]), form(F5, [0, 0])) == 1
    assert similar(form(F5, [0, 0]), form(F5, [1, 0])) is None


def test_similar_sublist():
    s = [form(F5, [1, 0, 0]), form(F5, [2, 0, 0]), form(F5, [0, 1, 0])]
    got = similar_sublist(form(F5, [1, 0, 0]), s)
    assert got == (s[0], s[1])
    assert similar_sublist(form(F5, [0, 0, 1]), s[:2]) == ()
    assert similar_sublist(form(F2, [1, 1]), [form(F2, [1, 1])]) == (form(F2, [1, 1]),)


def test_lists_similar_examples():
    u = (form(F5, [1, 0]), form(F5, [0, 1]))
    v = (form(F5, [0, 2]), form(F5, [3, 0]))
    assert lists_similar(u, v) == (1, 0)
    assert lists_similar(
        (form(F5, [1, 0]), form(F5, [1, 0])), (form(F5, [1, 0]), form(F5, [0, 1]))
    ) is None
    assert lists_similar((), ()) == ()


def test_lists_coprime():
    assert lists_coprime([form(F5, [1, 0])], [form(F5, [0, 1])])
    assert not lists_coprime([form(F5, [1, 0])], [form(F5, [2, 0])])
    assert lists_coprime([], [form(F5, [1, 0])])


def test_normalize_idempotent_and_class_keys():
    rng = random.Random(11)
    for _ in range(200):
        f = random_form(rng, F5, 4)
        can, sc = normalize(f)
        can2, sc2 = normalize(can)
        assert can2 == can and sc2 == F5.one
        c = rng.randrange(1, 5)
        assert normalize(f.scale(c))[0] == can


forms_f5 = st.lists(
    st.tuples(*[st.integers(0, 4)] * 3).filter(lambda t: any(t)), min_size=0, max_size=5
)


@settings(max_examples=60, deadline=None)
@given(base=forms_f5, data=st.data())
def test_similar_lists_product_scales(base, data):
    # lists_similar(U, V) present => M(V) = c * M(U) for some scalar c
    scalars = data.draw(
        st.lists(st.integers(1, 4), min_size=len(base), max_size=len(base))
    )
    u = tuple(form(F5, c) for c in base)
    v = tuple(f.scale(c) for f, c in zip(u, scalars))
    v = tuple(data.draw(st.permutations(list(v))))
    sigma = lists_similar(u, v)
    assert sigma is not None
    mu = brute_product(F5, 3, u)
    mv = brute_product(F5, 3, v)
    prod = 1
    for c in scalars:
        prod = F5.mul(prod, c)
    assert mv == {k: F5.mul(prod, val) for k, val in mu.items()}


def test_sublists_in_span_stay_similar():
    # similar lists restricted to the forms inside an ideal's span are similar
    rng = random.Random(23)
    for _ in range(100):
        n = rng.randrange(2, 5)
        size = rng.randrange(0, 6)
        u = [random_form(rng, F5, n) for _ in range(size)]
        v = [f.scale(rng.randrange(1, 5)) for f in u]
        rng.shuffle(v)
        ideal = random_ideal(rng, F5, n, rng.randrange(1, n + 1))
        u_in = [f for f in u if ideal.span_contains(f)]
        v_in = [f for f in v if ideal.span_contains(f)]
        assert lists_similar(u_in, v_in) is not None


def test_term_invariants():
    with pytest.raises(ValueError):
        Term(F5, 0, [form(F5, [1, 0])])
    with pytest.raises(ValueError):
        Term(F5, 1, [form(F5, [0, 0])])
    t = Term(F5, 2, [])
    assert t.degree == 0
