import random

import pytest

from sps import (
    FormIdeal,
    OrderedMatching,
    VerificationError,
    compose,
    disjoint_union,
    doubling_check,
    field_make,
    find_matching,
    form,
    gen_tight_lists,
    invert,
    scaling_factor,
    trivialize,
    unscramble,
)
from helpers import (
    brute_product,
    random_form,
    random_ideal,
    random_span_element,
    random_unit,
)

F2 = field_make(2)
F5 = field_make(5)


def ideal(field, n, *gens):
    return FormIdeal(field, n, [form(field, g) for g in gens])


def random_ordered_matching(rng, field, n_max=6, size_max=8, ideal_=None, domain=None):
    """Forward construction: pick U and push each form through a random valid
    edge map (scalar, prefix level, offset in that prefix span)."""
    n = ideal_.n if ideal_ is not None else rng.randrange(2, n_max + 1)
    if ideal_ is None:
        ideal_ = random_ideal(rng, field, n, rng.randrange(1, min(3, n - 1) + 1))
    if domain is None:
        size = rng.randrange(0, size_max + 1)
        domain = tuple(random_form(rng, field, n) for _ in range(size))
    images = []
    for f in domain:
        for _ in range(50):
            level = rng.randrange(0, ideal_.r + 1)
            if ideal_.prefix_contains(level, f):
                continue
            c = random_unit(rng, field)
            w = random_span_element(rng, field, ideal_, level)
            img = f.scale(c).add(w)
            if not img.is_zero:
                images.append(img)
                break
        else:
            images.append(f)  # fall back to the identity edge
    order = list(range(len(domain)))
    rng.shuffle(order)
    codomain = [None] * len(domain)
    sigma = [0] * len(domain)
    for i, slot in enumerate(order):
        codomain[slot] = images[i]
        sigma[i] = slot
    return OrderedMatching.build(ideal_, domain, tuple(codomain), tuple(sigma))


def test_find_matching_examples():
    i3 = ideal(F5, 3, [0, 0, 1])
    u = (form(F5, [0, 1, 0]), form(F5, [1, 1, 0]))
    v = (form(F5, [0, 1, 1]), form(F5, [1, 1, 2]))
    pi = find_matching(u, v, i3)
    assert pi is not None and pi.is_ordered
    assert [e.c for e in pi.edges] == [1, 1]

    assert find_matching((form(F5, [1, 0, 0]),), (form(F5, [0, 1, 0]),), i3) is None

    u = (form(F5, [1, 1, 0]),)
    pi = find_matching(u, u, i3)
    assert [e.c for e in pi.edges] == [1]
    assert [e.level for e in pi.edges] == [0]


def test_scaling_factor_examples():
    i3 = ideal(F5, 3, [0, 0, 1])
    pi = find_matching((form(F5, [1, 0, 0]),), (form(F5, [2, 0, 1]),), i3)
    assert scaling_factor(pi) == 2

    empty = OrderedMatching.build(i3, (), (), ())
    assert scaling_factor(empty) == 1

    F7 = field_make(7)
    i7 = ideal(F7, 3, [0, 0, 1])
    pi2 = OrderedMatching.build(
        i7,
        (form(F7, [1, 0, 0]), form(F7, [0, 1, 0])),
        (form(F7, [2, 0, 0]), form(F7, [0, 3, 1])),
        (0, 1),
    )
    assert scaling_factor(pi2) == 6


def test_invert_union_compose_examples():
    i3 = ideal(F5, 3, [0, 0, 1])
    pi = find_matching((form(F5, [1, 0, 0]),), (form(F5, [2, 0, 1]),), i3)
    back = invert(pi)
    assert scaling_factor(back) == 3  # 2^-1 mod 5

    empty = OrderedMatching.build(i3, (), (), ())
    assert scaling_factor(disjoint_union(pi, empty)) == scaling_factor(pi)

    round_trip = compose(back, pi)
    assert scaling_factor(round_trip) == 1
    assert all(e.w.is_zero for e in round_trip.edges)

    with pytest.raises(ValueError):
        disjoint_union(pi, find_matching((form(F5, [1, 0, 0]),),
                                         (form(F5, [1, 0, 0]),),
                                         ideal(F5, 3, [0, 1, 0])))


def test_matching_algebra_random():
    rng = random.Random(2024)
    for _ in range(60):
        pi1 = random_ordered_matching(rng, F5)
        assert F5.mul(scaling_factor(pi1), scaling_factor(invert(pi1))) == 1
        pi2 = random_ordered_matching(rng, F5, ideal_=pi1.ideal)
        assert scaling_factor(disjoint_union(pi1, pi2)) == F5.mul(
            scaling_factor(pi1), scaling_factor(pi2)
        )
        pi3 = random_ordered_matching(rng, F5, ideal_=pi1.ideal, domain=pi1.codomain)
        assert scaling_factor(compose(pi3, pi1)) == F5.mul(
            scaling_factor(pi1), scaling_factor(pi3)
        )


def test_unscramble_one_flip_example():
    i3 = ideal(F5, 3, [0, 0, 1])
    x1 = form(F5, [1, 0, 0])
    x1_plus = form(F5, [1, 0, 1])
    u = (x1, x1)
    v = (x1_plus, x1)
    # matching sending the first copy to x1 + x3, the second to x1
    pi = OrderedMatching.build(i3, u, v, (0, 1))
    out = unscramble(pi, [0], [1])  # u' = first copy, v' = the bare x1
    assert out.image(0) == x1
    assert out.image(1) == x1_plus
    # no-op cases
    assert unscramble(pi, [], []).sigma == pi.sigma
    pre_similar = OrderedMatching.build(i3, u, v, (1, 0))
    assert unscramble(pre_similar, [0], [1]).image(0) == x1


def test_trivialize_examples():
    i3 = ideal(F5, 3, [0, 0, 1])
    u = (form(F5, [1, 0, 0]),)
    v = (form(F5, [2, 0, 0]),)
    pi = find_matching(u, v, i3)
    out = trivialize(pi)
    assert out.sigma == pi.sigma and scaling_factor(out) == 2

    # non-similar lists: a matching exists by (x3) but cannot be trivialized
    w = (form(F5, [1, 0, 1]),)
    pi_ns = find_matching(u, w, i3)
    assert pi_ns is not None
    with pytest.raises(ValueError):
        trivialize(pi_ns)


def test_trivialize_preserves_scaling_and_products():
    rng = random.Random(31337)
    for _ in range(60):
        n = rng.randrange(2, 5)
        ideal_ = random_ideal(rng, F5, n, rng.randrange(1, min(3, n - 1) + 1))
        size = rng.randrange(1, 6)
        # domain stays outside sp(I) so the found matching is ordered
        u = tuple(random_form(rng, F5, n, avoid_span=ideal_.span) for _ in range(size))
        v = [f.scale(random_unit(rng, F5)) for f in u]
        rng.shuffle(v)
        v = tuple(v)
        pi = find_matching(u, v, ideal_)
        assert pi is not None
        sc = scaling_factor(pi)
        out = trivialize(pi)
        assert scaling_factor(out) == sc
        assert all(e.w.is_zero for e in out.edges)
        # M(V) = sc * M(U) exactly, via the independent expansion oracle
        mu = brute_product(F5, n, u)
        mv = brute_product(F5, n, v)
        assert mv == {k: F5.mul(sc, val) for k, val in mu.items()}


def test_plain_matching_has_no_scaling_factor():
    # a scalar multiple inside the span still gets an ordered level-0 edge
    i1 = ideal(F5, 3, [1, 0, 0])
    pi0 = find_matching((form(F5, [1, 0, 0]),), (form(F5, [2, 0, 0]),), i1)
    assert pi0 is not None and pi0.is_ordered and pi0.edges[0].level == 0

    # dissimilar forms inside the span only admit a plain edge; sc undefined
    i12 = ideal(F5, 3, [1, 0, 0], [0, 1, 0])
    pi = find_matching((form(F5, [1, 0, 0]),), (form(F5, [0, 1, 0]),), i12)
    assert pi is not None and not pi.is_ordered
    with pytest.raises(ValueError):
        scaling_factor(pi)


def test_unscramble_rejects_dissimilar_sublists():
    i3 = ideal(F5, 3, [0, 0, 1])
    u = (form(F5, [1, 0, 0]), form(F5, [0, 1, 0]))
    pi = find_matching(u, u, i3)
    with pytest.raises(ValueError):
        unscramble(pi, [0], [1])


def test_certificates_rechecked():
    i3 = ideal(F5, 3, [0, 0, 1])
    pi = find_matching((form(F5, [1, 0, 0]),), (form(F5, [2, 0, 1]),), i3)
    from sps.matching import MatchEdge

    bad = MatchEdge(3, pi.edges[0].w, 1, True)
    with pytest.raises(VerificationError):
        OrderedMatching(i3, pi.domain, pi.codomain, pi.sigma, (bad,))


def test_doubling_check_trivial_cases():
    i1 = ideal(F5, 3, [1, 0, 0])
    u = (form(F5, [0, 0, 1]),)
    v = (form(F5, [1, 0, 1]),)
    pi = find_matching(u, v, i1)
    rep = doubling_check(u, v, [i1], [pi])
    assert rep.verdict == "BOUND_OK" and rep.r == 1 and rep.d_prime == 1

    same = (form(F5, [1, 1, 0]), form(F5, [0, 1, 0]))
    pis = [find_matching(same, same, i1)]
    rep2 = doubling_check(same, same, [i1], pis)
    assert rep2.verdict == "SIMILAR"


def test_doubling_check_tight_lists():
    t = gen_tight_lists(4)
    rep = doubling_check(t.u, t.v, list(t.ideals), list(t.matchings))
    assert rep.verdict == "BOUND_OK"
    assert rep.r == 4 and rep.d_prime == 4 and rep.bound == 4.0
    greens = [rd.green_u for rd in rep.rounds]
    assert greens == [1, 2, 4, 4]
    assert all(rd.green_u == rd.green_v for rd in rep.rounds)

    t6 = gen_tight_lists(6)
    rep6 = doubling_check(t6.u, t6.v, list(t6.ideals), list(t6.matchings))
    assert rep6.verdict == "BOUND_OK" and rep6.r == 6 and rep6.bound == 6.0


def test_doubling_check_never_contradicts_on_valid_input():
    rng = random.Random(424242)
    hits = 0
    for _ in range(100):
        n = rng.randrange(3, 6)
        d = rng.randrange(1, 7)
        # orthogonal ideals
        ideals = []
        from sps import SpanBasis

        span = SpanBasis.empty(F5, n)
        while len(ideals) < rng.randrange(1, 3) and span.rank < n - 1:
            g = random_form(rng, F5, n, avoid_span=span)
            span, _ = span.insert(g.coeffs)
            ideals.append(FormIdeal(F5, n, [g]))
        if not ideals:
            continue
        u = tuple(random_form(rng, F5, n) for _ in range(d))
        pi0 = random_ordered_matching(rng, F5, ideal_=ideals[0], domain=u)
        v = pi0.codomain
        kept, pis = [], []
        for i in ideals:
            pi = find_matching(u, v, i)
            if pi is not None:
                kept.append(i)
                pis.append(pi)
        if not kept:
            continue
        hits += 1
        rep = doubling_check(u, v, kept, pis)
        assert rep.verdict != "CONTRADICTION"
    assert hits >= 50  # the construction really exercised the checker


def test_doubling_check_input_validation():
    i1 = ideal(F5, 3, [1, 0, 0])
    i1b = ideal(F5, 3, [2, 0, 0])  # same span: not orthogonal
    u = (form(F5, [0, 0, 1]),)
    v = (form(F5, [1, 0, 1]),)
    pi = find_matching(u, v, i1)
    with pytest.raises(ValueError):
        doubling_check(u, v, [i1, i1b], [pi, pi])
    with pytest.raises(ValueError):
        doubling_check(u, (), [i1], [pi])
