"""Shared test utilities: an independent brute-force expansion oracle and
seeded random generators for forms, ideals, circuits, and identities."""

import itertools

from sps import (
    Circuit,
    FormIdeal,
    LinearForm,
    SpanBasis,
    Term,
)


def brute_expand(circuit):
    """Independent expansion oracle: enumerate every choice of one coefficient
    per form and count monomials. Exponential in the degree; for tiny inputs
    only. Returns {exponent tuple: nonzero coefficient}."""
    field = circuit.field
    total = {}
    for t in circuit.terms:
        nz = [
            [(i, c) for i, c in enumerate(f.coeffs) if c != field.zero]
            for f in t.forms
        ]
        for pick in itertools.product(*nz):
            e = [0] * circuit.n
            coef = t.coef
            for i, c in pick:
                e[i] += 1
                coef = field.mul(coef, c)
            key = tuple(e)
            s = field.add(total.get(key, field.zero), coef)
            if s == field.zero:
                total.pop(key, None)
            else:
                total[key] = s
    return total


def brute_product(field, n, forms, coef=None):
    """brute_expand of a single term."""
    c = field.one if coef is None else field.element(coef)
    return brute_expand(Circuit(field, n, [Term(field, c, list(forms))]))


def random_form(rng, field, n, avoid_span=None):
    """Random nonzero form, optionally outside a given span."""
    while True:
        f = LinearForm(field, [rng.randrange(field.p) for _ in range(n)])
        if f.is_zero:
            continue
        if avoid_span is not None and avoid_span.contains(f.coeffs):
            continue
        return f


def random_ideal(rng, field, n, r):
    """Random form-ideal with r independent generators."""
    span = SpanBasis.empty(field, n)
    gens = []
    while len(gens) < r:
        g = random_form(rng, field, n, avoid_span=span)
        span, _ = span.insert(g.coeffs)
        gens.append(g)
    return FormIdeal(field, n, gens)


def random_unit(rng, field):
    while True:
        c = field.rand_element(rng)
        if c != field.zero:
            return c


def random_span_element(rng, field, ideal, level):
    """Random element of the level-j prefix span (possibly zero)."""
    f = LinearForm(field, [0] * ideal.n)
    for g in ideal.generators[:level]:
        f = f.add(g.scale(rng.randrange(field.p)))
    return f


def random_circuit(rng, field, n, k, d):
    """Random circuit with k terms of degree d (forms nonzero, coefs nonzero)."""
    terms = []
    for _ in range(k):
        terms.append(
            Term(
                field,
                random_unit(rng, field),
                [random_form(rng, field, n) for _ in range(d)],
            )
        )
    return Circuit(field, n, terms)


def random_pair_identity(rng, field, n, d):
    """Two-term identity T + T' with T' a scalar-scrambled shuffle of T.

    Each form of T reappears scaled by a random unit; the second constant
    compensates so the sum is exactly zero.
    """
    forms = [random_form(rng, field, n) for _ in range(d)]
    alpha = random_unit(rng, field)
    scalars = [random_unit(rng, field) for _ in range(d)]
    scrambled = [f.scale(c) for f, c in zip(forms, scalars)]
    rng.shuffle(scrambled)
    prod = field.one
    for c in scalars:
        prod = field.mul(prod, c)
    beta = field.neg(field.div(alpha, prod))
    return Circuit(
        field, n, [Term(field, alpha, forms), Term(field, beta, scrambled)]
    )


def random_invertible(rng, field, n):
    """Random invertible n x n matrix over the field (rows as tuples)."""
    while True:
        rows = [
            tuple(field.element(rng.randrange(field.p)) for _ in range(n))
            for _ in range(n)
        ]
        if SpanBasis.from_vectors(field, n, rows).rank == n:
            return rows


def substitute(circuit, matrix, n_out=None):
    """Apply the linear substitution x -> M x to every form.

    matrix has n_out rows of length circuit.n is wrong way round: we map each
    form's coefficient vector a to a' with a'[j] = sum_i a[i] * matrix[i][j],
    so matrix is circuit.n rows of length n_out (n_out >= circuit.n embeds
    into more variables; rows must be independent to preserve structure).
    """
    field = circuit.field
    n_out = n_out or circuit.n
    terms = []
    for t in circuit.terms:
        forms = []
        for f in t.forms:
            coeffs = [field.zero] * n_out
            for i, a in enumerate(f.coeffs):
                if a != field.zero:
                    row = matrix[i]
                    for j in range(n_out):
                        if row[j] != field.zero:
                            coeffs[j] = field.add(coeffs[j], field.mul(a, row[j]))
            forms.append(LinearForm(field, coeffs))
        terms.append(Term(field, t.coef, forms))
    return Circuit(field, n_out, terms)


def random_embedding(rng, field, n_in, n_out):
    """n_in independent rows of length n_out (an injective substitution)."""
    span = SpanBasis.empty(field, n_out)
    rows = []
    while len(rows) < n_in:
        row = tuple(field.element(rng.randrange(field.p)) for _ in range(n_out))
        span2, ins = span.insert(row)
        if ins:
            span = span2
            rows.append(row)
    return rows
