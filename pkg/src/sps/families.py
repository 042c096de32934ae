"""Generators for the concrete identity families and counterexamples.

Everything here is constructed, then *verified*: where a generator's output is
claimed simple, minimal, and zero with a known rank, the claim is re-checked
with the circuit oracles (cheap insurance against variable-bookkeeping bugs),
and failures raise rather than warn.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Field, field_make, spans_orthogonal
from .circuit import Circuit, ZeroOracle, circuit_rank, is_minimal, is_simple
from .errors import VerificationError
from .forms import LinearForm, Term
from .matching import OrderedMatching, find_matching
from .quotient import FormIdeal

FAMILY_FORMS_BUDGET = 250_000


def _parity_forms(field: Field, n: int, r: int, parity: int, with_last: bool):
    """Forms b_1 x_1 + ... + b_{r-1} x_{r-1} (+ x_r), b ranging over bit
    vectors of the given parity, enumerated with b_1 as the low bit."""
    out = []
    for bits in range(1 << (r - 1)):
        if bits.bit_count() % 2 != parity:
            continue
        coeffs = [0] * n
        for j in range(r - 1):
            if bits >> j & 1:
                coeffs[j] = 1
        if with_last:
            coeffs[r - 1] = 1
        out.append(LinearForm(field, coeffs))
    return out


def gen_ks(r: int) -> Circuit:
    """The 3-term parity-product identity over GF(2) in r variables.

    Degree is 2^(r-2), top fanin 3, and the rank is exactly r = log2(d) + 2;
    the circuit is simple, minimal, and zero.
    """
    if r < 2:
        raise ValueError("the parity family needs r >= 2")
    field = field_make(2)
    t1 = Term(field, 1, _parity_forms(field, r, r, 1, with_last=False))
    t2 = Term(field, 1, _parity_forms(field, r, r, 0, with_last=True))
    t3 = Term(field, 1, _parity_forms(field, r, r, 1, with_last=True))
    return Circuit(field, r, [t1, t2, t3])


def _shift_forms(term: Term, n_total: int, offset: int) -> Term:
    field = term.field
    forms = [
        LinearForm(field, (0,) * offset + f.coeffs + (0,) * (n_total - offset - f.n))
        for f in term.forms
    ]
    return Term(field, term.coef, forms)


def gen_joined(base_identity: Circuit, block: Circuit,
               oracle: ZeroOracle | None = None, verify: bool = True) -> Circuit:
    """Join a k-term identity with a 3-term block on fresh variables.

    With base terms T_1..T_k and block terms S_1, S_2, S_3 (shifted onto
    fresh variables appended after the base's), the result is
    (T_1 + .. + T_{k-1}) * S_1 - T_k * S_2 - T_k * S_3: degree d + d_block,
    fanin k + 1, rank r + r_block. The output's zero / simple / minimal /
    rank claims are re-verified unless verify=False.
    """
    field = base_identity.field
    if block.field != field:
        raise ValueError("join requires a common field")
    if block.k != 3:
        raise ValueError("the joined block must have exactly 3 terms")
    n = base_identity.n + block.n
    base_terms = [_shift_forms(t, n, 0) for t in base_identity.terms]
    s1, s2, s3 = (_shift_forms(t, n, base_identity.n) for t in block.terms)

    def merge(t: Term, s: Term, negate: bool) -> Term:
        coef = field.mul(t.coef, s.coef)
        if negate:
            coef = field.neg(coef)
        return Term(field, coef, t.forms + s.forms)

    last = base_terms[-1]
    terms = [merge(t, s1, False) for t in base_terms[:-1]]
    terms.append(merge(last, s2, True))
    terms.append(merge(last, s3, True))
    out = Circuit(field, n, terms)

    if verify:
        oracle = oracle or ZeroOracle(trials=40)
        expect_rank = circuit_rank(base_identity) + circuit_rank(block)
        if out.k != base_identity.k + 1:
            raise VerificationError("join produced the wrong fanin")
        if out.degree != base_identity.degree + block.degree:
            raise VerificationError("join produced the wrong degree")
        if circuit_rank(out) != expect_rank:
            raise VerificationError("join produced the wrong rank")
        if not oracle.is_zero(out):
            raise VerificationError("join output failed the zero oracle")
        if not is_simple(out):
            raise VerificationError("join output is not simple")
        if not is_minimal(out, oracle):
            raise VerificationError("join output is not minimal")
    return out


def gen_family(r: int, i: int, oracle: ZeroOracle | None = None,
               verify: bool = True, budget: int = FAMILY_FORMS_BUDGET) -> Circuit:
    """i-fold join of the parity identity with fresh copies of itself.

    Member i has degree (i+1) * 2^(r-2), fanin i + 3 and rank (i+1) * r, so
    the family realizes rank growing like (k/3) * log2(d); the generator
    re-checks rank > (k/3) * log2(d) whenever 3 <= i < d.
    """
    import math

    if r < 2 or i < 0:
        raise ValueError("family parameters need r >= 2 and i >= 0")
    base = gen_ks(r)
    d = base.degree
    total_forms = (i + 3) * (i + 1) * d
    if total_forms > budget:
        raise VerificationError(
            f"family member needs {total_forms} forms, over budget {budget}"
        )
    member = base
    for _ in range(i):
        member = gen_joined(member, gen_ks(r), oracle=oracle, verify=verify)
    if verify:
        rank = circuit_rank(member)
        if (member.k, member.degree, rank) != (i + 3, (i + 1) * d, (i + 1) * r):
            raise VerificationError("family member has wrong parameters")
        if 3 <= i < d and not rank > (member.k / 3) * math.log2(member.degree):
            raise VerificationError("family member misses the rank growth bound")
    return member


@dataclass(frozen=True)
class TightLists:
    """Output of gen_tight_lists: the parity-split form lists with the ideals
    whose matchings verified, plus how many of the claimed count did."""

    field: Field
    n: int
    u: tuple[LinearForm, ...]
    v: tuple[LinearForm, ...]
    candidate_ideals: tuple[FormIdeal, ...]
    verified: tuple[bool, ...]
    ideals: tuple[FormIdeal, ...]
    matchings: tuple[OrderedMatching, ...]
    claimed: int

    @property
    def verified_count(self) -> int:
        return len(self.ideals)


def gen_tight_lists(s: int, p: int = 5) -> TightLists:
    """Nonsimilar lists of size 2^(s-2) admitting many orthogonal matchings.

    U takes the forms b_1 x_1 + ... + b_{s-1} x_{s-1} + x_s with even bit
    parity, V the odd ones. Candidate ideals are (x_1), ..., (x_{s-1}) and
    (x_1 + ... + x_{s-1} + 2 x_s); each is kept only if a matching between U
    and V by it actually verifies, and the report compares the verified count
    against the claimed log2(|U|) + 2. The coefficient 2 needs p > 2, and
    p >= 5 keeps all constructions exact.
    """
    if s < 3:
        raise ValueError("tight lists need s >= 3")
    if p < 5:
        raise ValueError("tight lists need a prime p >= 5")
    field = field_make(p)
    u = tuple(_parity_forms(field, s, s, 0, with_last=True))
    v = tuple(_parity_forms(field, s, s, 1, with_last=True))

    candidates = [
        FormIdeal(field, s, (LinearForm(field, [1 if j == i else 0 for j in range(s)]),))
        for i in range(s - 1)
    ]
    candidates.append(
        FormIdeal(field, s, (LinearForm(field, [1] * (s - 1) + [2]),))
    )

    flags, kept, pis = [], [], []
    for ideal in candidates:
        pi = find_matching(u, v, ideal)
        flags.append(pi is not None)
        if pi is not None:
            kept.append(ideal)
            pis.append(pi)
    claimed = (len(u).bit_length() - 1) + 2  # log2(|U|) + 2, |U| a power of 2
    return TightLists(
        field=field,
        n=s,
        u=u,
        v=v,
        candidate_ideals=tuple(candidates),
        verified=tuple(flags),
        ideals=tuple(kept),
        matchings=tuple(pis),
        claimed=claimed,
    )


def gen_intro_counterexamples(d: int, p: int = 5) -> tuple[Circuit, Circuit]:
    """The standard non-simple and non-minimal zero circuits.

    First: (x_1 ... x_d) - (x_1 ... x_d), rank d, which fails simplicity.
    Second: the 4-term circuit Y*x - Y*x + Z*y - Z*y on disjoint variable
    blocks (degree d + 1, rank 2d + 2), which fails minimality. Both pass the
    zero oracle.
    """
    if d < 1:
        raise ValueError("counterexamples need d >= 1")
    field = field_make(p)

    xs = [LinearForm(field, [1 if j == i else 0 for j in range(d)]) for i in range(d)]
    nonsimple = Circuit(
        field, d, [Term(field, 1, xs), Term(field, field.neg(field.one), xs)]
    )

    n = 2 * d + 2
    ys = [LinearForm(field, [1 if j == i else 0 for j in range(n)]) for i in range(d)]
    zs = [
        LinearForm(field, [1 if j == d + i else 0 for j in range(n)]) for i in range(d)
    ]
    x1 = LinearForm(field, [1 if j == 2 * d else 0 for j in range(n)])
    x2 = LinearForm(field, [1 if j == 2 * d + 1 else 0 for j in range(n)])
    neg = field.neg(field.one)
    nonminimal = Circuit(
        field,
        n,
        [
            Term(field, 1, ys + [x1]),
            Term(field, neg, ys + [x1]),
            Term(field, 1, zs + [x2]),
            Term(field, neg, zs + [x2]),
        ],
    )
    return nonsimple, nonminimal


def tight_lists_orthogonal(t: TightLists) -> bool:
    return spans_orthogonal([i.span for i in t.ideals])
