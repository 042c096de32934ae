"""Depth-3 circuits: evaluation, zero testing, structure checks, file format.

A circuit is a sum of multiplication terms, each a nonzero constant times a
product of nonzero linear forms. Zero-ness is never structural: a circuit
value is a syntax tree, and "computes the zero polynomial" is always the
verdict of one of the two oracles below (exact sparse expansion after rank
compression, or seeded random evaluation over a large enough field).
"""

from __future__ import annotations

import itertools
import json
import math
import os
import random

from .algebra import Field, SpanBasis, field_make, gf2_mulmod
from .errors import BudgetExceededError
from .forms import LinearForm, Term, similarity_key

DEFAULT_EXPANSION_BUDGET = 10_000_000
DEFAULT_FACTOR_BUDGET = 1_000_000


def _expansion_budget(budget):
    if budget is not None:
        return budget
    env = os.environ.get("SPS_BUDGET")
    return int(env) if env else DEFAULT_EXPANSION_BUDGET


class Circuit:
    """Sum of k multiplication terms over n variables."""

    __slots__ = ("field", "n", "terms")

    def __init__(self, field: Field, n: int, terms):
        terms = tuple(terms)
        if not terms:
            raise ValueError("a circuit needs at least one term")
        for t in terms:
            if not isinstance(t, Term) or t.field != field:
                raise ValueError("circuit terms must be Terms over the circuit field")
            if any(f.n != n for f in t.forms):
                raise ValueError("all forms must have the circuit's dimension")
        self.field = field
        self.n = n
        self.terms = terms

    @property
    def k(self) -> int:
        return len(self.terms)

    @property
    def degree(self) -> int:
        return max(t.degree for t in self.terms)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(t.degree for t in self.terms)

    def all_forms(self) -> tuple[LinearForm, ...]:
        """Concatenation of the term form lists, in term order."""
        out = []
        for t in self.terms:
            out.extend(t.forms)
        return tuple(out)

    def __eq__(self, other):
        return (
            isinstance(other, Circuit)
            and self.field == other.field
            and self.n == other.n
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"Circuit(k={self.k}, d={self.degree}, n={self.n}, field={self.field})"


def make_circuit(field: Field, n: int, term_specs) -> Circuit:
    """Build a circuit from (coef, [coeff-vector, ...]) pairs of raw ints."""
    terms = [
        Term(field, coef, [LinearForm(field, c) for c in vectors])
        for coef, vectors in term_specs
    ]
    return Circuit(field, n, terms)


def subcircuit(circuit: Circuit, q_set) -> Circuit:
    """Restriction to the term indices in q_set (0-based), original order."""
    q = sorted(set(q_set))
    if not q:
        raise ValueError("subcircuit needs a nonempty index set")
    if q[0] < 0 or q[-1] >= circuit.k:
        raise ValueError(f"term indices must lie in [0, {circuit.k})")
    return Circuit(circuit.field, circuit.n, [circuit.terms[i] for i in q])


def circuit_rank(circuit: Circuit) -> int:
    """Rank of the circuit's forms viewed as n-dimensional vectors."""
    return form_basis(circuit).rank


def form_basis(circuit: Circuit) -> SpanBasis:
    return SpanBasis.from_vectors(
        circuit.field, circuit.n, (f.coeffs for f in circuit.all_forms())
    )


# -- sparse polynomials (expansion oracle target) --

class SparsePoly:
    """Multivariate polynomial as a map from exponent tuples to nonzero coefficients."""

    __slots__ = ("field", "nvars", "coeffs")

    def __init__(self, field: Field, nvars: int, coeffs=None):
        self.field = field
        self.nvars = nvars
        self.coeffs = dict(coeffs) if coeffs else {}

    @classmethod
    def const(cls, field, nvars, c):
        c = field.element(c)
        if c == field.zero:
            return cls(field, nvars)
        return cls(field, nvars, {(0,) * nvars: c})

    @classmethod
    def from_form(cls, f: LinearForm):
        field = f.field
        coeffs = {}
        for i, c in enumerate(f.coeffs):
            if c != field.zero:
                e = [0] * f.n
                e[i] = 1
                coeffs[tuple(e)] = c
        return cls(field, f.n, coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def add(self, other: "SparsePoly") -> "SparsePoly":
        field = self.field
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = field.add(out.get(e, field.zero), c)
            if s == field.zero:
                out.pop(e, None)
            else:
                out[e] = s
        return SparsePoly(field, self.nvars, out)

    def scale(self, c) -> "SparsePoly":
        field = self.field
        c = field.element(c)
        if c == field.zero:
            return SparsePoly(field, self.nvars)
        return SparsePoly(
            field, self.nvars, {e: field.mul(c, v) for e, v in self.coeffs.items()}
        )

    def mul(self, other: "SparsePoly") -> "SparsePoly":
        field = self.field
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = field.add(out.get(e, field.zero), field.mul(c1, c2))
                if s == field.zero:
                    out.pop(e, None)
                else:
                    out[e] = s
        return SparsePoly(field, self.nvars, out)

    def __eq__(self, other):
        return (
            isinstance(other, SparsePoly)
            and self.field == other.field
            and self.nvars == other.nvars
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return f"SparsePoly({len(self.coeffs)} monomials over {self.field})"


def product_of_forms(field: Field, n: int, forms) -> SparsePoly:
    """Expanded product of the given forms (1 for the empty list)."""
    acc = SparsePoly.const(field, n, field.one)
    for f in forms:
        acc = acc.mul(SparsePoly.from_form(f))
    return acc


def expand_term(t: Term, n: int) -> SparsePoly:
    return product_of_forms(t.field, n, t.forms).scale(t.coef)


def expand_circuit(circuit: Circuit) -> SparsePoly:
    """Full sparse expansion in the circuit's own variables (small instances)."""
    acc = SparsePoly(circuit.field, circuit.n)
    for t in circuit.terms:
        acc = acc.add(expand_term(t, circuit.n))
    return acc


# -- exact zero test (rank compression + packed sparse expansion) --

def exact_cost_bound(circuit: Circuit, rank: int | None = None) -> int:
    """Upper bound on total monomials touched by the exact expansion."""
    r = circuit_rank(circuit) if rank is None else rank
    if r == 0:
        return len(circuit.terms)
    return sum(math.comb(t.degree + r - 1, r - 1) for t in circuit.terms)


def zero_test_exact(circuit: Circuit, budget: int | None = None) -> bool:
    """Deterministic zero test by sparse expansion in rank-many variables.

    Forms are rewritten in coordinates over an echelon basis of their span, so
    the expansion cost depends on rank(C), not on n. Raises
    BudgetExceededError instead of attempting an oversized expansion; the
    budget is the summed bound C(d + r - 1, r - 1) per term (default 10^7,
    overridable via the SPS_BUDGET environment variable).
    """
    field = circuit.field
    basis = form_basis(circuit)
    r = basis.rank
    if r == 0:
        total = field.zero
        for t in circuit.terms:
            total = field.add(total, t.coef)
        return total == field.zero
    budget = _expansion_budget(budget)
    bound = exact_cost_bound(circuit, r)
    if bound > budget:
        raise BudgetExceededError(
            f"exact expansion bound {bound} exceeds budget {budget}"
        )

    # pack exponent vectors into ints: degree <= d fits in shift-sized fields
    shift_bits = max(1, circuit.degree.bit_length())
    compressed = []
    for t in circuit.terms:
        forms = []
        for f in t.forms:
            coords = basis.coordinates(f.coeffs)
            forms.append(
                tuple((j, coords[j]) for j in range(r) if coords[j] != field.zero)
            )
        compressed.append((t.coef, forms))

    if field.p == 2 and field.e == 1:
        acc: set[int] = set()
        for _, forms in compressed:
            cur = {0}
            for nz in forms:
                nxt: set[int] = set()
                for j, _c in nz:
                    shift = 1 << (shift_bits * j)
                    nxt.symmetric_difference_update(k + shift for k in cur)
                cur = nxt
            acc.symmetric_difference_update(cur)
        return not acc

    add, mul, zero = field.add, field.mul, field.zero
    total: dict = {}
    for coef, forms in compressed:
        cur = {0: coef}
        for nz in forms:
            nxt: dict = {}
            for key, c in cur.items():
                for j, fc in nz:
                    kk = key + (1 << (shift_bits * j))
                    prev = nxt.get(kk)
                    v = mul(c, fc) if prev is None else add(prev, mul(c, fc))
                    if v == zero:
                        nxt.pop(kk, None)
                    else:
                        nxt[kk] = v
            cur = nxt
        for key, c in cur.items():
            prev = total.get(key)
            v = c if prev is None else add(prev, c)
            if v == zero:
                total.pop(key, None)
            else:
                total[key] = v
    return not total


# -- randomized zero test (seeded evaluation, lifted to a large field) --

def _lift_degree(p: int, d: int) -> int:
    m = 1
    while p**m <= 4 * d:
        m += 1
    return m


def zero_test_random(
    circuit: Circuit,
    trials: int = 20,
    seed: int = 0,
    lift_field: Field | None = None,
) -> bool:
    """One-sided randomized zero test: False is always correct; True errs with
    probability at most (d / |E|) ** trials over the evaluation field E.

    When |F| <= 2d the evaluation is lifted to GF(p^m) with p^m > 4d
    (coefficients embed via the prime subfield; only prime-field circuits are
    lifted). Points derive deterministically from (seed, trial), so trials
    are order-independent and runs are reproducible.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    field = circuit.field
    d = circuit.degree
    if lift_field is not None:
        if lift_field.p != field.p:
            raise ValueError("lift field must share the circuit characteristic")
        if field.e != 1 and lift_field != field:
            raise ValueError("extension-field circuits evaluate in their own field")
        ev = lift_field
    elif field.order > 2 * d:
        ev = field
    elif field.e == 1:
        ev = field_make(field.p, _lift_degree(field.p, d))
    else:
        raise ValueError(
            "cannot lift an extension-field circuit; supply lift_field explicitly"
        )

    for t in range(trials):
        rng = random.Random(f"{seed}:{t}")
        if not _trial_is_zero(circuit, ev, rng):
            return False
    return True


def _trial_is_zero(circuit: Circuit, ev: Field, rng) -> bool:
    n = circuit.n
    p = ev.p
    if ev.e == 1:
        point = [rng.randrange(p) for _ in range(n)]
        total = 0
        for t in circuit.terms:
            val = t.coef
            for f in t.forms:
                s = 0
                for a, x in zip(f.coeffs, point):
                    if a:
                        s += a * x
                val = (val * s) % p
                if not val:
                    break
            total = (total + val) % p
        return total == 0

    if p == 2 and circuit.field.e == 1:
        # packed carry-less path: coefficients are bits, points are bit vectors
        order = ev.order
        mod = ev._mod_packed
        deg = ev.e
        point = [rng.randrange(order) for _ in range(n)]
        total = 0
        one = 1
        for t in circuit.terms:
            val = one
            for f in t.forms:
                s = 0
                for a, x in zip(f.coeffs, point):
                    if a:
                        s ^= x
                val = gf2_mulmod(val, s, mod, deg)
                if not val:
                    break
            total ^= val
        return total == 0

    point = [ev.rand_element(rng) for _ in range(n)]
    zero = ev.zero
    own_field = circuit.field == ev
    cf_zero = circuit.field.zero
    total = zero
    for t in circuit.terms:
        val = t.coef if own_field else ev.element(t.coef)
        for f in t.forms:
            s = zero
            for a, x in zip(f.coeffs, point):
                if a != cf_zero:
                    s = ev.add(s, ev.mul(x, a) if own_field else ev.scale_int(a, x))
            val = ev.mul(val, s)
            if val == zero:
                break
        total = ev.add(total, val)
    return total == zero


class ZeroOracle:
    """Zero-test strategy: exact, random, or auto (exact within a size cap)."""

    __slots__ = ("mode", "trials", "seed", "budget", "lift", "auto_budget")

    def __init__(self, mode="auto", trials=20, seed=0, budget=None, lift=None,
                 auto_budget=200_000):
        if mode not in ("exact", "random", "auto"):
            raise ValueError(f"unknown oracle mode {mode!r}")
        self.mode = mode
        self.trials = trials
        self.seed = seed
        self.budget = budget
        self.lift = lift
        self.auto_budget = auto_budget

    def is_zero(self, circuit: Circuit) -> bool:
        if self.mode == "exact":
            return zero_test_exact(circuit, self.budget)
        if self.mode == "random":
            return zero_test_random(circuit, self.trials, self.seed, self.lift)
        if exact_cost_bound(circuit) <= self.auto_budget:
            return zero_test_exact(circuit, self.budget)
        return zero_test_random(circuit, self.trials, self.seed, self.lift)

    def __repr__(self):
        return f"ZeroOracle({self.mode}, trials={self.trials}, seed={self.seed})"


# -- structural predicates --

def is_simple(circuit: Circuit) -> bool:
    """True iff no nonzero form divides every term (no common similarity class)."""
    common = None
    for t in circuit.terms:
        keys = {similarity_key(f) for f in t.forms}
        common = keys if common is None else common & keys
        if not common:
            return True
    return not common


def is_minimal(circuit: Circuit, oracle: ZeroOracle | None = None) -> bool:
    """True iff no proper nonempty subset of the terms sums to zero.

    Singletons are nonzero by the term invariant, so only subsets of size
    >= 2 are oracle-tested; k is capped at 16 (2^k - 2 subset tests).
    """
    k = circuit.k
    if k > 16:
        raise ValueError("minimality testing is capped at k <= 16 terms")
    oracle = oracle or ZeroOracle()
    for mask in range(3, (1 << k) - 1):
        if mask.bit_count() < 2:
            continue
        q = [i for i in range(k) if mask >> i & 1]
        if oracle.is_zero(subcircuit(circuit, q)):
            return False
    return True


# -- homogenization --

def homogenize(field: Field, n: int, affine_terms) -> Circuit:
    """Make affine input homogeneous with one fresh variable.

    Input terms are (coef, [affine vectors]) where each affine vector has
    length n + 1: coefficients of x_1..x_n followed by the constant. The
    constant c becomes c * x_{n+1}, shorter terms are padded with copies of
    x_{n+1} up to the maximum degree, and the result sums to zero iff the
    input does. Exactly one variable is appended even for homogeneous input.
    """
    affine_terms = list(affine_terms)
    if not affine_terms:
        raise ValueError("homogenize needs at least one term")
    dmax = max(len(vectors) for _, vectors in affine_terms)
    fresh = LinearForm(field, [0] * n + [1])
    terms = []
    for coef, vectors in affine_terms:
        forms = []
        for vec in vectors:
            vec = tuple(vec)
            if len(vec) != n + 1:
                raise ValueError(f"affine vectors need length {n + 1} (constant last)")
            forms.append(LinearForm(field, vec))
        forms.extend([fresh] * (dmax - len(forms)))
        terms.append(Term(field, coef, forms))
    return Circuit(field, n + 1, terms)


# -- linear factor enumeration --

def linear_factors(
    circuit: Circuit,
    oracle: ZeroOracle | None = None,
    budget: int = DEFAULT_FACTOR_BUDGET,
) -> tuple[LinearForm, ...]:
    """All normalized forms q with C = 0 modulo (q): the linear factors of the
    computed polynomial, without multiplicity.

    Enumerates every normalized candidate over the prime field ((p^n - 1) /
    (p - 1) of them), substitutes the pivot variable away, and zero-tests the
    shrunken circuit. The caller should check the circuit is nonzero first;
    on an identity the enumeration degenerates to every form.
    """
    field = circuit.field
    if field.e != 1:
        raise ValueError("linear factor enumeration supports prime fields only")
    p, n = field.p, circuit.n
    n_candidates = (p**n - 1) // (p - 1)
    if n_candidates > budget:
        raise BudgetExceededError(
            f"{n_candidates} candidate forms exceed budget {budget}"
        )
    oracle = oracle or ZeroOracle()
    found = []
    for piv in range(n):
        for tail in itertools.product(range(p), repeat=n - piv - 1):
            coeffs = (0,) * piv + (1,) + tail
            if _divides(circuit, piv, coeffs, oracle):
                found.append(LinearForm(field, coeffs))
    return tuple(found)


def _divides(circuit: Circuit, piv: int, q_coeffs, oracle: ZeroOracle) -> bool:
    """Test C = 0 mod (q) by substituting x_piv = -sum(tail) and zero-testing."""
    field = circuit.field
    n = circuit.n
    keep = [j for j in range(n) if j != piv]
    new_terms = []
    for t in circuit.terms:
        forms = []
        vanished = False
        for f in t.forms:
            c = f.coeffs[piv]
            if c != field.zero:
                reduced = [
                    field.sub(f.coeffs[j], field.mul(c, q_coeffs[j])) for j in keep
                ]
            else:
                reduced = [f.coeffs[j] for j in keep]
            if all(v == field.zero for v in reduced):
                vanished = True
                break
            forms.append(LinearForm(field, reduced))
        if not vanished:
            new_terms.append(Term(field, t.coef, forms))
    if not new_terms:
        return True
    return oracle.is_zero(Circuit(field, n - 1, new_terms))


# -- persistent circuit format --

def _element_to_json(field: Field, el):
    return el if field.e == 1 else list(el)


def _element_from_json(field: Field, obj):
    if field.e == 1:
        if not isinstance(obj, int):
            raise ValueError("prime-field elements serialize as ints")
        if not 0 <= obj < field.p:
            raise ValueError(f"element {obj} out of range [0, {field.p})")
        return obj
    if not isinstance(obj, list) or len(obj) != field.e:
        raise ValueError(f"extension elements serialize as length-{field.e} arrays")
    el = tuple(obj)
    if not field.is_element(el):
        raise ValueError("extension element coefficients out of range")
    return el


def circuit_to_dict(circuit: Circuit) -> dict:
    field = circuit.field
    return {
        "p": field.p,
        "e": field.e,
        "n": circuit.n,
        "terms": [
            {
                "coef": _element_to_json(field, t.coef),
                "forms": [
                    [_element_to_json(field, c) for c in f.coeffs] for f in t.forms
                ],
            }
            for t in circuit.terms
        ],
    }


def circuit_from_dict(obj: dict) -> Circuit:
    field = field_make(int(obj["p"]), int(obj["e"]))
    n = int(obj["n"])
    terms = []
    for tobj in obj["terms"]:
        coef = _element_from_json(field, tobj["coef"])
        forms = []
        for vec in tobj["forms"]:
            if len(vec) != n:
                raise ValueError(f"form has {len(vec)} coordinates, expected {n}")
            forms.append(LinearForm(field, [_element_from_json(field, c) for c in vec]))
        terms.append(Term(field, coef, forms))
    return Circuit(field, n, terms)


def dumps_circuit(circuit: Circuit) -> str:
    """Canonical emission: sorted keys, no whitespace variance."""
    return json.dumps(circuit_to_dict(circuit), sort_keys=True, separators=(",", ":"))


def loads_circuit(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))
