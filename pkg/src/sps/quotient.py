"""Form-ideals, reduction modulo an ideal, and gcd/simple-part decomposition.

A form-ideal is generated by linearly independent nonzero linear forms; the
quotient by it is again a polynomial ring, so reduction is plain Gaussian
elimination on coefficient vectors and products of forms factor uniquely
modulo the ideal. The zero ideal is the same type with no generators, and
every operation treats it uniformly as "span is {0}".
"""

from __future__ import annotations

from .algebra import Field, SpanBasis
from .circuit import Circuit, ZeroOracle, product_of_forms
from .errors import VerificationError
from .forms import LinearForm, Term, normalize, similar

_EXPANSION_CHECK_CAP = 20_000


class FormIdeal:
    """Ordered form-ideal with echelon data for every generator prefix.

    prefix(j) is the span of the first j generators (prefix(0) = {0}), which
    is what level-j matching certificates quantify over. Generators must be
    nonzero and linearly independent; an empty generator list is the
    distinguished zero ideal.
    """

    __slots__ = ("field", "n", "generators", "_prefixes")

    def __init__(self, field: Field, n: int, generators=()):
        self.field = field
        self.n = n
        gens = tuple(generators)
        prefixes = [SpanBasis.empty(field, n)]
        for g in gens:
            if not isinstance(g, LinearForm) or g.field != field or g.n != n:
                raise ValueError("generators must be forms over the ideal's space")
            if g.is_zero:
                raise ValueError("ideal generators must be nonzero")
            nxt, inserted = prefixes[-1].insert(g.coeffs)
            if not inserted:
                raise ValueError("ideal generators must be linearly independent")
            prefixes.append(nxt)
        self.generators = gens
        self._prefixes = tuple(prefixes)

    @property
    def r(self) -> int:
        return len(self.generators)

    @property
    def is_zero_ideal(self) -> bool:
        return not self.generators

    @property
    def span(self) -> SpanBasis:
        return self._prefixes[-1]

    def prefix(self, j: int) -> SpanBasis:
        return self._prefixes[j]

    def span_contains(self, f: LinearForm) -> bool:
        return self.span.contains(f.coeffs)

    def prefix_contains(self, j: int, f: LinearForm) -> bool:
        return self._prefixes[j].contains(f.coeffs)

    def reduce(self, f: LinearForm) -> LinearForm:
        return LinearForm(self.field, self.span.reduce(f.coeffs))

    def reduce_prefix(self, j: int, f: LinearForm) -> LinearForm:
        return LinearForm(self.field, self._prefixes[j].reduce(f.coeffs))

    def extended(self, g: LinearForm) -> "FormIdeal":
        return FormIdeal(self.field, self.n, self.generators + (g,))

    def __eq__(self, other):
        return (
            isinstance(other, FormIdeal)
            and self.field == other.field
            and self.n == other.n
            and tuple(g.coeffs for g in self.generators)
            == tuple(g.coeffs for g in other.generators)
        )

    def __hash__(self):
        return hash((self.field, self.n, tuple(g.coeffs for g in self.generators)))

    def __repr__(self):
        return f"FormIdeal({[str(g) for g in self.generators]})"


def zero_ideal(field: Field, n: int) -> FormIdeal:
    return FormIdeal(field, n, ())


def reduce_form(f: LinearForm, ideal: FormIdeal) -> LinearForm:
    """Unique representative of f modulo the ideal's span; zero iff f is in it."""
    return ideal.reduce(f)


def similar_mod(f: LinearForm, g: LinearForm, ideal: FormIdeal):
    """Scalar c with f = c*g modulo the ideal, or None.

    When both forms reduce to zero the answer is 1 by convention (degenerate
    case: every scalar works).
    """
    return similar(ideal.reduce(f), ideal.reduce(g))


def reduced_class_key(f: LinearForm, ideal: FormIdeal):
    """Similarity-class key of f modulo the ideal; None for forms in the span."""
    red = ideal.reduce(f)
    if red.is_zero:
        return None
    return normalize(red)[0].coeffs


def is_regular(circuit: Circuit, ideal: FormIdeal) -> bool:
    """True iff no term vanishes mod the ideal, i.e. no form lies in its span.

    A multiplication term is zero modulo a form-ideal exactly when one of its
    forms is in the span (the quotient ring is an integral domain).
    """
    return all(
        not ideal.span_contains(f) for t in circuit.terms for f in t.forms
    )


def reduce_circuit(circuit: Circuit, ideal: FormIdeal):
    """Rewrite every form by its reduced representative, dropping terms that
    vanish. Returns None when all terms vanish (the reduction is literally 0);
    otherwise the returned circuit is zero in R iff the input is zero mod the
    ideal."""
    field = circuit.field
    new_terms = []
    for t in circuit.terms:
        forms = []
        dead = False
        for f in t.forms:
            red = ideal.reduce(f)
            if red.is_zero:
                dead = True
                break
            forms.append(red)
        if not dead:
            new_terms.append(Term(field, t.coef, forms))
    if not new_terms:
        return None
    return Circuit(field, circuit.n, new_terms)


def is_zero_mod(circuit: Circuit, ideal: FormIdeal, oracle: ZeroOracle | None = None) -> bool:
    reduced = reduce_circuit(circuit, ideal)
    if reduced is None:
        return True
    return (oracle or ZeroOracle()).is_zero(reduced)


class GcdData:
    """Certified common-factor decomposition of a subcircuit modulo an ideal.

    Holds the common factor list u (a sublist of the first term), the matched
    sublist u_lists[q] of each term, a certified matching u -> u_lists[q] per
    term, and the residual simple part. The defining identity
    M(u_lists[q]) = sc(pi_q) * M(u) modulo the ideal is certified edge-by-edge
    always, and re-checked by full expansion on small instances.
    """

    __slots__ = ("circuit", "ideal", "u", "u_lists", "u_positions", "matchings", "sim")

    def __init__(self, circuit, ideal, u, u_lists, u_positions, matchings, sim):
        self.circuit = circuit
        self.ideal = ideal
        self.u = u
        self.u_lists = u_lists
        self.u_positions = u_positions
        self.matchings = matchings
        self.sim = sim

    def gcd_term(self) -> Term | None:
        """M(u) as a term (None when u is empty: the gcd is the constant 1)."""
        if not self.u:
            return None
        return Term(self.circuit.field, self.circuit.field.one, self.u)

    def to_dict(self) -> dict:
        from .circuit import _element_to_json

        field = self.circuit.field
        return {
            "ideal": [[_element_to_json(field, c) for c in g.coeffs]
                      for g in self.ideal.generators],
            "u": [[_element_to_json(field, c) for c in f.coeffs] for f in self.u],
            "u_positions": {str(q): list(pos) for q, pos in self.u_positions.items()},
            "sc": {str(q): _element_to_json(field, m.scaling_factor())
                   for q, m in self.matchings.items()},
        }


def gcd_data(circuit: Circuit, ideal: FormIdeal, expansion_check: bool | None = None) -> GcdData:
    """Common-factor data of a regular subcircuit modulo a form-ideal.

    The gcd list u is the maximal sublist of the first term whose product
    divides every term mod the ideal: per similarity class mod the ideal, u
    carries the minimum multiplicity over the terms. Candidate forms are
    taken in list order of the first term and matched to targets in list
    order of each term, which pins the decomposition to one deterministic
    representative. Raises on non-regular input.
    """
    from . import matching as _matching

    if not is_regular(circuit, ideal):
        raise ValueError("gcd data requires a circuit that is regular mod the ideal")
    field = circuit.field
    keys_per_term = [
        [reduced_class_key(f, ideal) for f in t.forms] for t in circuit.terms
    ]

    counts = []
    for keys in keys_per_term:
        c: dict = {}
        for k in keys:
            c[k] = c.get(k, 0) + 1
        counts.append(c)
    common = {
        k: min(c.get(k, 0) for c in counts)
        for k in counts[0]
        if all(c.get(k, 0) for c in counts)
    }

    def pick(term_idx):
        taken: dict = {}
        positions = []
        for pos, k in enumerate(keys_per_term[term_idx]):
            have = taken.get(k, 0)
            if common.get(k, 0) > have:
                taken[k] = have + 1
                positions.append(pos)
        return positions

    u_pos0 = pick(0)
    u = tuple(circuit.terms[0].forms[p] for p in u_pos0)
    u_keys = [keys_per_term[0][p] for p in u_pos0]

    u_lists: dict[int, tuple] = {}
    u_positions: dict[int, tuple] = {}
    matchings: dict[int, object] = {}
    sim_terms = []
    for q, t in enumerate(circuit.terms):
        pos_q = pick(q)
        u_positions[q] = tuple(pos_q)
        forms_q = tuple(t.forms[p] for p in pos_q)
        u_lists[q] = forms_q
        # class-by-class pairing, both sides in list order
        by_key: dict = {}
        for slot, p in enumerate(pos_q):
            by_key.setdefault(keys_per_term[q][p], []).append(slot)
        cursor = {k: 0 for k in by_key}
        sigma = []
        for k in u_keys:
            slot = by_key[k][cursor[k]]
            cursor[k] += 1
            sigma.append(slot)
        pi = _matching.OrderedMatching.build(ideal, u, forms_q, tuple(sigma))
        if not pi.is_ordered:
            raise VerificationError("gcd matching failed to validate as ordered")
        matchings[q] = pi
        leftover = [t.forms[p] for p in range(t.degree) if p not in set(pos_q)]
        sim_terms.append(
            Term(field, field.mul(pi.scaling_factor(), t.coef), leftover)
        )

    sim = Circuit(field, circuit.n, sim_terms)
    gd = GcdData(circuit, ideal, u, u_lists, u_positions, matchings, sim)
    if expansion_check is None:
        expansion_check = _gcd_expansion_cost(circuit, u) <= _EXPANSION_CHECK_CAP
    if expansion_check:
        _verify_gcd_by_expansion(gd)
    return gd


def _gcd_expansion_cost(circuit: Circuit, u) -> int:
    import math

    d = len(u)
    if d == 0:
        return 0
    n = circuit.n
    return circuit.k * math.comb(d + n - 1, n - 1)


def _verify_gcd_by_expansion(gd: GcdData) -> None:
    """Check M(u_lists[q]) = sc(pi_q) * M(u) mod the ideal by full expansion."""
    field = gd.circuit.field
    n = gd.circuit.n
    ideal = gd.ideal
    mu = product_of_forms(field, n, [ideal.reduce(f) for f in gd.u])
    for q, forms_q in gd.u_lists.items():
        muq = product_of_forms(field, n, [ideal.reduce(f) for f in forms_q])
        sc = gd.matchings[q].scaling_factor()
        if not muq.add(mu.scale(field.neg(sc))).is_zero:
            raise VerificationError(
                f"gcd expansion check failed for term {q}: M(U_q) != sc * M(U) mod I"
            )


def simple_part(circuit: Circuit, ideal: FormIdeal) -> Circuit:
    """Residual circuit after dividing out the gcd modulo the ideal.

    Satisfies C_Q = gcd * sim (mod I); when C_Q is an identity mod I the
    simple part is a simple identity mod I.
    """
    return gcd_data(circuit, ideal).sim
