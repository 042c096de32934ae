"""Certified ideal matchings between form lists, their algebra, and the
constructive doubling checker.

A matching between lists U and V by a form-ideal I is a position-level
bijection where each image equals a nonzero multiple of its source plus an
element of the ideal's span. An ordered matching refines this: each edge's
offset lies in the span of a generator *prefix* that does not contain the
source form, which pins a unique per-edge scalar. Edges store the minimal
valid prefix level, so certificates are canonical; every constructor and
every algebra operation re-derives and re-checks them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

from .algebra import SpanBasis, spans_orthogonal
from .errors import VerificationError
from .forms import LinearForm, lists_coprime, lists_similar, similar, similarity_key

if TYPE_CHECKING:  # runtime access goes through ideal methods only
    from .quotient import FormIdeal


class MatchEdge(NamedTuple):
    c: object          # field element, nonzero
    w: LinearForm      # offset, in the level-j prefix span
    level: int         # minimal valid j
    ordered: bool      # False only for edges between forms inside the span


def _derive_edge(ideal, src: LinearForm, dst: LinearForm) -> MatchEdge | None:
    """Minimal-level certificate for dst = c*src + w, or None.

    Scans prefix levels upward; the valid levels form an interval sharing one
    scalar, so the first hit is canonical. Falls back to a plain (unordered)
    edge only when both forms lie in the ideal's span, where c = 1 by
    convention.
    """
    field = src.field
    for j in range(ideal.r + 1):
        if ideal.prefix_contains(j, src):
            break
        c = similar(ideal.reduce_prefix(j, dst), ideal.reduce_prefix(j, src))
        if c is not None:
            return MatchEdge(c, dst.sub(src.scale(c)), j, True)
    else:
        return None
    if ideal.span_contains(src) and ideal.span_contains(dst):
        return MatchEdge(field.one, dst.sub(src), ideal.r, False)
    return None


def _check_edge(ideal, src: LinearForm, dst: LinearForm, e: MatchEdge) -> bool:
    if e.c == src.field.zero:
        return False
    if dst.sub(src.scale(e.c)) != e.w:
        return False
    if not ideal.prefix(e.level).contains(e.w.coeffs):
        return False
    if e.ordered and ideal.prefix_contains(e.level, src):
        return False
    return True


class OrderedMatching:
    """A certified bijection between two form lists by an ordered form-ideal.

    sigma maps domain slot i to codomain slot sigma[i]; edges[i] certifies
    codomain[sigma[i]] = c * domain[i] + w with w in the level-j prefix span.
    The matching validates as *ordered* when every edge does; otherwise it is
    a plain ideal matching (only possible for forms inside the span).
    """

    __slots__ = ("ideal", "domain", "codomain", "sigma", "edges")

    def __init__(self, ideal, domain, codomain, sigma, edges):
        self.ideal = ideal
        self.domain = tuple(domain)
        self.codomain = tuple(codomain)
        self.sigma = tuple(sigma)
        self.edges = tuple(edges)
        self.verify()

    @classmethod
    def build(cls, ideal, domain, codomain, sigma) -> "OrderedMatching":
        """Derive minimal-level certificates for the given position bijection."""
        domain, codomain, sigma = tuple(domain), tuple(codomain), tuple(sigma)
        edges = []
        for i, f in enumerate(domain):
            e = _derive_edge(ideal, f, codomain[sigma[i]])
            if e is None:
                raise VerificationError(
                    f"no matching certificate for slot {i}: {f} -> {codomain[sigma[i]]}"
                )
            edges.append(e)
        return cls(ideal, domain, codomain, sigma, edges)

    def verify(self) -> None:
        d = len(self.domain)
        if len(self.codomain) != d or len(self.sigma) != d or len(self.edges) != d:
            raise VerificationError("matching arity mismatch")
        if sorted(self.sigma) != list(range(d)):
            raise VerificationError("sigma is not a bijection")
        for i, f in enumerate(self.domain):
            if not _check_edge(self.ideal, f, self.codomain[self.sigma[i]], self.edges[i]):
                raise VerificationError(f"edge certificate {i} failed verification")

    @property
    def is_ordered(self) -> bool:
        return all(e.ordered for e in self.edges)

    def __len__(self):
        return len(self.domain)

    def image(self, i: int) -> LinearForm:
        return self.codomain[self.sigma[i]]

    def scaling_factor(self):
        """Product of the unique per-edge scalars (1 for the empty matching)."""
        if not self.is_ordered:
            raise ValueError("scaling factor requires a matching validated as ordered")
        field = self.ideal.field
        out = field.one
        for e in self.edges:
            out = field.mul(out, e.c)
        return out

    def __repr__(self):
        kind = "ordered" if self.is_ordered else "plain"
        return f"OrderedMatching({kind}, size={len(self)}, ideal={self.ideal!r})"


def find_matching(u, v, ideal) -> OrderedMatching | None:
    """Search for a matching between u and v by the ideal.

    One exists iff the multisets of similarity classes modulo the ideal
    agree; pairing is deterministic, in list order within each class. If no
    form of u or v lies in the ideal's span, the result validates as ordered.
    """
    from .quotient import reduced_class_key

    u, v = tuple(u), tuple(v)
    if len(u) != len(v):
        return None
    slots: dict = {}
    for j, g in enumerate(v):
        slots.setdefault(reduced_class_key(g, ideal), []).append(j)
    cursor = {k: 0 for k in slots}
    sigma = []
    for f in u:
        key = reduced_class_key(f, ideal)
        pos = slots.get(key)
        if pos is None or cursor[key] >= len(pos):
            return None
        sigma.append(pos[cursor[key]])
        cursor[key] += 1
    return OrderedMatching.build(ideal, u, v, tuple(sigma))


def scaling_factor(pi: OrderedMatching):
    return pi.scaling_factor()


def invert(pi: OrderedMatching) -> OrderedMatching:
    """Inverse matching; its scaling factor is the inverse scalar."""
    d = len(pi)
    inv_sigma = [0] * d
    for i, j in enumerate(pi.sigma):
        inv_sigma[j] = i
    return OrderedMatching.build(pi.ideal, pi.codomain, pi.domain, tuple(inv_sigma))


def disjoint_union(pi1: OrderedMatching, pi2: OrderedMatching) -> OrderedMatching:
    """Concatenate two matchings by the same ordered ideal; sc multiplies."""
    if pi1.ideal != pi2.ideal:
        raise ValueError("disjoint union requires the same ordered ideal")
    off = len(pi1)
    return OrderedMatching.build(
        pi1.ideal,
        pi1.domain + pi2.domain,
        pi1.codomain + pi2.codomain,
        pi1.sigma + tuple(j + off for j in pi2.sigma),
    )


def compose(pi2: OrderedMatching, pi1: OrderedMatching) -> OrderedMatching:
    """Composite matching pi2 . pi1 (pi1's codomain must be pi2's domain)."""
    if pi1.ideal != pi2.ideal:
        raise ValueError("composition requires the same ordered ideal")
    if pi1.codomain != pi2.domain:
        raise ValueError("composition requires codomain(pi1) == domain(pi2) as lists")
    sigma = tuple(pi2.sigma[j] for j in pi1.sigma)
    return OrderedMatching.build(pi1.ideal, pi1.domain, pi2.codomain, sigma)


def unscramble(pi: OrderedMatching, u_positions, v_positions) -> OrderedMatching:
    """Rearrange images so the given similar sublists are similar *under* the
    matching, leaving a valid matching on the complements.

    u_positions / v_positions index similar sublists of the domain and
    codomain. Works by image flips: a slot of the sublist whose image is not
    an unconsumed similar target swaps images with the slot currently holding
    one. At most len(u_positions) flips; certificates are re-derived.
    """
    u_positions = list(u_positions)
    v_positions = list(v_positions)
    sub_u = [pi.domain[i] for i in u_positions]
    sub_v = [pi.codomain[j] for j in v_positions]
    if lists_similar(sub_u, sub_v) is None:
        raise ValueError("unscramble requires similar sublists")

    sigma = list(pi.sigma)
    inv = [0] * len(sigma)
    for i, j in enumerate(sigma):
        inv[j] = i

    from collections import deque

    free: dict = {}
    for j in v_positions:
        free.setdefault(similarity_key(pi.codomain[j]), deque()).append(j)
    free_set = set(v_positions)

    for a in u_positions:
        key = similarity_key(pi.domain[a])
        if sigma[a] in free_set and similarity_key(pi.codomain[sigma[a]]) == key:
            free_set.remove(sigma[a])
            continue
        queue = free[key]
        while queue[0] not in free_set:
            queue.popleft()
        b = queue.popleft()
        free_set.remove(b)
        a2 = inv[b]
        sigma[a], sigma[a2] = sigma[a2], sigma[a]
        inv[sigma[a]], inv[sigma[a2]] = a, a2
    return OrderedMatching.build(pi.ideal, pi.domain, pi.codomain, tuple(sigma))


def trivialize(pi: OrderedMatching) -> OrderedMatching:
    """Rearrange a matching between similar lists into per-edge similarities.

    The result maps every form to a plain scalar multiple and keeps the same
    scaling factor, which is what makes M(V) = sc(pi) * M(U) an exact
    identity.
    """
    if not pi.is_ordered:
        raise ValueError("trivialize requires an ordered matching")
    if lists_similar(pi.domain, pi.codomain) is None:
        raise ValueError("trivialize requires similar domain and codomain")
    before = pi.scaling_factor()
    out = unscramble(pi, range(len(pi)), range(len(pi)))
    if any(not e.w.is_zero for e in out.edges):
        raise VerificationError("trivialize left a non-similar edge")
    if out.scaling_factor() != before:
        raise VerificationError("trivialize changed the scaling factor")
    return out


# -- the doubling checker --

@dataclass(frozen=True)
class DoublingRound:
    index: int
    green_u: int
    green_v: int
    must_double: bool
    doubled: bool


@dataclass(frozen=True)
class DoublingReport:
    verdict: str                    # SIMILAR | BOUND_OK | CONTRADICTION
    r: int
    d: int
    d_prime: int
    bound: float
    i0: int
    similar_pairs: int
    rounds: tuple[DoublingRound, ...]
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "r": self.r,
            "d": self.d,
            "d_prime": self.d_prime,
            "bound": self.bound,
            "i0": self.i0,
            "similar_pairs": self.similar_pairs,
            "rounds": [
                {
                    "round": rd.index,
                    "green_U": rd.green_u,
                    "green_V": rd.green_v,
                    "must_double": rd.must_double,
                    "doubled": rd.doubled,
                }
                for rd in self.rounds
            ],
            "reason": self.reason,
        }

    def transcript_lines(self) -> list[str]:
        lines = [
            f"d={self.d} d'={self.d_prime} similar_pairs={self.similar_pairs} "
            f"r={self.r} i0={self.i0}"
        ]
        for rd in self.rounds:
            mark = "double" if rd.must_double else "free"
            lines.append(
                f"round {rd.index}: green_U={rd.green_u} green_V={rd.green_v} [{mark}]"
            )
        lines.append(f"verdict {self.verdict}"
                     + (f" ({self.reason})" if self.reason else ""))
        return lines


def doubling_check(u, v, ideals, matchings) -> DoublingReport:
    """Run the constructive argument that many orthogonal matchings force
    similarity, reporting a per-round transcript.

    Steps: split off maximal similar sublists leaving coprime remainders;
    unscramble every matching so it restricts to the remainders; seed a basis
    with the first leftover form and add one ideal per round, tracking which
    forms fall into the span ("green"). Green counts must agree on both sides
    at the end of every round and must double in every round other than the
    first and the round i0 where the seed form becomes dependent. Verdicts:
    SIMILAR (nothing left over), BOUND_OK with r <= log2(d') + 2, or
    CONTRADICTION, which valid inputs can never produce.
    """
    import math

    u, v = tuple(u), tuple(v)
    if not u or len(u) != len(v):
        raise ValueError("doubling check needs nonempty lists of equal size")
    ideals = list(ideals)
    matchings = list(matchings)
    if len(ideals) != len(matchings):
        raise ValueError("need one matching per ideal")
    if not spans_orthogonal([i.span for i in ideals]):
        raise ValueError("ideals must be mutually orthogonal")
    for i, (ideal, pi) in enumerate(zip(ideals, matchings)):
        if pi.ideal != ideal:
            raise ValueError(f"matching {i} is not by ideal {i}")
        if pi.domain != u or pi.codomain != v:
            raise ValueError(f"matching {i} is not between the given lists")
        pi.verify()

    d = len(u)
    r = len(ideals)

    # maximal similar sublists, leaving coprime remainders
    by_key_u: dict = {}
    by_key_v: dict = {}
    for i, f in enumerate(u):
        by_key_u.setdefault(similarity_key(f), []).append(i)
    for j, g in enumerate(v):
        by_key_v.setdefault(similarity_key(g), []).append(j)
    sim_u, sim_v = [], []
    for key, pos_u in by_key_u.items():
        pos_v = by_key_v.get(key, [])
        m = min(len(pos_u), len(pos_v))
        sim_u.extend(pos_u[:m])
        sim_v.extend(pos_v[:m])
    sim_u.sort()
    sim_v.sort()
    rest_u = [i for i in range(d) if i not in set(sim_u)]
    rest_v = [j for j in range(d) if j not in set(sim_v)]
    d_prime = len(rest_u)
    bound = math.log2(d_prime) + 2 if d_prime else float(r)

    if d_prime == 0:
        return DoublingReport("SIMILAR", r, d, 0, bound, r + 1, len(sim_u), ())

    if not lists_coprime([u[i] for i in rest_u], [v[j] for j in rest_v]):
        raise VerificationError("similar-part extraction left non-coprime remainders")

    # unscramble and restrict every matching to the remainders
    restricted = []
    for pi in matchings:
        pi2 = unscramble(pi, sim_u, sim_v)
        rest_v_index = {j: slot for slot, j in enumerate(rest_v)}
        try:
            sigma = tuple(rest_v_index[pi2.sigma[i]] for i in rest_u)
        except KeyError:
            return DoublingReport(
                "CONTRADICTION", r, d, d_prime, bound, 0, len(sim_u), (),
                reason="unscrambled matching does not restrict to the remainders",
            )
        restricted.append(
            OrderedMatching.build(pi2.ideal, [u[i] for i in rest_u],
                                  [v[j] for j in rest_v], sigma)
        )

    field = ideals[0].field if ideals else u[0].field
    n = u[0].n
    seed = u[rest_u[0]]
    basis = SpanBasis.from_vectors(field, n, [seed.coeffs])
    ideal_only = SpanBasis.empty(field, n)
    i0 = r + 1
    rounds = []

    def greens():
        gu = sum(1 for i in rest_u if basis.contains(u[i].coeffs))
        gv = sum(1 for j in rest_v if basis.contains(v[j].coeffs))
        return gu, gv

    prev_u, _ = greens()
    for idx, ideal in enumerate(ideals, start=1):
        for g in ideal.generators:
            basis, _ = basis.insert(g.coeffs)
            ideal_only, _ = ideal_only.insert(g.coeffs)
        if i0 == r + 1 and ideal_only.contains(seed.coeffs):
            i0 = idx
        gu, gv = greens()
        must = idx not in (1, i0)
        doubled = gu >= 2 * prev_u
        rounds.append(DoublingRound(idx, gu, gv, must, doubled))
        if gu != gv:
            return DoublingReport(
                "CONTRADICTION", r, d, d_prime, bound, i0, len(sim_u),
                tuple(rounds), reason=f"green counts diverged in round {idx}",
            )
        if must and not doubled:
            return DoublingReport(
                "CONTRADICTION", r, d, d_prime, bound, i0, len(sim_u),
                tuple(rounds), reason=f"green count failed to double in round {idx}",
            )
        prev_u = gu

    if r > bound:
        return DoublingReport(
            "CONTRADICTION", r, d, d_prime, bound, i0, len(sim_u), tuple(rounds),
            reason="more orthogonal matchings than the bound allows on dissimilar lists",
        )
    return DoublingReport("BOUND_OK", r, d, d_prime, bound, i0, len(sim_u),
                          tuple(rounds))
