"""Finite rational matrix groups and their homomorphisms.

A group here is always a concrete finite set of invertible rational matrices
closed under multiplication, built by breadth-first closure from generators.
Elements are addressed by index (0 is the identity); the element matrices
ARE the action, so effectiveness is automatic.

Besides the group/subgroup/homomorphism/quotient plumbing this module
provides the representation-theoretic searches the chart calculus needs:
fixed subspaces, the commutant algebra, invariant-subspace search with sound
"certified none" verdicts, and index-2 subgroup enumeration.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .ratlin import (
    Matrix,
    Subspace,
    kernel_image_rank,
    poly_apply_matrix,
    factor_rational_poly,
    QONE,
    QZERO,
)

DEFAULT_ORDER_BOUND = 10000

_SEARCH_SEED = 811607  # fixed seed for the random commutant combinations


class ClosureBoundExceeded(RuntimeError):
    """Generator closure grew past the order bound (group infinite or too big)."""


class NotAHomomorphism(ValueError):
    """Generator images do not extend to a homomorphism.

    Carries a witness pair of source element indices where multiplicativity
    breaks.
    """

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class NotNormal(ValueError):
    """Subgroup is not normal in its parent."""


class FiniteMatrixGroup:
    """A finite group of invertible rational dim x dim matrices.

    Element 0 is the identity; ordering is breadth-first from the identity
    in the given generator order, so it is deterministic.  Products are
    resolved through an index cache rather than a dense table so large
    closures stay affordable.
    """

    def __init__(self, dim: int, elements: list[Matrix],
                 generator_indices: tuple[int, ...],
                 words: list[tuple[int, ...]]):
        self.dim = dim
        self.elements = tuple(elements)
        self.generator_indices = generator_indices
        self.words = tuple(words)
        self.index = {m: i for i, m in enumerate(self.elements)}
        self._mul_cache: dict[tuple[int, int], int] = {}
        self._inv: list[int] | None = None

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def generators(self) -> tuple[Matrix, ...]:
        return tuple(self.elements[i] for i in self.generator_indices)

    def element(self, i: int) -> Matrix:
        return self.elements[i]

    def index_of(self, m: Matrix) -> int:
        try:
            return self.index[m]
        except KeyError:
            raise ValueError("matrix is not an element of this group") from None

    def mul(self, i: int, j: int) -> int:
        key = (i, j)
        got = self._mul_cache.get(key)
        if got is None:
            got = self.index_of(self.elements[i] * self.elements[j])
            self._mul_cache[key] = got
        return got

    def inv(self, i: int) -> int:
        if self._inv is None:
            self._inv = [self.index_of(m.inverse()) for m in self.elements]
        return self._inv[i]

    def multiplication_table(self) -> list[list[int]]:
        return [[self.mul(i, j) for j in range(self.order)]
                for i in range(self.order)]

    def element_order(self, i: int) -> int:
        k, cur = 1, i
        while cur != 0:
            cur = self.mul(cur, i)
            k += 1
        return k

    def is_trivial(self) -> bool:
        return self.order == 1

    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, (0,))

    def full_subgroup(self) -> "Subgroup":
        return Subgroup(self, tuple(range(self.order)))

    def subgroup_generated(self, indices) -> "Subgroup":
        members = {0}
        frontier = [0]
        gens = sorted(set(indices))
        while frontier:
            nxt = []
            for m in frontier:
                for g in gens:
                    p = self.mul(m, g)
                    if p not in members:
                        members.add(p)
                        nxt.append(p)
            frontier = nxt
        return Subgroup(self, tuple(sorted(members)))

    def all_subgroups(self) -> list["Subgroup"]:
        """Every subgroup, as the join-closure of the cyclic subgroups."""
        seen: dict[tuple[int, ...], Subgroup] = {}
        for i in range(self.order):
            s = self.subgroup_generated([i])
            seen[s.members] = s
        changed = True
        while changed:
            changed = False
            current = list(seen.values())
            for a in current:
                for b in current:
                    j = self.subgroup_generated(set(a.members) | set(b.members))
                    if j.members not in seen:
                        seen[j.members] = j
                        changed = True
        return sorted(seen.values(), key=lambda s: (len(s.members), s.members))

    def __repr__(self):
        return "FiniteMatrixGroup(dim=%d, order=%d)" % (self.dim, self.order)


def generate_closure(dim: int, generators: list[Matrix],
                     max_order: int = DEFAULT_ORDER_BOUND) -> FiniteMatrixGroup:
    """Close a generator list into a finite matrix group.

    Breadth-first from the identity, multiplying on the right by generators
    in the given order, so the element ordering is deterministic.  Raises
    ClosureBoundExceeded if the closure passes max_order.
    """
    for g in generators:
        if g.rows != dim or g.cols != dim:
            raise ValueError("generator is %dx%d, chart dimension is %d"
                             % (g.rows, g.cols, dim))
        if not g.is_invertible():
            raise ValueError("generator is not invertible: %r" % (g,))
    ident = Matrix.identity(dim)
    elements = [ident]
    words: list[tuple[int, ...]] = [()]
    index = {ident: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for ei in frontier:
            for gi, g in enumerate(generators):
                prod = elements[ei] * g
                if prod not in index:
                    if len(elements) >= max_order:
                        raise ClosureBoundExceeded(
                            "closure exceeded %d elements" % max_order)
                    index[prod] = len(elements)
                    words.append(words[ei] + (gi,))
                    nxt.append(len(elements))
                    elements.append(prod)
        frontier = nxt
    gen_indices = tuple(index[g] for g in generators)
    return FiniteMatrixGroup(dim, elements, gen_indices, words)


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a FiniteMatrixGroup, as a sorted tuple of member indices."""

    parent: FiniteMatrixGroup
    members: tuple[int, ...]

    def __post_init__(self):
        ms = set(self.members)
        if 0 not in ms:
            raise ValueError("subgroup must contain the identity")
        for a in self.members:
            for b in self.members:
                if self.parent.mul(a, b) not in ms:
                    raise ValueError("member set not closed under product")

    @property
    def order(self) -> int:
        return len(self.members)

    def contains(self, i: int) -> bool:
        return i in set(self.members)

    def matrices(self) -> list[Matrix]:
        return [self.parent.element(i) for i in self.members]

    def is_trivial(self) -> bool:
        return self.members == (0,)

    def is_full(self) -> bool:
        return self.order == self.parent.order

    def index_in_parent(self) -> int:
        return self.parent.order // self.order

    def is_normal(self) -> bool:
        ms = set(self.members)
        for g in range(self.parent.order):
            gi = self.parent.inv(g)
            for h in self.members:
                if self.parent.mul(self.parent.mul(g, h), gi) not in ms:
                    return False
        return True

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and self.parent is other.parent
                and self.members == other.members)

    def __hash__(self):
        return hash((id(self.parent), self.members))


@dataclass(frozen=True)
class GroupHom:
    """A verified homomorphism between two finite matrix groups."""

    source: FiniteMatrixGroup
    target: FiniteMatrixGroup
    mapping: tuple[int, ...]

    def apply(self, i: int) -> int:
        return self.mapping[i]

    def apply_matrix(self, m: Matrix) -> Matrix:
        return self.target.element(self.mapping[self.source.index_of(m)])

    def is_injective(self) -> bool:
        return len(set(self.mapping)) == self.source.order

    def is_surjective(self) -> bool:
        return len(set(self.mapping)) == self.target.order

    def conjugated_by(self, eta: Matrix) -> "GroupHom":
        """The homomorphism g -> eta theta(g) eta^{-1}."""
        ei = self.target.index_of(eta)
        inv = self.target.inv(ei)
        mapped = tuple(self.target.mul(self.target.mul(ei, t), inv)
                       for t in self.mapping)
        return GroupHom(self.source, self.target, mapped)


def verify_homomorphism(source: FiniteMatrixGroup, target: FiniteMatrixGroup,
                        images_of_generators: list[Matrix]) -> GroupHom:
    """Extend generator images to the whole group and verify multiplicativity.

    The extension follows the breadth-first generator words of the source;
    the result is then checked on every pair of elements, so an assignment
    violating a relation raises NotAHomomorphism with a witness pair.
    """
    if len(images_of_generators) != len(source.generator_indices):
        raise ValueError("need one image per generator (%d generators)"
                         % len(source.generator_indices))
    img_idx = [target.index_of(m) for m in images_of_generators]
    mapping = [0] * source.order
    for i, word in enumerate(source.words):
        cur = 0
        for gi in word:
            cur = target.mul(cur, img_idx[gi])
        mapping[i] = cur
    for a in range(source.order):
        for b in range(source.order):
            if mapping[source.mul(a, b)] != target.mul(mapping[a], mapping[b]):
                raise NotAHomomorphism(
                    "generator images violate a relation at pair (%d, %d)" % (a, b),
                    witness=(a, b))
    return GroupHom(source, target, tuple(mapping))


def kernel_of(hom: GroupHom) -> Subgroup:
    """The kernel subgroup {g : hom(g) = identity}; always normal."""
    members = tuple(i for i, t in enumerate(hom.mapping) if t == 0)
    k = Subgroup(hom.source, members)
    assert k.is_normal(), "kernel failed normality check"
    return k


@dataclass(frozen=True)
class QuotientGroup:
    """The quotient of a group by a verified-normal subgroup.

    Cosets are sorted index tuples, listed in order of their smallest
    member, so coset 0 is the identity coset.
    """

    parent: FiniteMatrixGroup
    normal: Subgroup
    cosets: tuple[tuple[int, ...], ...]
    table: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.cosets)

    def coset_of(self, i: int) -> int:
        for c, members in enumerate(self.cosets):
            if i in members:
                return c
        raise ValueError("element index %d not in any coset" % i)

    def representative(self, c: int) -> int:
        return self.cosets[c][0]

    def is_trivial(self) -> bool:
        return self.order == 1


def quotient(parent: FiniteMatrixGroup, n: Subgroup) -> QuotientGroup:
    """Form parent / n; raises NotNormal if n is not normal."""
    if n.parent is not parent:
        raise ValueError("subgroup belongs to a different group")
    if not n.is_normal():
        raise NotNormal("subgroup of order %d is not normal" % n.order)
    nset = set(n.members)
    seen: dict[int, int] = {}
    cosets: list[tuple[int, ...]] = []
    for g in range(parent.order):
        if g in seen:
            continue
        coset = tuple(sorted(parent.mul(g, h) for h in nset))
        for m in coset:
            seen[m] = len(cosets)
        cosets.append(coset)
    order = len(cosets)
    table = tuple(
        tuple(seen[parent.mul(cosets[a][0], cosets[b][0])] for b in range(order))
        for a in range(order)
    )
    q = QuotientGroup(parent, n, tuple(cosets), table)
    assert q.order * n.order == parent.order
    return q


def fixed_subspace(h: Subgroup) -> Subspace:
    """{v : g v = v for all g in h}, as the intersection of kernels of g - I."""
    n = h.parent.dim
    space = Subspace.full(n)
    ident = Matrix.identity(n)
    for i in h.members:
        if i == 0:
            continue
        ker, _, _ = kernel_image_rank(h.parent.element(i) - ident)
        space = space.intersect(ker)
    return space


def commutant(g: FiniteMatrixGroup) -> list[Matrix]:
    """A basis of {M : Mg = gM for all g}, via the exact commutation system.

    Commuting with the generators suffices; the returned basis comes from
    the RREF kernel of the stacked system, so it is deterministic.
    """
    n = g.dim
    gens = g.generators if g.generators else ()
    if not gens:
        basis = []
        for i in range(n):
            for j in range(n):
                m = [[QZERO] * n for _ in range(n)]
                m[i][j] = QONE
                basis.append(Matrix(m))
        return basis
    rows = []
    for a in gens:
        # (M a - a M)[i][j] = sum_k M[i][k] a[k][j] - a[i][k] M[k][j]
        for i in range(n):
            for j in range(n):
                row = [QZERO] * (n * n)
                for k in range(n):
                    row[i * n + k] += a.entries[k][j]
                    row[k * n + j] -= a.entries[i][k]
                rows.append(row)
    ker, _, _ = kernel_image_rank(Matrix(rows))
    return [Matrix([b[i * n:(i + 1) * n] for i in range(n)]) for b in ker.basis]


@dataclass(frozen=True)
class InvariantSubspaceResult:
    """Outcome of an invariant-subspace search.

    status is one of 'found', 'none_found', 'certified_none'; certified_none
    is only issued by a sound argument (complete sign-pattern enumeration in
    dimensions 1 and n-1, or a real-irreducibility certificate from the
    commutant).
    """

    status: str
    subspace: Subspace | None = None
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.status == "found"


def _is_scalar(m: Matrix) -> bool:
    n = m.rows
    c = m.entries[0][0]
    return m == Matrix.identity(n).scale(c)


def _verify_invariant(group: FiniteMatrixGroup, s: Subspace) -> bool:
    return all(s.is_invariant_under(m) for m in group.elements)


def _invariant_line(group: FiniteMatrixGroup) -> Subspace | None:
    """A group-invariant line, or None (complete).

    A real eigenvalue of a finite-order real matrix is +-1, so a common
    eigenvector realizes a sign pattern over the generators; enumerating
    all 2^k patterns decides existence.
    """
    n = group.dim
    gens = list(group.generators)
    if not gens:
        return Subspace.from_vectors(n, [[QONE] + [QZERO] * (n - 1)])
    ident = Matrix.identity(n)
    for bits in range(1 << len(gens)):
        space = Subspace.full(n)
        for i, g in enumerate(gens):
            sign = QONE if not (bits >> i) & 1 else -QONE
            ker, _, _ = kernel_image_rank(g - ident.scale(sign))
            space = space.intersect(ker)
            if space.is_zero():
                break
        if not space.is_zero():
            return Subspace.from_vectors(n, [space.basis[0]])
    return None


def _transpose_group(group: FiniteMatrixGroup) -> FiniteMatrixGroup:
    return generate_closure(group.dim,
                            [g.transpose() for g in group.generators]
                            or [Matrix.identity(group.dim)],
                            max_order=group.order + 1)


def _division_algebra_on_grid(basis: list[Matrix]) -> bool:
    """Every nonzero {-1,0,1}-combination of the basis is invertible."""
    if len(basis) > 6:
        return False
    import itertools as it
    for coeffs in it.product((-1, 0, 1), repeat=len(basis)):
        if all(c == 0 for c in coeffs):
            continue
        m = Matrix.zero(basis[0].rows, basis[0].cols)
        for c, b in zip(coeffs, basis):
            if c:
                m = m + b.scale(c)
        if not m.is_invertible():
            return False
    return True


def find_invariant_subspace(group: FiniteMatrixGroup, dim_wanted: int) -> InvariantSubspaceResult:
    """Search for a dim_wanted-dimensional subspace invariant under the group.

    Dimensions 1 and n-1 are decided completely by sign-pattern enumeration
    (n-1 through the transpose group and duality).  Intermediate dimensions
    use the commutant: kernels of irreducible characteristic factors of
    commutant elements are invariant, and their sums/intersections are
    searched; 'certified_none' is issued when the commutant is (verifiably
    on a sign grid) a division algebra, which forces real-irreducibility.
    """
    n = group.dim
    if not (0 < dim_wanted < n):
        raise ValueError("requested dimension %d out of range (0, %d)"
                         % (dim_wanted, n))
    if dim_wanted == 1:
        line = _invariant_line(group)
        if line is not None:
            assert _verify_invariant(group, line)
            return InvariantSubspaceResult("found", line, "sign-pattern line")
        return InvariantSubspaceResult(
            "certified_none", None,
            "no common eigenvector: all 2^k sign patterns have zero intersection")
    if dim_wanted == n - 1:
        dual_line = _invariant_line(_transpose_group(group))
        if dual_line is not None:
            phi = Matrix([dual_line.basis[0]])
            hyp, _, _ = kernel_image_rank(phi)
            assert _verify_invariant(group, hyp)
            return InvariantSubspaceResult("found", hyp, "dual sign-pattern hyperplane")
        return InvariantSubspaceResult(
            "certified_none", None,
            "no invariant hyperplane: transpose group has no common eigenvector")

    basis = commutant(group)
    if len(basis) == 1:
        return InvariantSubspaceResult(
            "certified_none", None,
            "commutant has dimension 1: representation is real-irreducible")

    rng = random.Random(_SEARCH_SEED)
    probes = [b for b in basis if not _is_scalar(b)]
    for _ in range(8):
        m = Matrix.zero(n, n)
        for b in basis:
            m = m + b.scale(Fraction(rng.randint(-3, 3)))
        if not _is_scalar(m) and not m.is_zero():
            probes.append(m)

    candidates: list[Subspace] = []
    all_kernels_trivial = True
    for m in probes:
        for factor, _ in factor_rational_poly(m.charpoly()):
            fm = poly_apply_matrix(list(factor), m)
            ker, img, _ = kernel_image_rank(fm)
            for s in (ker, img):
                if 0 < s.dim < n:
                    all_kernels_trivial = False
                    candidates.append(s)
    for _ in range(2):
        fresh = []
        for a in candidates:
            for b in candidates:
                for s in (a.intersect(b), a.sum_with(b)):
                    if 0 < s.dim < n and s not in candidates and s not in fresh:
                        fresh.append(s)
        candidates.extend(fresh)
    for s in candidates:
        if s.dim == dim_wanted and _verify_invariant(group, s):
            return InvariantSubspaceResult("found", s, "commutant factor kernel")

    if all_kernels_trivial and _division_algebra_on_grid(basis):
        return InvariantSubspaceResult(
            "certified_none", None,
            "commutant is a division algebra on the sign grid: real-irreducible")
    return InvariantSubspaceResult(
        "none_found", None,
        "search exhausted without a certificate of nonexistence")


def index2_subgroups(g: FiniteMatrixGroup) -> list[Subgroup]:
    """All subgroups of index exactly 2.

    Found as kernels of surjective sign characters: each assignment of the
    generators to {+1,-1} is extended along the generator words and checked
    for multiplicativity on every pair.
    """
    k = len(g.generator_indices)
    out = []
    seen = set()
    for bits in range(1, 1 << k):
        signs = [1 if not (bits >> i) & 1 else -1 for i in range(k)]
        char = [1] * g.order
        for i, word in enumerate(g.words):
            s = 1
            for gi in word:
                s *= signs[gi]
            char[i] = s
        ok = all(
            char[g.mul(a, b)] == char[a] * char[b]
            for a in range(g.order) for b in range(g.order)
        )
        if not ok or all(s == 1 for s in char):
            continue
        members = tuple(i for i, s in enumerate(char) if s == 1)
        if members not in seen:
            seen.add(members)
            out.append(Subgroup(g, members))
    return out
