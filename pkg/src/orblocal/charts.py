"""Local orbifold chart models and their structure.

A chart is a finite rational matrix group acting linearly on R^n, or on the
half-space {x_n >= 0} when the boundary flag is set.  Boundary charts are
kept in a normal form: every element must fix the last coordinate
functional exactly (last matrix row = (0,...,0,1)), which makes half-space
preservation a syntactic check.

The module computes isotropy groups, the stratification of a chart by
isotropy type (each stratum is a fixed subspace minus the smaller fixed
subspaces inside it), suborbifold local models (an invariant subspace with
its intrinsic isotropy quotient), and verification of equivariant affine
chart embeddings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ratlin import (
    Matrix,
    Subspace,
    restrict_to_subspace,
    vec,
    QONE,
    QZERO,
)
from .groups import (
    FiniteMatrixGroup,
    GroupHom,
    QuotientGroup,
    Subgroup,
    fixed_subspace,
    generate_closure,
    quotient,
    DEFAULT_ORDER_BOUND,
)


class BoundaryViolation(ValueError):
    """A group element does not preserve the half-space normal form."""


class NotInvariant(ValueError):
    """A subspace fails invariance; carries the witness (element, vector)."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class EmbeddingError(ValueError):
    """A chart embedding failed one of its checks; carries a witness."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def _fixes_last_coordinate(m: Matrix) -> bool:
    n = m.rows
    want = tuple(QZERO if j < n - 1 else QONE for j in range(n))
    return m.entries[n - 1] == want


@dataclass(frozen=True)
class LocalChart:
    """A linear local model (R^n or R^n_+, finite group, linear action)."""

    dim: int
    group: FiniteMatrixGroup
    boundary: bool = False

    def __post_init__(self):
        if self.group.dim != self.dim:
            raise ValueError("group dimension %d != chart dimension %d"
                             % (self.group.dim, self.dim))
        if self.boundary:
            for m in self.group.elements:
                if not _fixes_last_coordinate(m):
                    raise BoundaryViolation(
                        "element does not fix the boundary functional: %r" % (m,))

    def contains_point(self, point) -> bool:
        p = vec(point)
        if len(p) != self.dim:
            return False
        return (not self.boundary) or p[-1] >= 0

    def boundary_hyperplane(self) -> Subspace:
        if not self.boundary:
            raise ValueError("chart has no boundary")
        basis = [[QONE if i == j else QZERO for j in range(self.dim)]
                 for i in range(self.dim - 1)]
        return Subspace.from_vectors(self.dim, basis)

    def on_boundary(self, point) -> bool:
        p = vec(point)
        return self.boundary and p[-1] == 0


def build_chart(dim: int, generators: list[Matrix], boundary: bool = False,
                max_order: int = DEFAULT_ORDER_BOUND) -> LocalChart:
    """Close the generators and wrap them as a chart, verifying invariants."""
    if boundary:
        for g in generators:
            if not _fixes_last_coordinate(g):
                raise BoundaryViolation(
                    "generator does not fix the boundary functional: %r" % (g,))
    group = generate_closure(dim, generators, max_order=max_order)
    return LocalChart(dim, group, boundary)


def product_chart(a: LocalChart, b: LocalChart) -> LocalChart:
    """The product model: block-diagonal direct product action on R^(m+n).

    At most one factor may carry boundary; its coordinates are placed last
    so the product stays in the boundary normal form.
    """
    if a.boundary and b.boundary:
        raise ValueError("both factors have boundary (corner models unsupported)")
    first, second = (b, a) if a.boundary else (a, b)
    n1, n2 = first.dim, second.dim
    gens = []
    for g in first.group.generators:
        rows = [list(g.entries[i]) + [QZERO] * n2 for i in range(n1)]
        rows += [[QZERO] * n1 + list(Matrix.identity(n2).entries[i]) for i in range(n2)]
        gens.append(Matrix(rows))
    for g in second.group.generators:
        rows = [list(Matrix.identity(n1).entries[i]) + [QZERO] * n2 for i in range(n1)]
        rows += [[QZERO] * n1 + list(g.entries[i]) for i in range(n2)]
        gens.append(Matrix(rows))
    return build_chart(n1 + n2, gens, boundary=a.boundary or b.boundary,
                       max_order=max(DEFAULT_ORDER_BOUND,
                                     first.group.order * second.group.order + 1))


def isotropy_at(chart: LocalChart, point) -> Subgroup:
    """The exact stabilizer subgroup of a rational point."""
    p = vec(point)
    if len(p) != chart.dim:
        raise ValueError("point has length %d in a %d-dimensional chart"
                         % (len(p), chart.dim))
    if chart.boundary and p[-1] < 0:
        raise ValueError("point lies outside the half-space")
    members = tuple(i for i, m in enumerate(chart.group.elements)
                    if m.apply(p) == p)
    return Subgroup(chart.group, members)


def pointwise_stabilizer(group: FiniteMatrixGroup, s: Subspace) -> Subgroup:
    """{g : g v = v for every v in s}."""
    members = tuple(i for i, m in enumerate(group.elements)
                    if s.fixed_pointwise_by(m))
    return Subgroup(group, members)


@dataclass(frozen=True)
class Stratum:
    """One isotropy stratum: the generic points of a fixed subspace.

    The actual stratum is fixed_space minus every strictly smaller fixed
    subspace contained in it; its dimension is dim(fixed_space).
    """

    isotropy: Subgroup
    fixed_space: Subspace
    dimension: int
    codimension: int
    in_boundary: bool

    @property
    def singular(self) -> bool:
        return not self.isotropy.is_trivial()


@dataclass(frozen=True)
class StrataReport:
    chart: LocalChart
    strata: tuple[Stratum, ...]

    def singular_strata(self) -> tuple[Stratum, ...]:
        return tuple(s for s in self.strata if s.singular)

    def regular_stratum(self) -> Stratum:
        return next(s for s in self.strata if not s.singular)


def stratify(chart: LocalChart) -> StrataReport:
    """All isotropy strata of a chart, in decreasing dimension.

    Every isotropy group that occurs is the pointwise stabilizer of the
    fixed subspace of some subgroup, so we enumerate subgroups, deduplicate
    by fixed subspace, and attach the full stabilizer to each.
    """
    n = chart.dim
    by_space: dict[Subspace, Subgroup] = {}
    for h in chart.group.all_subgroups():
        space = fixed_subspace(h)
        if space not in by_space:
            by_space[space] = pointwise_stabilizer(chart.group, space)
    strata = []
    for space, stab in by_space.items():
        in_bdy = (chart.boundary
                  and all(b[-1] == 0 for b in space.basis))
        strata.append(Stratum(
            isotropy=stab,
            fixed_space=space,
            dimension=space.dim,
            codimension=n - space.dim,
            in_boundary=in_bdy,
        ))
    strata.sort(key=lambda s: (-s.dimension, s.fixed_space.basis))
    return StrataReport(chart, tuple(strata))


def has_interior_codim1_stratum(chart: LocalChart) -> bool:
    """True iff some singular stratum of codimension 1 is not in the boundary."""
    for s in stratify(chart).singular_strata():
        if s.codimension == 1 and not s.in_boundary:
            return True
    return False


@dataclass(frozen=True)
class SuborbifoldLocalModel:
    """A local suborbifold model: an invariant subspace with its isotropy data.

    lambda_group acts on the subspace; omega is the part acting trivially on
    it; the intrinsic isotropy is the (effective) quotient lambda/omega.
    """

    chart: LocalChart
    subspace: Subspace
    lambda_group: Subgroup
    omega: Subgroup
    intrinsic_isotropy: QuotientGroup
    full: bool

    def intrinsic_order(self) -> int:
        return self.intrinsic_isotropy.order

    def restricted_action(self, coset: int) -> Matrix:
        """The matrix of a coset acting on the subspace, in basis coordinates."""
        rep = self.intrinsic_isotropy.representative(coset)
        return restrict_to_subspace(self.chart.group.element(rep), self.subspace)


def suborbifold_model(chart: LocalChart, subspace: Subspace,
                      lambda_group: Subgroup) -> SuborbifoldLocalModel:
    """Build the local model of a suborbifold from its invariant subspace.

    Verifies invariance of the subspace under lambda (raising NotInvariant
    with a witness element and vector otherwise), computes the pointwise
    stabilizer omega, and checks that lambda/omega acts effectively on the
    subspace.
    """
    if lambda_group.parent is not chart.group:
        raise ValueError("lambda subgroup belongs to a different group")
    if subspace.ambient_dim != chart.dim:
        raise ValueError("subspace ambient dimension mismatch")
    for i in lambda_group.members:
        m = chart.group.element(i)
        for b in subspace.basis:
            if not subspace.contains(m.apply(b)):
                raise NotInvariant(
                    "subspace is not invariant under element %d" % i,
                    witness=(m, b))
    omega_members = tuple(i for i in lambda_group.members
                          if subspace.fixed_pointwise_by(chart.group.element(i)))
    omega = Subgroup(chart.group, omega_members)
    lam_grp = _subgroup_as_group(lambda_group)
    omega_in_lam = Subgroup(lam_grp, tuple(
        lam_grp.index_of(chart.group.element(i)) for i in omega_members))
    intr = quotient(lam_grp, omega_in_lam)
    for c in range(1, intr.order):
        rep = lam_grp.element(intr.representative(c))
        if subspace.fixed_pointwise_by(rep):
            raise AssertionError("intrinsic isotropy fails to act effectively")
    return SuborbifoldLocalModel(
        chart=chart,
        subspace=subspace,
        lambda_group=lambda_group,
        omega=omega,
        intrinsic_isotropy=intr,
        full=lambda_group.is_full(),
    )


def _subgroup_as_group(sub: Subgroup) -> FiniteMatrixGroup:
    """Reify a subgroup as a standalone group (generated by its members)."""
    gens = [sub.parent.element(i) for i in sub.members if i != 0]
    if not gens:
        gens = [Matrix.identity(sub.parent.dim)]
    return generate_closure(sub.parent.dim, gens,
                            max_order=sub.order + 1)


@dataclass(frozen=True)
class ChartEmbedding:
    """An affine equivariant embedding of one chart into another."""

    source: LocalChart
    target: LocalChart
    linear: Matrix
    translate: tuple[Fraction, ...]
    theta: GroupHom

    def apply(self, point) -> tuple[Fraction, ...]:
        from .ratlin import vec_add
        return vec_add(self.linear.apply(point), self.translate)


def verify_embedding(e: ChartEmbedding) -> ChartEmbedding:
    """Check injectivity, theta injectivity, and exact equivariance.

    Equivariance of an affine map psi(y) = Ly + t under gamma means
    L gamma = theta(gamma) L and theta(gamma) t = t, which covers the
    polynomial identity in y; a few rational sample points are evaluated
    on both sides as an extra consistency pass.
    """
    if e.linear.rows != e.target.dim or e.linear.cols != e.source.dim:
        raise EmbeddingError("linear part is %dx%d for a %d->%d embedding"
                             % (e.linear.rows, e.linear.cols,
                                e.source.dim, e.target.dim))
    if e.linear.rank() != e.source.dim:
        raise EmbeddingError("linear part is not injective", witness=e.linear)
    if e.theta.source is not e.source.group or e.theta.target is not e.target.group:
        raise EmbeddingError("theta does not connect the chart groups")
    if not e.theta.is_injective():
        raise EmbeddingError("theta is not injective", witness=e.theta.mapping)
    for gi in range(e.source.group.order):
        g = e.source.group.element(gi)
        tg = e.target.group.element(e.theta.apply(gi))
        if e.linear * g != tg * e.linear:
            raise EmbeddingError(
                "equivariance fails on linear parts at element %d" % gi,
                witness=(g, tg))
        if tg.apply(e.translate) != e.translate:
            raise EmbeddingError(
                "equivariance fails on the translation at element %d" % gi,
                witness=(tg, e.translate))
    for k in range(3):
        y = vec([Fraction(k + 1, j + 2) for j in range(e.source.dim)])
        for gi in range(e.source.group.order):
            g = e.source.group.element(gi)
            tg = e.target.group.element(e.theta.apply(gi))
            lhs = e.apply(g.apply(y))
            rhs = tg.apply(e.apply(y))
            if lhs != rhs:
                raise EmbeddingError(
                    "commuting diagram fails at sample point", witness=(gi, y))
    return e
