"""Equivariant polynomial map germs and the local orbifold map calculus.

A germ couples a polynomial lift between two chart models with a group
homomorphism between their isotropy groups; the commuting-diagram condition
(lift of the action equals the action of the lift) is verified as an exact
polynomial identity for every group element.

On top of germs this module builds:

* regular-value tests (exact Jacobian rank at supplied preimage lifts,
  empty preimage regular by convention),
* the preimage model at a centered regular point: the kernel subspace, the
  part of the group acting trivially on it, and the effective quotient that
  becomes the intrinsic isotropy of the preimage suborbifold,
* the kernel-averaging invariant projection (gamma - I averaged over the
  kernel of the homomorphism, negated), with its algebraic identity suite,
* faithfulness of the homomorphism kernel inside the quotient,
* obstruction certificates for the existence of germs with a regular center
  value, and
* a seeded Monte Carlo sampler estimating the density of regular values,
  with exact per-sample classification.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .ratlin import (
    Matrix,
    MultiPoly,
    Subspace,
    kernel_image_rank,
    poly_gcd,
    poly_derivative,
    poly_trim,
    poly_deg,
    poly_eval_at,
    has_real_root,
    vec,
    QONE,
    QZERO,
)
from .groups import (
    FiniteMatrixGroup,
    GroupHom,
    QuotientGroup,
    Subgroup,
    InvariantSubspaceResult,
    find_invariant_subspace,
    fixed_subspace,
    kernel_of,
    quotient,
    verify_homomorphism,
)
from .charts import (
    ChartEmbedding,
    LocalChart,
    isotropy_at,
    pointwise_stabilizer,
    stratify,
    suborbifold_model,
    SuborbifoldLocalModel,
    _subgroup_as_group,
)

SNAP_DENOMINATOR = 10 ** 6


class EquivarianceError(ValueError):
    """The lift is not equivariant; carries the element and residual map."""

    def __init__(self, msg, gamma_index=None, residual=None):
        super().__init__(msg)
        self.gamma_index = gamma_index
        self.residual = residual


class NotInPreimage(ValueError):
    """A supplied lift point does not map to the target point."""


class NotRegularPoint(ValueError):
    """The Jacobian at the supplied point is not surjective."""


class NotCentered(ValueError):
    """The lift point is not fixed by the chart group; re-center first."""


class UnsupportedLift(ValueError):
    """The sampler cannot solve preimages for this lift shape."""


@dataclass(frozen=True)
class MapGerm:
    """A complete local map germ: charts, polynomial lift, homomorphism."""

    source: LocalChart
    target: LocalChart
    lift: MultiPoly
    theta: GroupHom
    base_point: tuple[Fraction, ...]

    def lift_value(self, point) -> tuple[Fraction, ...]:
        return self.lift.eval(point)

    def jacobian_at(self, point) -> Matrix:
        return self.lift.jacobian_at(point)

    def kernel_at(self, point) -> Subspace:
        ker, _, _ = kernel_image_rank(self.lift.jacobian_at(point))
        return ker

    def n_subgroup(self) -> Subgroup:
        """The kernel of the homomorphism, a normal subgroup of the source group."""
        return kernel_of(self.theta)


def build_germ(source: LocalChart, target: LocalChart, lift: MultiPoly,
               theta: GroupHom, base_point=None) -> MapGerm:
    """Verify and assemble a map germ.

    Equivariance is checked per group element as an exact polynomial
    identity lift(gamma y) - theta(gamma) lift(y) == 0; a violation raises
    EquivarianceError carrying the offending element and the residual.
    """
    if lift.num_vars != source.dim:
        raise ValueError("lift has %d variables, source dimension is %d"
                         % (lift.num_vars, source.dim))
    if lift.out_dim != target.dim:
        raise ValueError("lift has %d outputs, target dimension is %d"
                         % (lift.out_dim, target.dim))
    if theta.source is not source.group or theta.target is not target.group:
        raise ValueError("theta does not connect the chart groups")
    base = vec(base_point) if base_point is not None else (QZERO,) * source.dim
    if len(base) != source.dim:
        raise ValueError("base point length mismatch")
    if not source.contains_point(base):
        raise ValueError("base point outside the source half-space")
    value = lift.eval(base)
    if not target.contains_point(value):
        raise ValueError("lift image of base point outside the target half-space")
    for gi in range(source.group.order):
        g = source.group.element(gi)
        tg = target.group.element(theta.apply(gi))
        residual = lift.compose_affine(g) - lift.apply_matrix(tg)
        if not residual.is_zero():
            raise EquivarianceError(
                "lift is not equivariant at element %d" % gi,
                gamma_index=gi, residual=residual)
    return MapGerm(source, target, lift, theta, base)


@dataclass(frozen=True)
class RegularValueReport:
    target_point: tuple[Fraction, ...]
    regular: bool
    point_ranks: tuple[tuple[tuple[Fraction, ...], int], ...]
    needed_rank: int
    empty_preimage: bool


def is_regular_value(germ: MapGerm, p, preimage_lifts) -> RegularValueReport:
    """Exact regularity of a target point over the supplied preimage lifts.

    Every supplied point must map to p exactly (NotInPreimage otherwise).
    An empty list is regular by convention.
    """
    p = vec(p)
    entries = []
    k = germ.target.dim
    regular = True
    for pt in preimage_lifts:
        pt = vec(pt)
        if germ.lift.eval(pt) != p:
            raise NotInPreimage(
                "point %s does not map to %s"
                % (tuple(str(x) for x in pt), tuple(str(x) for x in p)))
        rank = germ.jacobian_at(pt).rank()
        entries.append((pt, rank))
        if rank != k:
            regular = False
    return RegularValueReport(
        target_point=p,
        regular=regular,
        point_ranks=tuple(entries),
        needed_rank=k,
        empty_preimage=not entries,
    )


@dataclass(frozen=True)
class PreimageModel:
    """The local structure of a regular-value preimage at a centered point."""

    germ: MapGerm
    target_point: tuple[Fraction, ...]
    lift_point: tuple[Fraction, ...]
    kernel: Subspace
    g_group: Subgroup
    gamma_s: QuotientGroup
    suborbifold: SuborbifoldLocalModel
    dim: int
    boundary_kind: str = "interior"
    boundary_kernel_dim: int | None = None

    def gamma_s_order(self) -> int:
        return self.gamma_s.order

    def is_mirror(self) -> bool:
        """True when the preimage is a 1-dimensional half-line mirror model."""
        return (self.dim == 1 and self.gamma_s.order == 2
                and self.boundary_kind == "interior")


def _check_centered_regular(germ: MapGerm, p, lift_point):
    p = vec(p)
    pt = vec(lift_point)
    if germ.lift.eval(pt) != p:
        raise NotInPreimage("lift point does not map to the target point")
    for m in germ.source.group.elements:
        if m.apply(pt) != pt:
            raise NotCentered(
                "lift point is not fixed by the chart group; re-center the germ")
    jac = germ.jacobian_at(pt)
    if jac.rank() != germ.target.dim:
        raise NotRegularPoint(
            "Jacobian rank %d < target dimension %d at the lift point"
            % (jac.rank(), germ.target.dim))
    return p, pt


def _kernel_split(group: FiniteMatrixGroup, kernel: Subspace):
    """Verify invariance of the kernel and split the group action on it."""
    for i, m in enumerate(group.elements):
        if not kernel.is_invariant_under(m):
            raise AssertionError(
                "kernel not invariant under element %d (broken germ data)" % i)
    g_group = pointwise_stabilizer(group, kernel)
    gamma_s = quotient(group, g_group)
    for c in range(1, gamma_s.order):
        rep = group.element(gamma_s.representative(c))
        if kernel.fixed_pointwise_by(rep):
            raise AssertionError("quotient fails to act effectively on the kernel")
    return g_group, gamma_s


def preimage_model(germ: MapGerm, p, lift_point) -> PreimageModel:
    """The preimage suborbifold model at a group-fixed regular lift point.

    The kernel of the differential is the local linear model; the quotient
    by its pointwise stabilizer acts effectively on it and is the intrinsic
    isotropy; the resulting suborbifold model is full.
    """
    p, pt = _check_centered_regular(germ, p, lift_point)
    kernel = germ.kernel_at(pt)
    g_group, gamma_s = _kernel_split(germ.source.group, kernel)
    sub = suborbifold_model(germ.source, kernel,
                            germ.source.group.full_subgroup())
    assert sub.omega.members == g_group.members
    assert sub.full
    dim = germ.source.dim - germ.target.dim
    assert kernel.dim == dim
    return PreimageModel(
        germ=germ, target_point=p, lift_point=pt, kernel=kernel,
        g_group=g_group, gamma_s=gamma_s, suborbifold=sub, dim=dim,
    )


def _boundary_restriction(lift: MultiPoly) -> MultiPoly:
    """Substitute x_n = 0: the lift restricted to the boundary hyperplane."""
    n = lift.num_vars
    incl = Matrix([[QONE if i == j else QZERO for j in range(n - 1)]
                   for i in range(n)])
    return lift.compose_affine(incl)


def preimage_model_boundary(germ: MapGerm, p, lift_point) -> PreimageModel:
    """Preimage model on a boundary chart, with the boundary intersection data.

    Requires regularity of the boundary restriction at boundary lift points
    and records whether the model sits on the boundary; at a boundary point
    the kernel meets the boundary hyperplane in one dimension less.
    """
    if not germ.source.boundary:
        raise ValueError("source chart has no boundary")
    if germ.source.dim <= germ.target.dim:
        raise ValueError("boundary preimages need source dimension > target dimension")
    base = preimage_model(germ, p, lift_point)
    pt = base.lift_point
    if germ.source.on_boundary(pt):
        restricted = _boundary_restriction(germ.lift)
        jac_b = restricted.jacobian_at(pt[:-1])
        if jac_b.rank() != germ.target.dim:
            raise NotRegularPoint(
                "restriction to the boundary hyperplane is not regular at the point")
        bdy = germ.source.boundary_hyperplane()
        meet = base.kernel.intersect(bdy)
        assert meet.dim == base.kernel.dim - 1
        return PreimageModel(
            germ=germ, target_point=base.target_point, lift_point=pt,
            kernel=base.kernel, g_group=base.g_group, gamma_s=base.gamma_s,
            suborbifold=base.suborbifold, dim=base.dim,
            boundary_kind="boundary-point", boundary_kernel_dim=meet.dim,
        )
    return base


@dataclass(frozen=True)
class InvariantProjection:
    """The averaged projection onto the differential kernel.

    For each gamma in the homomorphism kernel N, a_gamma = gamma - I maps
    into the kernel subspace K; projection = -(1/|N|) sum a_gamma is an
    idempotent commuting with N whose image lies in K and whose kernel N
    fixes pointwise.
    """

    n_group: Subgroup
    kernel_space: Subspace
    a_gamma: tuple[tuple[int, Matrix], ...]
    average: Matrix
    projection: Matrix
    proj_kernel: Subspace
    proj_image: Subspace

    def a_of(self, member: int) -> Matrix:
        for i, m in self.a_gamma:
            if i == member:
                return m
        raise KeyError(member)


def invariant_projection(germ: MapGerm) -> InvariantProjection:
    """Build the invariant projection at the germ's base point, verified exactly."""
    n = germ.source.dim
    ident = Matrix.identity(n)
    ngrp = germ.n_subgroup()
    kernel = germ.kernel_at(germ.base_point)
    a_gamma = []
    acc = Matrix.zero(n, n)
    for i in ngrp.members:
        m = germ.source.group.element(i)
        a = m - ident
        for col in range(n):
            if not kernel.contains(a.column(col)):
                raise AssertionError(
                    "gamma - I does not map into the kernel (broken germ)")
        a_gamma.append((i, a))
        acc = acc + a
    avg = acc.scale(Fraction(1, ngrp.order))
    proj = -avg
    assert proj * proj == proj, "projection is not idempotent"
    for i in ngrp.members:
        m = germ.source.group.element(i)
        assert m * proj == proj * m, "projection does not commute with N"
    pk, pi, _ = kernel_image_rank(proj)
    for b in pi.basis:
        assert kernel.contains(b), "projection image escapes the kernel"
    for i in ngrp.members:
        m = germ.source.group.element(i)
        assert pk.fixed_pointwise_by(m), "N moves the projection kernel"
    assert pk.dim + pi.dim == n and pk.intersect(pi).is_zero()
    return InvariantProjection(
        n_group=ngrp, kernel_space=kernel,
        a_gamma=tuple(a_gamma), average=avg, projection=proj,
        proj_kernel=pk, proj_image=pi,
    )


@dataclass(frozen=True)
class CocycleReport:
    pairs_checked: int
    ok: bool
    failures: tuple[tuple[int, int, str], ...]


def cocycle_identities(proj: InvariantProjection) -> CocycleReport:
    """Check the three composition identities of gamma -> gamma - I on N x N.

    For all gamma, delta in N:
        A(gamma delta) = A(gamma) + gamma A(delta)
                       = A(delta) + A(gamma) delta
                       = A(delta) + A(gamma) + A(gamma) A(delta)
    """
    grp = proj.n_group.parent
    failures = []
    pairs = 0
    amap = dict(proj.a_gamma)
    for gi in proj.n_group.members:
        for di in proj.n_group.members:
            pairs += 1
            g = grp.element(gi)
            d = grp.element(di)
            a_gd = amap[grp.mul(gi, di)]
            a_g, a_d = amap[gi], amap[di]
            if a_gd != a_g + g * a_d:
                failures.append((gi, di, "left-twisted"))
            if a_gd != a_d + a_g * d:
                failures.append((gi, di, "right-twisted"))
            if a_gd != a_d + a_g + a_g * a_d:
                failures.append((gi, di, "product"))
    return CocycleReport(pairs_checked=pairs, ok=not failures,
                         failures=tuple(failures))


@dataclass(frozen=True)
class KernelSplit:
    """Kernel subspace with the trivially-acting subgroup and quotient at a point."""

    kernel: Subspace
    g_group: Subgroup
    gamma_s: QuotientGroup


def kernel_split_at_base(germ: MapGerm) -> KernelSplit:
    """The (kernel, pointwise stabilizer, quotient) data at the base point.

    Unlike preimage_model this does not require the base point to be a
    regular point, only group-fixed; the split is what the faithfulness
    argument consumes.
    """
    pt = germ.base_point
    for m in germ.source.group.elements:
        if m.apply(pt) != pt:
            raise NotCentered("base point is not fixed by the chart group")
    kernel = germ.kernel_at(pt)
    g_group, gamma_s = _kernel_split(germ.source.group, kernel)
    return KernelSplit(kernel, g_group, gamma_s)


@dataclass(frozen=True)
class FaithfulnessReport:
    n_order: int
    g_order: int
    intersection_trivial: bool
    injective: bool
    coset_images: tuple[tuple[int, int], ...]


def faithfulness_check(germ: MapGerm, model: PreimageModel | None = None) -> FaithfulnessReport:
    """Verify N meets the trivially-acting subgroup only in the identity.

    The composite of N into the quotient by that subgroup is then checked
    for injectivity element by element.
    """
    if model is not None:
        if model.germ is not germ:
            raise ValueError("model was built from a different germ")
        split = KernelSplit(model.kernel, model.g_group, model.gamma_s)
    else:
        split = kernel_split_at_base(germ)
    ngrp = germ.n_subgroup()
    inter = set(ngrp.members) & set(split.g_group.members)
    images = tuple((i, split.gamma_s.coset_of(i)) for i in ngrp.members)
    injective = len({c for _, c in images}) == ngrp.order
    report = FaithfulnessReport(
        n_order=ngrp.order,
        g_order=split.g_group.order,
        intersection_trivial=inter == {0},
        injective=injective,
        coset_images=images,
    )
    assert report.intersection_trivial, "N meets G beyond the identity"
    assert report.injective, "N does not inject into the quotient"
    return report


@dataclass(frozen=True)
class RealTargetReport:
    """Decomposition data for a germ to a 1-dimensional trivial target."""

    gamma_order: int
    gamma_s_order: int
    g_trivial: bool
    fixed_line: Subspace
    kernel_space: Subspace
    image_equals_kernel: bool
    stratum_dimension: int | None


def real_target_structure(germ: MapGerm, model: PreimageModel) -> RealTargetReport:
    """Verify the tangent splitting forced by a real-valued regular germ.

    For a 1-dimensional trivial-group target at a regular centered point:
    the whole group survives into the quotient, the projection kernel is a
    pointwise-fixed line, its image is the differential kernel, and the
    singular stratum through the point has dimension at least 1 whenever
    the group is nontrivial.
    """
    if germ.target.dim != 1 or not germ.target.group.is_trivial():
        raise ValueError("target must be 1-dimensional with trivial group")
    if model.germ is not germ:
        raise ValueError("model was built from a different germ")
    grp = germ.source.group
    proj = invariant_projection(germ)
    assert model.g_group.is_trivial(), "trivially-acting subgroup is not trivial"
    assert model.gamma_s.order == grp.order
    if not grp.is_trivial():
        assert proj.proj_kernel.dim == 1, "fixed line is not 1-dimensional"
        for m in grp.elements:
            assert proj.proj_kernel.fixed_pointwise_by(m)
        assert proj.proj_image == model.kernel, "projection image differs from kernel"
    fix = fixed_subspace(grp.full_subgroup())
    stratum_dim = None
    if not grp.is_trivial():
        report = stratify(germ.source)
        stratum = next(s for s in report.strata if s.fixed_space == fix)
        stratum_dim = stratum.dimension
        assert stratum_dim >= 1, "singular stratum through the point is isolated"
    return RealTargetReport(
        gamma_order=grp.order,
        gamma_s_order=model.gamma_s.order,
        g_trivial=model.g_group.is_trivial(),
        fixed_line=proj.proj_kernel,
        kernel_space=model.kernel,
        image_equals_kernel=proj.proj_image == model.kernel,
        stratum_dimension=stratum_dim,
    )


@dataclass(frozen=True)
class ObstructionCertificate:
    """Whether a germ with a regular center value can exist for given data."""

    verdict: str  # "possible" | "impossible" | "unknown"
    reason_code: str
    detail: str
    witness_lift: MultiPoly | None = None
    invariant_search: InvariantSubspaceResult | None = None


def _equivariant_linear_maps(source: LocalChart, target: LocalChart,
                             theta: GroupHom) -> list[Matrix]:
    """Basis of {L : L gamma = theta(gamma) L for all gamma}, exact."""
    n, k = source.dim, target.dim
    rows = []
    for gi in source.group.generator_indices or (0,):
        g = source.group.element(gi)
        tg = target.group.element(theta.apply(gi))
        # (L g - tg L)[i][j] row for each (i, j), unknowns L[a][b] flattened
        for i in range(k):
            for j in range(n):
                row = [QZERO] * (k * n)
                for b in range(n):
                    row[i * n + b] += g.entries[b][j]
                for a in range(k):
                    row[a * n + j] -= tg.entries[i][a]
                rows.append(row)
    ker, _, _ = kernel_image_rank(Matrix(rows))
    return [Matrix([v[i * n:(i + 1) * n] for i in range(k)]) for v in ker.basis]


def obstruction_certificate(source: LocalChart, target: LocalChart,
                            theta: GroupHom) -> ObstructionCertificate:
    """Decide whether the chart centers admit a germ whose center value is regular.

    Impossible when (a) the dimensions agree and the homomorphism has a
    nontrivial kernel (that kernel would need to act effectively on a point)
    or (b) no invariant subspace of the kernel dimension can exist at all.
    Possible only with an explicit witness: a surjective equivariant linear
    lift, verified by building the germ.  Otherwise unknown.
    """
    n, k = source.dim, target.dim
    if theta.source is not source.group or theta.target is not target.group:
        raise ValueError("theta does not connect the chart groups")
    if n < k:
        return ObstructionCertificate(
            "impossible", "target_dim_exceeds_source",
            "no %d->%d differential can be surjective" % (n, k))
    if n == k and not kernel_of(theta).is_trivial():
        return ObstructionCertificate(
            "impossible", "kernel_on_point",
            "equal dimensions force a 0-dimensional kernel, but the "
            "homomorphism kernel of order %d would have to act effectively "
            "and faithfully on it" % kernel_of(theta).order)
    search = None
    if n > k:
        search = find_invariant_subspace(source.group, n - k)
        if search.status == "certified_none":
            return ObstructionCertificate(
                "impossible", "no_invariant_kernel",
                "a regular center value needs a %d-dimensional invariant "
                "subspace; none exists (%s)" % (n - k, search.reason),
                invariant_search=search)
    basis = _equivariant_linear_maps(source, target, theta)
    candidates = list(basis)
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            candidates.append(basis[i] + basis[j])
    rng = random.Random(271828)
    for _ in range(50):
        m = Matrix.zero(k, n)
        for b in basis:
            m = m + b.scale(Fraction(rng.randint(-3, 3)))
        candidates.append(m)
    for cand in candidates:
        if cand.rank() == k:
            lift = MultiPoly.from_linear(cand)
            germ = build_germ(source, target, lift, theta)
            return ObstructionCertificate(
                "possible", "linear_witness",
                "surjective equivariant linear lift found",
                witness_lift=germ.lift, invariant_search=search)
    return ObstructionCertificate(
        "unknown", "inconclusive",
        "no obstruction fired and no linear witness was found",
        invariant_search=search)


# ---------------------------------------------------------------------------
# Monte Carlo density sampling of regular values


def _sylvester_resultant(a: list[Fraction], b: list[Fraction]) -> Fraction:
    m, n = poly_deg(a), poly_deg(b)
    size = m + n
    rows = []
    ra, rb = list(reversed(a)), list(reversed(b))
    for i in range(n):
        rows.append([QZERO] * i + ra + [QZERO] * (size - m - 1 - i))
    for j in range(m):
        rows.append([QZERO] * j + rb + [QZERO] * (size - n - 1 - j))
    return Matrix(rows).det()


def _critical_value_resultant(coeffs: list[Fraction]) -> list[Fraction]:
    """Res_x(f - p, f') as a polynomial in p.

    Vanishes exactly at the (possibly complex) critical values of f, so a
    nonzero evaluation rules a sample out as a critical value cheaply.
    Computed by interpolation: the product formula makes it degree deg(f')
    in p.
    """
    deriv = poly_derivative(coeffs)
    if poly_deg(deriv) < 1:
        return [QONE]
    npts = poly_deg(deriv) + 1
    xs = list(range(npts))
    ys = []
    for t in xs:
        shifted = list(coeffs)
        shifted[0] = shifted[0] - t
        ys.append(_sylvester_resultant(poly_trim(shifted), deriv))
    from .ratlin import _lagrange_interpolate
    return _lagrange_interpolate(xs, ys) or [QZERO]


def _separable_coordinates(lift: MultiPoly) -> list[tuple]:
    """Per output coordinate: ('const', value) or ('poly', var, coeffs, deriv, res).

    Raises UnsupportedLift unless each output uses at most one variable and
    no two outputs share one.
    """
    used: list[int | None] = []
    for j in range(lift.out_dim):
        vs = lift.variables_used(j)
        if len(vs) > 1:
            raise UnsupportedLift(
                "output %d uses %d variables; supply a preimage table" % (j, len(vs)))
        used.append(vs.pop() if vs else None)
    seen = [v for v in used if v is not None]
    if len(seen) != len(set(seen)):
        raise UnsupportedLift("two outputs share a variable; supply a preimage table")
    out = []
    for j, v in enumerate(used):
        d = lift.coord_dict(j)
        if v is None:
            out.append(("const", d.get((0,) * lift.num_vars, QZERO)))
        else:
            coeffs = [QZERO] * (max(e[v] for e in d) + 1)
            for e, c in d.items():
                coeffs[e[v]] = c
            coeffs = poly_trim(coeffs)
            out.append(("poly", v, coeffs, poly_derivative(coeffs),
                        _critical_value_resultant(coeffs)))
    return out


def _classify_sample(coords, p) -> bool:
    """True iff p is a regular value of a separable lift; exact.

    p is critical exactly when every coordinate equation has a real
    solution and some coordinate shares a real root with its derivative.
    The cheap resultant filter handles almost every sample; the gcd and
    Sturm checks only run for resultant roots.
    """
    capable = []
    for coord, pj in zip(coords, p):
        if coord[0] == "const":
            if coord[1] != pj:
                return True  # constant coordinate misses pj: empty preimage
            capable.append((coord, pj, True))
        elif poly_eval_at(coord[4], pj) == 0:
            capable.append((coord, pj, False))
    if not capable:
        return True
    # some coordinate may be critical at pj: confirm over the reals
    critical_real = False
    nonempty_checks = []
    for coord, pj, is_const in capable:
        if is_const:
            critical_real = True  # zero Jacobian row on a full solution set
            continue
        _, _, coeffs, deriv, _ = coord
        shifted = list(coeffs)
        shifted[0] = shifted[0] - pj
        poly_trim(shifted)
        g = poly_gcd(shifted, deriv)
        if poly_deg(g) >= 1 and has_real_root(g):
            critical_real = True
        else:
            nonempty_checks.append(shifted)
    if not critical_real:
        return True
    # remaining coordinates must all have real solutions for pj to be a value
    for coord, pj in zip(coords, p):
        if coord[0] == "poly" and poly_eval_at(coord[4], pj) != 0:
            shifted = list(coord[2])
            shifted[0] = shifted[0] - pj
            poly_trim(shifted)
            if poly_deg(shifted) < 1 or not has_real_root(shifted):
                return True
    return any(poly_deg(s) < 1 or not has_real_root(s) for s in nonempty_checks)


@dataclass(frozen=True)
class SardReport:
    samples: int
    seed: int
    box: tuple[tuple[Fraction, Fraction], ...]
    regular_count: int
    critical_values: tuple[tuple[Fraction, ...], ...]

    @property
    def regular_fraction(self) -> Fraction:
        return Fraction(self.regular_count, self.samples)

    def to_jsonable(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "box": [[str(lo), str(hi)] for lo, hi in self.box],
            "regular_count": self.regular_count,
            "regular_fraction": str(self.regular_fraction),
            "critical_values": [[str(x) for x in v] for v in self.critical_values],
        }


def sard_sample(germ: MapGerm, box, samples: int, seed: int) -> SardReport:
    """Sample target points and classify each regular/critical exactly.

    Floats are used only to draw the samples; each is snapped to a rational
    with bounded denominator and then classified with exact arithmetic
    (empty preimages are regular by convention).  Deterministic per seed.
    """
    box = tuple((Fraction(lo), Fraction(hi)) for lo, hi in box)
    if len(box) != germ.target.dim:
        raise ValueError("box must give one interval per target coordinate")
    coords = _separable_coordinates(germ.lift)
    fbox = [(float(lo), float(hi)) for lo, hi in box]
    rng = random.Random(seed)
    regular_count = 0
    critical: set[tuple[Fraction, ...]] = set()
    for _ in range(samples):
        p = tuple(
            Fraction(round(rng.uniform(lo, hi) * SNAP_DENOMINATOR), SNAP_DENOMINATOR)
            for lo, hi in fbox)
        if _classify_sample(coords, p):
            regular_count += 1
        else:
            critical.add(p)
    return SardReport(
        samples=samples, seed=seed, box=box,
        regular_count=regular_count,
        critical_values=tuple(sorted(critical)),
    )


# ---------------------------------------------------------------------------
# lift replacement, re-centering, and pulling germs back through embeddings


@dataclass(frozen=True)
class LiftReplacementReport:
    eta_index: int
    kernels_equal: bool
    n_unchanged: bool
    companion: MapGerm


def lift_replacement_invariance(germ: MapGerm, eta: Matrix) -> LiftReplacementReport:
    """Replace the lift by eta o lift, conjugate theta by eta, and compare.

    The companion is re-verified as a germ; the differential kernels at the
    base point and the homomorphism kernels must agree exactly.
    """
    ei = germ.target.group.index_of(eta)
    companion = build_germ(
        germ.source, germ.target,
        germ.lift.apply_matrix(eta),
        germ.theta.conjugated_by(eta),
        germ.base_point,
    )
    k0 = germ.kernel_at(germ.base_point)
    k1 = companion.kernel_at(companion.base_point)
    n0 = germ.n_subgroup().members
    n1 = companion.n_subgroup().members
    report = LiftReplacementReport(
        eta_index=ei,
        kernels_equal=k0 == k1,
        n_unchanged=n0 == n1,
        companion=companion,
    )
    assert report.kernels_equal, "kernel changed under lift replacement"
    assert report.n_unchanged, "homomorphism kernel changed under conjugation"
    return report


def recenter_germ(germ: MapGerm, point) -> MapGerm:
    """Translate coordinates so a preimage point becomes the chart center.

    The chart group shrinks to the isotropy group of the point; the lift is
    precomposed with the translation; a boundary flag survives only when
    the point lies on the boundary hyperplane.
    """
    pt = vec(point)
    iso = isotropy_at(germ.source, pt)
    new_group = _subgroup_as_group(iso)
    boundary = germ.source.boundary and germ.source.on_boundary(pt)
    new_chart = LocalChart(germ.source.dim, new_group, boundary)
    gen_images = [germ.theta.apply_matrix(g) for g in new_group.generators]
    new_theta = verify_homomorphism(new_group, germ.target.group, gen_images)
    ident = Matrix.identity(germ.source.dim)
    new_lift = germ.lift.compose_affine(ident, pt)
    return build_germ(new_chart, germ.target, new_lift, new_theta)


def pull_back_germ(germ: MapGerm, embedding: ChartEmbedding) -> MapGerm:
    """Precompose a germ with a verified chart embedding into its source."""
    if embedding.target is not germ.source:
        raise ValueError("embedding does not land in the germ's source chart")
    lift = germ.lift.compose_affine(embedding.linear, embedding.translate)
    mapping = tuple(germ.theta.apply(embedding.theta.apply(i))
                    for i in range(embedding.source.group.order))
    theta = GroupHom(embedding.source.group, germ.target.group, mapping)
    return build_germ(embedding.source, germ.target, lift, theta)
