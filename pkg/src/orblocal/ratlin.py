"""Exact rational linear algebra and polynomial maps.

Everything in this module is computed over Q with ``fractions.Fraction``;
no floating point enters any code path here.  The three value types are

* ``Matrix``    -- immutable rational matrix (also used for vectors of group
                   actions and differentials),
* ``Subspace``  -- a linear subspace of Q^n stored by its reduced row-echelon
                   basis, so equality of subspaces is syntactic,
* ``MultiPoly`` -- a polynomial map Q^n -> Q^m with exact coefficients.

On top of those it provides kernels/images/rank, characteristic polynomials
with full factorization into irreducibles over Q (Yun square-free split plus
Kronecker's finite interpolation method; fine at the degrees <= 8 this
library works with), and dense univariate helpers (gcd, Sturm chains) used
by the critical-value sampler.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

QZERO = Fraction(0)
QONE = Fraction(1)


def rat(x) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("refusing to coerce float %r to an exact rational" % (x,))
    return Fraction(x)


def vec(entries: Iterable) -> tuple[Fraction, ...]:
    """A rational vector as an immutable tuple."""
    return tuple(rat(e) for e in entries)


def vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def is_zero_vec(v) -> bool:
    return all(x == 0 for x in v)


class Matrix:
    """Immutable rational matrix, row-major."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, entries: Sequence[Sequence]):
        rows = tuple(tuple(rat(e) for e in row) for row in entries)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        self.entries = rows
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0
        self._hash = None

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[QONE if i == j else QZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Matrix":
        return cls([[QZERO] * cols for _ in range(rows)])

    @classmethod
    def diagonal(cls, diag: Sequence) -> "Matrix":
        d = vec(diag)
        n = len(d)
        return cls([[d[i] if i == j else QZERO for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "Matrix":
        cols = [vec(c) for c in columns]
        if not cols:
            return cls([])
        return cls([[c[i] for c in cols] for i in range(len(cols[0]))])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i) -> tuple[Fraction, ...]:
        return self.entries[i]

    def column(self, j) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.entries)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.entries)
        return self._hash

    def __repr__(self):
        return "Matrix(%s)" % (
            [[str(e) for e in row] for row in self.entries],
        )

    def __add__(self, other):
        self._same_shape(other)
        return Matrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other):
        self._same_shape(other)
        return Matrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __neg__(self):
        return Matrix([[-a for a in row] for row in self.entries])

    def _same_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch: %dx%d vs %dx%d"
                             % (self.rows, self.cols, other.rows, other.cols))

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise ValueError("cannot multiply %dx%d by %dx%d"
                                 % (self.rows, self.cols, other.rows, other.cols))
            bt = list(zip(*other.entries)) if other.entries else []
            return Matrix(
                [
                    [sum(a * b for a, b in zip(row, col)) for col in bt]
                    for row in self.entries
                ]
            )
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "Matrix":
        c = rat(c)
        return Matrix([[c * a for a in row] for row in self.entries])

    def transpose(self) -> "Matrix":
        return Matrix(list(zip(*self.entries)) if self.entries else [])

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        """Matrix times column vector, returned as a tuple."""
        v = vec(v)
        if len(v) != self.cols:
            raise ValueError("vector length %d does not match %d columns"
                             % (len(v), self.cols))
        return tuple(sum(a * x for a, x in zip(row, v)) for row in self.entries)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == Matrix.identity(self.rows)

    def is_zero(self) -> bool:
        return all(a == 0 for row in self.entries for a in row)

    def trace(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("trace of non-square matrix")
        return sum(self.entries[i][i] for i in range(self.rows))

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row-echelon form and pivot columns."""
        m = [list(row) for row in self.entries]
        nrows, ncols = self.rows, self.cols
        pivots = []
        r = 0
        for c in range(ncols):
            pr = next((i for i in range(r, nrows) if m[i][c] != 0), None)
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            inv = 1 / m[r][c]
            m[r] = [inv * a for a in m[r]]
            for i in range(nrows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == nrows:
                break
        return Matrix(m), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        m = [list(row) for row in self.entries]
        n = self.rows
        d = QONE
        for c in range(n):
            pr = next((i for i in range(c, n) if m[i][c] != 0), None)
            if pr is None:
                return QZERO
            if pr != c:
                m[c], m[pr] = m[pr], m[c]
                d = -d
            d *= m[c][c]
            inv = 1 / m[c][c]
            for i in range(c + 1, n):
                if m[i][c] != 0:
                    f = m[i][c] * inv
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return d

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        aug = Matrix([list(row) + list(idr) for row, idr in
                      zip(self.entries, Matrix.identity(n).entries)])
        red, pivots = aug.rref()
        if pivots[:n] != tuple(range(n)):
            raise ValueError("matrix is singular")
        return Matrix([row[n:] for row in red.entries])

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def charpoly(self) -> tuple[Fraction, ...]:
        """Coefficients of det(xI - A), low degree first, monic.

        Faddeev-LeVerrier; exact over Q.
        """
        if self.rows != self.cols:
            raise ValueError("characteristic polynomial of non-square matrix")
        n = self.rows
        coeffs = [QZERO] * (n + 1)
        coeffs[n] = QONE
        mk = Matrix.identity(n)
        for k in range(1, n + 1):
            am = self * mk
            ck = -am.trace() / k
            coeffs[n - k] = ck
            if k < n:
                mk = am + ck * Matrix.identity(n)
        return tuple(coeffs)


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^n with a canonical reduced-echelon basis.

    Two Subspace values are equal exactly when they are the same subspace;
    the basis rows are the nonzero rows of the RREF of any spanning set.
    """

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_vectors(cls, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        vs = [vec(v) for v in vectors]
        for v in vs:
            if len(v) != ambient_dim:
                raise ValueError("vector length %d in ambient dimension %d"
                                 % (len(v), ambient_dim))
        if not vs:
            return cls(ambient_dim, ())
        red, pivots = Matrix(vs).rref()
        return cls(ambient_dim, tuple(red.entries[i] for i in range(len(pivots))))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls.from_vectors(n, Matrix.identity(n).entries)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def contains(self, v: Sequence) -> bool:
        v = list(vec(v))
        if len(v) != self.ambient_dim:
            raise ValueError("vector/ambient dimension mismatch")
        for row in self.basis:
            lead = next(j for j, a in enumerate(row) if a != 0)
            if v[lead] != 0:
                f = v[lead]
                v = [a - f * b for a, b in zip(v, row)]
        return all(a == 0 for a in v)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def sum_with(self, other: "Subspace") -> "Subspace":
        self._same_ambient(other)
        return Subspace.from_vectors(self.ambient_dim, self.basis + other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus: row reduce [A|A; B|0], read intersection off rows [0|D]."""
        self._same_ambient(other)
        n = self.ambient_dim
        block = [list(b) + list(b) for b in self.basis]
        block += [list(b) + [QZERO] * n for b in other.basis]
        if not block:
            return Subspace.zero(n)
        red, _ = Matrix(block).rref()
        inter = []
        for row in red.entries:
            if all(a == 0 for a in row[:n]) and any(a != 0 for a in row[n:]):
                inter.append(row[n:])
        return Subspace.from_vectors(n, inter)

    def image_under(self, m: Matrix) -> "Subspace":
        return Subspace.from_vectors(m.rows, [m.apply(b) for b in self.basis])

    def is_invariant_under(self, m: Matrix) -> bool:
        """True iff m maps this subspace into itself."""
        return all(self.contains(m.apply(b)) for b in self.basis)

    def fixed_pointwise_by(self, m: Matrix) -> bool:
        return all(m.apply(b) == b for b in self.basis)

    def complement_matrix(self) -> Matrix:
        """Rows annihilating this subspace: the subspace is their kernel."""
        if not self.basis:
            return Matrix.identity(self.ambient_dim)
        ker, _, _ = kernel_image_rank(Matrix(self.basis))
        return Matrix(ker.basis) if ker.basis else Matrix([[]] * 0)

    def _same_ambient(self, other):
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")


def kernel_image_rank(m: Matrix) -> tuple[Subspace, Subspace, int]:
    """Exact kernel, column space, and rank of a rational matrix."""
    red, pivots = m.rref()
    rank = len(pivots)
    pivot_set = set(pivots)
    free = [j for j in range(m.cols) if j not in pivot_set]
    kernel_vecs = []
    for j in free:
        v = [QZERO] * m.cols
        v[j] = QONE
        for r, pc in enumerate(pivots):
            v[pc] = -red.entries[r][j]
        kernel_vecs.append(v)
    kernel = Subspace.from_vectors(m.cols, kernel_vecs)
    image = Subspace.from_vectors(m.rows, [m.column(j) for j in range(m.cols)])
    return kernel, image, rank


def restrict_to_subspace(m: Matrix, s: Subspace) -> Matrix:
    """The matrix of m acting on s, in the coordinates of s's basis.

    Requires s invariant under m; raises ValueError with a witness vector
    otherwise.
    """
    k = s.dim
    if k == 0:
        return Matrix.identity(0)
    bt = Matrix(s.basis).transpose()
    cols = []
    for b in s.basis:
        mb = m.apply(b)
        coords = solve_exact(bt, mb)
        if coords is None:
            raise ValueError("subspace not invariant: image of %s leaves it"
                             % (tuple(str(x) for x in b),))
        cols.append(coords)
    return Matrix.from_columns(cols)


def solve_exact(a: Matrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """One exact solution x of a x = b, or None if inconsistent."""
    b = vec(b)
    aug = Matrix([list(row) + [bb] for row, bb in zip(a.entries, b)])
    red, pivots = aug.rref()
    if a.cols in pivots:
        return None
    x = [QZERO] * a.cols
    for r, pc in enumerate(pivots):
        x[pc] = red.entries[r][a.cols]
    return tuple(x)


# ---------------------------------------------------------------------------
# dense univariate polynomials over Q (coefficients low degree first)


def poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_deg(p: Sequence[Fraction]) -> int:
    return len(p) - 1


def poly_eval_at(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = QZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_mul(p, q):
    if not p or not q:
        return []
    out = [QZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly_trim(out)


def poly_add(p, q):
    out = [QZERO] * max(len(p), len(q))
    for i, a in enumerate(p):
        out[i] += a
    for i, b in enumerate(q):
        out[i] += b
    return poly_trim(out)


def poly_scale(p, c):
    c = rat(c)
    return poly_trim([c * a for a in p])


def poly_divmod(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = list(p)
    quot = [QZERO] * max(0, len(p) - len(q) + 1)
    lead = q[-1]
    while len(p) >= len(q) and p:
        f = p[-1] / lead
        k = len(p) - len(q)
        quot[k] = f
        for i, b in enumerate(q):
            p[k + i] -= f * b
        poly_trim(p)
    return poly_trim(quot), p


def poly_derivative(p):
    return poly_trim([i * c for i, c in enumerate(p)][1:])


def poly_monic(p):
    if not p:
        return []
    return poly_scale(p, 1 / p[-1])


def poly_gcd(p, q):
    """Monic gcd over Q."""
    p, q = poly_trim(list(p)), poly_trim(list(q))
    while q:
        p, q = q, poly_divmod(p, q)[1]
    return poly_monic(p)


def sturm_real_root_count(p: Sequence[Fraction]) -> int:
    """Number of distinct real roots of p (any nonzero p)."""
    p = poly_trim(list(p))
    if not p:
        raise ValueError("root count of the zero polynomial")
    p = poly_divmod(p, poly_gcd(p, poly_derivative(p)))[0] if poly_deg(p) >= 1 else p
    if poly_deg(p) < 1:
        return 0
    chain = [p, poly_derivative(p)]
    while poly_deg(chain[-1]) >= 1:
        rem = poly_divmod(chain[-2], chain[-1])[1]
        if not rem:
            break
        chain.append([-c for c in rem])
    if not chain[-1]:
        chain.pop()

    def variations(at_plus_inf: bool) -> int:
        signs = []
        for f in chain:
            s = 1 if f[-1] > 0 else -1
            if not at_plus_inf and poly_deg(f) % 2 == 1:
                s = -s
            signs.append(s)
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    return variations(False) - variations(True)


def has_real_root(p: Sequence[Fraction]) -> bool:
    p = poly_trim(list(p))
    if not p:
        return True
    if poly_deg(p) == 0:
        return False
    if poly_deg(p) % 2 == 1:
        return True
    return sturm_real_root_count(p) > 0


# ---------------------------------------------------------------------------
# factorization into irreducibles over Q


def _yun_squarefree(p: list[Fraction]) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm: monic square-free parts with multiplicities."""
    p = poly_monic(p)
    out = []
    a = poly_gcd(p, poly_derivative(p))
    b = poly_divmod(p, a)[0]
    c = poly_divmod(poly_derivative(p), a)[0]
    d = poly_add(c, poly_scale(poly_derivative(b), -1))
    i = 1
    while poly_deg(b) >= 1:
        ai = poly_gcd(b, d)
        if poly_deg(ai) >= 1:
            out.append((ai, i))
        b = poly_divmod(b, ai)[0]
        c = poly_divmod(d, ai)[0]
        d = poly_add(c, poly_scale(poly_derivative(b), -1))
        i += 1
    return out


def _int_divisors(n: int) -> list[int]:
    n = abs(n)
    small, big = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                big.append(n // d)
        d += 1
    ds = small + big[::-1]
    return [s * x for x in ds for s in (1, -1)]


def _rational_roots(p: list[Fraction]) -> list[Fraction]:
    """All rational roots of p, by the rational root theorem."""
    den = 1
    for c in p:
        den = den * c.denominator // _gcd_int(den, c.denominator)
    ip = [int(c * den) for c in p]
    while ip and ip[0] == 0:
        ip = ip[1:]
    roots = []
    if len(ip) != len(p):
        roots.append(QZERO)
    if not ip or len(ip) == 1:
        return roots
    for num in _int_divisors(ip[0]):
        for d in _int_divisors(ip[-1]):
            if d <= 0:
                continue
            cand = Fraction(num, d)
            if cand not in roots and poly_eval_at(p, cand) == 0:
                roots.append(cand)
    return roots


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


_KRONECKER_COMBO_CAP = 4_000_000


def _factor_squarefree(p: list[Fraction]) -> list[list[Fraction]]:
    """Irreducible monic factors of a monic square-free p over Q.

    Rational roots come off first; what remains of degree <= 3 is then
    irreducible.  Higher degrees use Kronecker interpolation: a degree-d
    factor is determined by its values at d+1 integer points, and those
    values divide the values of p there, so only finitely many candidates
    exist.
    """
    p = poly_monic(p)
    factors = []
    for r in sorted(_rational_roots(p)):
        p = poly_divmod(p, [-r, QONE])[0]
        factors.append([-r, QONE])
    while poly_deg(p) >= 1:
        if poly_deg(p) <= 3:
            factors.append(poly_monic(p))
            break
        q = _kronecker_find_factor(p)
        if q is None:
            factors.append(poly_monic(p))
            break
        factors.append(poly_monic(q))
        p = poly_divmod(p, q)[0]
    return factors


def _kronecker_find_factor(p: list[Fraction]) -> list[Fraction] | None:
    """A nontrivial factor of p (monic, square-free, no rational roots), or None."""
    den = 1
    for c in p:
        den = den * c.denominator // _gcd_int(den, c.denominator)
    ip = [int(c * den) for c in p]
    points: list[int] = []
    k = 0
    while len(points) <= poly_deg(p) // 2:
        for x in ([0] if k == 0 else [k, -k]):
            if poly_eval_at(p, Fraction(x)) != 0:
                points.append(x)
        k += 1
    for d in range(2, poly_deg(p) // 2 + 1):
        xs = points[: d + 1]
        divisor_lists = []
        for x in xs:
            divisor_lists.append(_int_divisors(poly_eval_at([Fraction(c) for c in ip], Fraction(x)).numerator))
        total = 1
        for dl in divisor_lists:
            total *= len(dl)
        if total > _KRONECKER_COMBO_CAP:
            raise RuntimeError("factor search space too large at degree %d" % d)
        # sign symmetry: q and -q divide together, so pin the first value > 0
        first = [v for v in divisor_lists[0] if v > 0]
        for values in itertools.product(first, *divisor_lists[1:]):
            q = _lagrange_interpolate(xs, values)
            if poly_deg(q) != d or q[-1] == 0:
                continue
            q = poly_monic(q)
            quot, rem = poly_divmod(p, q)
            if not rem and poly_deg(quot) >= 1:
                return q
    return None


def _lagrange_interpolate(xs: Sequence[int], ys: Sequence[int]) -> list[Fraction]:
    out: list[Fraction] = []
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        term = [Fraction(yi)]
        for j, xj in enumerate(xs):
            if j == i:
                continue
            term = poly_mul(term, [Fraction(-xj, 1), QONE])
            term = poly_scale(term, Fraction(1, xi - xj))
        out = poly_add(out, term)
    return out


def factor_rational_poly(p: Sequence[Fraction]) -> list[tuple[tuple[Fraction, ...], int]]:
    """Factor a univariate rational polynomial into monic irreducibles over Q.

    Returns (factor, multiplicity) pairs; the product of factor^multiplicity
    equals the monic normalization of the input.  Factors are sorted by
    (degree, coefficients) so output is canonical.
    """
    p = poly_trim([rat(c) for c in p])
    if poly_deg(p) < 1:
        return []
    found: list[tuple[tuple[Fraction, ...], int]] = []
    for part, mult in _yun_squarefree(p):
        for f in _factor_squarefree(part):
            found.append((tuple(f), mult))
    merged: dict[tuple[Fraction, ...], int] = {}
    for f, m in found:
        merged[f] = merged.get(f, 0) + m
    return sorted(merged.items(), key=lambda fm: (len(fm[0]), fm[0]))


def charpoly_factor(m: Matrix) -> list[tuple[tuple[Fraction, ...], int]]:
    """Irreducible factorization over Q of the characteristic polynomial of m."""
    return factor_rational_poly(m.charpoly())


def poly_apply_matrix(p: Sequence[Fraction], m: Matrix) -> Matrix:
    """Evaluate a univariate polynomial at a square matrix."""
    n = m.rows
    acc = Matrix.zero(n, n)
    power = Matrix.identity(n)
    for c in p:
        if c != 0:
            acc = acc + power.scale(c)
        power = power * m
    return acc


# ---------------------------------------------------------------------------
# multivariate polynomial maps

TermDict = dict[tuple[int, ...], Fraction]


def _t_canon(d: TermDict) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    return tuple(sorted((e, c) for e, c in d.items() if c != 0))


def _t_add(a: TermDict, b: TermDict) -> TermDict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, QZERO) + c
    return {e: c for e, c in out.items() if c != 0}


def _t_scale(a: TermDict, f: Fraction) -> TermDict:
    if f == 0:
        return {}
    return {e: f * c for e, c in a.items()}


def _t_mul(a: TermDict, b: TermDict) -> TermDict:
    out: TermDict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, QZERO) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def _t_eval(a: TermDict, point: Sequence[Fraction]) -> Fraction:
    total = QZERO
    for e, c in a.items():
        term = c
        for x, k in zip(point, e):
            if k:
                term *= x ** k
        total += term
    return total


def _t_partial(a: TermDict, var: int) -> TermDict:
    out: TermDict = {}
    for e, c in a.items():
        if e[var]:
            ne = e[:var] + (e[var] - 1,) + e[var + 1:]
            out[ne] = out.get(ne, QZERO) + c * e[var]
    return out


class MultiPoly:
    """A polynomial map Q^num_vars -> Q^out_dim with exact coefficients.

    Each output coordinate is stored as a canonical term dictionary
    (exponent vector -> coefficient); no zero coefficients, no duplicate
    exponent vectors.
    """

    __slots__ = ("num_vars", "coords", "_hash")

    def __init__(self, num_vars: int, coords: Sequence[TermDict]):
        self.num_vars = num_vars
        canon = []
        for d in coords:
            for e in d:
                if len(e) != num_vars:
                    raise ValueError("exponent vector %r in %d variables" % (e, num_vars))
                if any(k < 0 for k in e):
                    raise ValueError("negative exponent in %r" % (e,))
            canon.append(_t_canon(d))
        self.coords = tuple(canon)
        self._hash = None

    @property
    def out_dim(self) -> int:
        return len(self.coords)

    def coord_dict(self, i: int) -> TermDict:
        return dict(self.coords[i])

    @classmethod
    def zero_map(cls, num_vars: int, out_dim: int) -> "MultiPoly":
        return cls(num_vars, [{} for _ in range(out_dim)])

    @classmethod
    def constant(cls, num_vars: int, values: Sequence) -> "MultiPoly":
        z = (0,) * num_vars
        return cls(num_vars, [{z: rat(v)} if rat(v) != 0 else {} for v in values])

    @classmethod
    def coordinate(cls, num_vars: int, var: int) -> "MultiPoly":
        e = tuple(1 if i == var else 0 for i in range(num_vars))
        return cls(num_vars, [{e: QONE}])

    @classmethod
    def from_linear(cls, m: Matrix) -> "MultiPoly":
        """The linear map x -> m x as a polynomial map."""
        coords = []
        for row in m.entries:
            d: TermDict = {}
            for j, c in enumerate(row):
                if c != 0:
                    e = tuple(1 if i == j else 0 for i in range(m.cols))
                    d[e] = c
            coords.append(d)
        return cls(m.cols, coords)

    def __eq__(self, other):
        return (isinstance(other, MultiPoly) and self.num_vars == other.num_vars
                and self.coords == other.coords)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, self.coords))
        return self._hash

    def __repr__(self):
        return "MultiPoly(vars=%d, out=%d)" % (self.num_vars, self.out_dim)

    def __sub__(self, other):
        if self.num_vars != other.num_vars or self.out_dim != other.out_dim:
            raise ValueError("polynomial map shape mismatch")
        return MultiPoly(
            self.num_vars,
            [_t_add(dict(a), _t_scale(dict(b), Fraction(-1)))
             for a, b in zip(self.coords, other.coords)],
        )

    def is_zero(self) -> bool:
        return all(not c for c in self.coords)

    def eval(self, point: Sequence) -> tuple[Fraction, ...]:
        point = vec(point)
        if len(point) != self.num_vars:
            raise ValueError("point length %d, expected %d arguments"
                             % (len(point), self.num_vars))
        return tuple(_t_eval(dict(c), point) for c in self.coords)

    def partial(self, var: int) -> "MultiPoly":
        """Coordinatewise partial derivative with respect to one variable."""
        return MultiPoly(self.num_vars,
                         [_t_partial(dict(c), var) for c in self.coords])

    def jacobian_at(self, point: Sequence) -> Matrix:
        """Exact out_dim x num_vars Jacobian matrix at a rational point."""
        point = vec(point)
        if len(point) != self.num_vars:
            raise ValueError("point length %d, expected %d arguments"
                             % (len(point), self.num_vars))
        rows = []
        for c in self.coords:
            d = dict(c)
            rows.append([_t_eval(_t_partial(d, j), point)
                         for j in range(self.num_vars)])
        return Matrix(rows)

    def compose_affine(self, linear: Matrix, translate: Sequence | None = None) -> "MultiPoly":
        """Substitute x = linear*y + translate; result is a map in linear.cols vars."""
        if linear.rows != self.num_vars:
            raise ValueError("linear part has %d rows, map has %d variables"
                             % (linear.rows, self.num_vars))
        t = vec(translate) if translate is not None else (QZERO,) * self.num_vars
        nv = linear.cols
        zero_e = (0,) * nv
        subs: list[TermDict] = []
        for i in range(self.num_vars):
            d: TermDict = {}
            for j in range(nv):
                if linear.entries[i][j] != 0:
                    e = tuple(1 if k == j else 0 for k in range(nv))
                    d[e] = linear.entries[i][j]
            if t[i] != 0:
                d[zero_e] = d.get(zero_e, QZERO) + t[i]
            subs.append(d)
        coords_out = []
        pow_cache: dict[tuple[int, int], TermDict] = {}

        def sub_power(i: int, k: int) -> TermDict:
            if k == 0:
                return {zero_e: QONE}
            key = (i, k)
            if key not in pow_cache:
                pow_cache[key] = _t_mul(sub_power(i, k - 1), subs[i])
            return pow_cache[key]

        for c in self.coords:
            acc: TermDict = {}
            for e, coef in c:
                term = {zero_e: coef}
                for i, k in enumerate(e):
                    if k:
                        term = _t_mul(term, sub_power(i, k))
                acc = _t_add(acc, term)
            coords_out.append(acc)
        return MultiPoly(nv, coords_out)

    def apply_matrix(self, m: Matrix) -> "MultiPoly":
        """Post-compose with a linear map: returns m o self."""
        if m.cols != self.out_dim:
            raise ValueError("matrix has %d columns, map has %d outputs"
                             % (m.cols, self.out_dim))
        coords = []
        for row in m.entries:
            acc: TermDict = {}
            for c, d in zip(row, self.coords):
                if c != 0:
                    acc = _t_add(acc, _t_scale(dict(d), c))
            coords.append(acc)
        return MultiPoly(self.num_vars, coords)

    def translate_output(self, t: Sequence) -> "MultiPoly":
        """Add a constant vector to the output."""
        t = vec(t)
        if len(t) != self.out_dim:
            raise ValueError("translation length mismatch")
        z = (0,) * self.num_vars
        coords = []
        for c, ti in zip(self.coords, t):
            coords.append(_t_add(dict(c), {z: ti} if ti != 0 else {}))
        return MultiPoly(self.num_vars, coords)

    def dense_univariate(self, coord: int = 0) -> list[Fraction]:
        """Dense coefficient list of one output coordinate of a 1-variable map."""
        if self.num_vars != 1:
            raise ValueError("map has %d variables, expected 1" % self.num_vars)
        d = dict(self.coords[coord])
        if not d:
            return []
        out = [QZERO] * (max(e[0] for e in d) + 1)
        for e, c in d.items():
            out[e[0]] = c
        return out

    def variables_used(self, coord: int) -> set[int]:
        return {i for e, _ in self.coords[coord] for i, k in enumerate(e) if k}


def poly_eval(p: MultiPoly, point: Sequence) -> tuple[Fraction, ...]:
    """Exact evaluation of a polynomial map at a rational point."""
    return p.eval(point)


def poly_jacobian(p: MultiPoly, point: Sequence) -> Matrix:
    """Exact Jacobian of a polynomial map at a rational point."""
    return p.jacobian_at(point)


def poly_identity_zero(p: MultiPoly) -> bool:
    """True iff every coefficient of every coordinate is zero."""
    return p.is_zero()
