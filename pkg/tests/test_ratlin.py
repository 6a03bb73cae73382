import random
from fractions import Fraction as F

import pytest

from orblocal.ratlin import (
    Matrix,
    MultiPoly,
    Subspace,
    charpoly_factor,
    factor_rational_poly,
    has_real_root,
    kernel_image_rank,
    poly_apply_matrix,
    poly_eval,
    poly_identity_zero,
    poly_jacobian,
    poly_gcd,
    poly_mul,
    restrict_to_subspace,
    solve_exact,
    sturm_real_root_count,
)


def random_matrix(rng, rows, cols, span=4):
    return Matrix([[F(rng.randint(-span, span), rng.randint(1, 3))
                    for _ in range(cols)] for _ in range(rows)])


class TestMatrix:
    def test_mul_identity(self):
        m = Matrix([[1, 2], [3, 4]])
        assert m * Matrix.identity(2) == m
        assert Matrix.identity(2) * m == m

    def test_inverse(self):
        m = Matrix([[1, 2], [3, 5]])
        assert m * m.inverse() == Matrix.identity(2)

    def test_singular_inverse_raises(self):
        with pytest.raises(ValueError):
            Matrix([[1, 2], [2, 4]]).inverse()

    def test_det(self):
        assert Matrix([[2, 0], [0, 3]]).det() == 6
        assert Matrix([[1, 2], [2, 4]]).det() == 0

    def test_charpoly_diag(self):
        # det(xI - diag(1,2)) = (x-1)(x-2) = x^2 - 3x + 2
        assert Matrix.diagonal([1, 2]).charpoly() == (F(2), F(-3), F(1))

    def test_charpoly_matches_det(self):
        rng = random.Random(7)
        for _ in range(20):
            n = rng.randint(1, 4)
            m = random_matrix(rng, n, n)
            cp = m.charpoly()
            # constant term is det(-A) = (-1)^n det A
            assert cp[0] == (-1) ** n * m.det()
            assert cp[n] == 1


class TestKernelImageRank:
    def test_one_by_two(self):
        k, im, r = kernel_image_rank(Matrix([[2, 0]]))
        assert k == Subspace.from_vectors(2, [[0, 1]])
        assert im == Subspace.full(1)
        assert r == 1

    def test_zero_matrix(self):
        k, im, r = kernel_image_rank(Matrix.zero(3, 3))
        assert k.is_full() and im.is_zero() and r == 0

    def test_identity(self):
        k, im, r = kernel_image_rank(Matrix.identity(3))
        assert k.is_zero() and r == 3

    def test_rank_nullity_random(self):
        rng = random.Random(20240)
        for _ in range(60):
            rows, cols = rng.randint(1, 6), rng.randint(1, 6)
            m = random_matrix(rng, rows, cols)
            k, im, r = kernel_image_rank(m)
            assert r + k.dim == cols
            assert im.dim == r
            for b in k.basis:
                assert all(x == 0 for x in m.apply(b))

    def test_solve_exact(self):
        a = Matrix([[1, 2], [0, 1]])
        x = solve_exact(a, (5, 2))
        assert a.apply(x) == (F(5), F(2))
        assert solve_exact(Matrix([[1, 0], [1, 0]]), (0, 1)) is None


class TestSubspace:
    def test_canonical_equality(self):
        s1 = Subspace.from_vectors(3, [[1, 1, 0], [0, 0, 1]])
        s2 = Subspace.from_vectors(3, [[2, 2, 2], [0, 0, 5]])
        assert s1 == s2
        assert hash(s1) == hash(s2)

    def test_order_independent(self):
        rng = random.Random(5)
        vecs = [[rng.randint(-3, 3) for _ in range(4)] for _ in range(3)]
        s1 = Subspace.from_vectors(4, vecs)
        s2 = Subspace.from_vectors(4, vecs[::-1])
        assert s1 == s2

    def test_contains(self):
        s = Subspace.from_vectors(3, [[1, 0, 0], [0, 1, 0]])
        assert s.contains([2, -3, 0])
        assert not s.contains([0, 0, 1])

    def test_intersect_sum(self):
        xy = Subspace.from_vectors(3, [[1, 0, 0], [0, 1, 0]])
        yz = Subspace.from_vectors(3, [[0, 1, 0], [0, 0, 1]])
        assert xy.intersect(yz) == Subspace.from_vectors(3, [[0, 1, 0]])
        assert xy.sum_with(yz).is_full()

    def test_intersect_random_dims(self):
        rng = random.Random(99)
        for _ in range(30):
            n = rng.randint(2, 5)
            a = Subspace.from_vectors(n, [[rng.randint(-2, 2) for _ in range(n)]
                                          for _ in range(rng.randint(0, n))])
            b = Subspace.from_vectors(n, [[rng.randint(-2, 2) for _ in range(n)]
                                          for _ in range(rng.randint(0, n))])
            inter, total = a.intersect(b), a.sum_with(b)
            assert inter.dim + total.dim == a.dim + b.dim
            for v in inter.basis:
                assert a.contains(v) and b.contains(v)

    def test_restrict_to_subspace(self):
        m = Matrix.diagonal([1, -1])
        s = Subspace.from_vectors(2, [[0, 1]])
        assert restrict_to_subspace(m, s) == Matrix([[-1]])

    def test_restrict_non_invariant_raises(self):
        rot = Matrix([[0, -1], [1, 0]])
        line = Subspace.from_vectors(2, [[1, 0]])
        with pytest.raises(ValueError):
            restrict_to_subspace(rot, line)


class TestFactorization:
    def test_rotation_charpoly_irreducible(self):
        m = Matrix([[0, -1], [1, -1]])
        assert m.charpoly() == (F(1), F(1), F(1))
        assert charpoly_factor(m) == [((F(1), F(1), F(1)), 1)]

    def test_diag_splits(self):
        fs = charpoly_factor(Matrix.diagonal([1, -1]))
        assert fs == [((F(-1), F(1)), 1), ((F(1), F(1)), 1)]

    def test_identity_multiplicity(self):
        fs = charpoly_factor(Matrix.identity(2))
        assert fs == [((F(-1), F(1)), 2)]

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            charpoly_factor(Matrix([[1, 2]]))

    @pytest.mark.parametrize("poly,expect", [
        # x^4 + 4 = (x^2-2x+2)(x^2+2x+2)
        ([4, 0, 0, 0, 1], [[2, -2, 1], [2, 2, 1]]),
        # x^4 + x^2 + 1 = (x^2-x+1)(x^2+x+1)
        ([1, 0, 1, 0, 1], [[1, -1, 1], [1, 1, 1]]),
        # x^4 + 1 irreducible over Q
        ([1, 0, 0, 0, 1], [[1, 0, 0, 0, 1]]),
        # x^2 - 2 irreducible
        ([-2, 0, 1], [[-2, 0, 1]]),
        # (x-1)^2 (x+2)
        ([2, -3, 0, 1], [[-1, 1], [2, 1]]),
    ])
    def test_known_factorizations(self, poly, expect):
        fs = factor_rational_poly([F(c) for c in poly])
        assert [[int(c) for c in f] for f, _ in fs] == expect

    def test_reexpansion_random(self):
        rng = random.Random(31337)
        for _ in range(25):
            deg = rng.randint(1, 6)
            coeffs = [F(rng.randint(-4, 4)) for _ in range(deg)] + [F(1)]
            fs = factor_rational_poly(coeffs)
            prod = [F(1)]
            for f, mult in fs:
                for _ in range(mult):
                    prod = poly_mul(prod, list(f))
            assert prod == coeffs

    def test_cyclotomic_matrix_orders(self):
        # finite-order rational matrices have cyclotomic charpoly factors
        rot4 = Matrix([[0, -1], [1, 0]])
        assert charpoly_factor(rot4) == [((F(1), F(0), F(1)), 1)]

    def test_poly_apply_matrix(self):
        m = Matrix([[0, -1], [1, -1]])
        # Cayley-Hamilton: p(m) = 0 for the characteristic polynomial
        assert poly_apply_matrix(list(m.charpoly()), m).is_zero()


class TestSturm:
    @pytest.mark.parametrize("poly,count", [
        ([-1, 0, 1], 2),     # x^2 - 1
        ([1, 0, 1], 0),      # x^2 + 1
        ([0, 0, 1], 1),      # x^2 (double root counts once)
        ([0, -3, 0, 1], 3),  # x^3 - 3x
        ([2, 0, 1], 0),      # x^2 + 2
    ])
    def test_root_counts(self, poly, count):
        assert sturm_real_root_count([F(c) for c in poly]) == count
        assert has_real_root([F(c) for c in poly]) == (count > 0)

    def test_gcd(self):
        # gcd(x^2-1, x-1) = x-1 up to normalization
        g = poly_gcd([F(-1), F(0), F(1)], [F(-1), F(1)])
        assert g == [F(-1), F(1)]


class TestMultiPoly:
    def test_eval_sum_squares(self):
        p = MultiPoly(2, [{(2, 0): F(1), (0, 2): F(1)}])
        assert poly_eval(p, [F(3, 2), 0]) == (F(9, 4),)
        assert poly_eval(p, [0, 0]) == (F(0),)

    def test_eval_square_negative(self):
        p = MultiPoly(1, [{(2,): F(1)}])
        assert poly_eval(p, [-2]) == (F(4),)

    def test_eval_arity_mismatch(self):
        p = MultiPoly(2, [{(1, 0): F(1)}])
        with pytest.raises(ValueError):
            poly_eval(p, [1])

    def test_jacobian_square(self):
        p = MultiPoly(1, [{(2,): F(1)}])
        assert poly_jacobian(p, [1]) == Matrix([[2]])

    def test_jacobian_linear(self):
        p = MultiPoly.coordinate(2, 0)
        assert poly_jacobian(p, [7, -2]) == Matrix([[1, 0]])

    def test_jacobian_gradient(self):
        p = MultiPoly(2, [{(2, 0): F(1), (0, 2): F(1)}])
        assert poly_jacobian(p, [1, 0]) == Matrix([[2, 0]])

    def test_identity_zero_even_composition(self):
        p = MultiPoly(1, [{(2,): F(1)}])
        neg = Matrix([[-1]])
        assert poly_identity_zero(p.compose_affine(neg) - p)

    def test_identity_zero_odd_composition(self):
        p = MultiPoly.coordinate(1, 0)
        neg = Matrix([[-1]])
        diff = p.compose_affine(neg) - p
        assert not poly_identity_zero(diff)
        assert diff.coords[0] == (((1,), F(-2)),)

    def test_zero_map(self):
        assert poly_identity_zero(MultiPoly.zero_map(3, 2))

    def test_compose_affine_translation(self):
        p = MultiPoly(1, [{(2,): F(1)}])
        shifted = p.compose_affine(Matrix.identity(1), [1])
        # (y+1)^2 = y^2 + 2y + 1
        assert shifted.eval([0]) == (F(1),)
        assert shifted.eval([1]) == (F(4),)
        assert shifted.eval([F(-1, 2)]) == (F(1, 4),)

    def test_compose_matches_pointwise(self):
        rng = random.Random(8)
        p = MultiPoly(2, [{(2, 1): F(3), (0, 1): F(-1)}, {(1, 1): F(1)}])
        lin = random_matrix(rng, 2, 2)
        t = [F(1, 2), F(-1)]
        comp = p.compose_affine(lin, t)
        for _ in range(10):
            y = [F(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(2)]
            x = [a + b for a, b in zip(lin.apply(y), t)]
            assert comp.eval(y) == p.eval(x)

    def test_apply_matrix(self):
        p = MultiPoly(1, [{(1,): F(1)}, {(2,): F(1)}])
        m = Matrix([[0, 1], [1, 0]])
        q = p.apply_matrix(m)
        assert q.eval([3]) == (F(9), F(3))

    def test_jacobian_float_shadow(self):
        # central finite differences on a float shadow agree to 1e-6
        rng = random.Random(4242)
        p = MultiPoly(3, [
            {(2, 0, 0): F(1), (0, 1, 1): F(-2), (1, 0, 0): F(1, 3)},
            {(0, 3, 0): F(1, 2), (1, 1, 0): F(2)},
        ])

        def shadow(pt):
            return [float(v) for v in p.eval([F(x).limit_denominator(10 ** 9)
                                              for x in pt])]

        for _ in range(5):
            pt = [rng.uniform(-1, 1) for _ in range(3)]
            jac = p.jacobian_at([F(x).limit_denominator(10 ** 9) for x in pt])
            h = 1e-4
            for j in range(3):
                up = list(pt)
                dn = list(pt)
                up[j] += h
                dn[j] -= h
                fd = [(u - d) / (2 * h) for u, d in zip(shadow(up), shadow(dn))]
                for i in range(2):
                    assert abs(float(jac[i, j]) - fd[i]) < 1e-6
