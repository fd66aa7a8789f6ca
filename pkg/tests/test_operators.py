import math

import numpy as np
import pytest

from splitrates import (
    Composite,
    ConstructionError,
    DiagonalQuadratic,
    Huber,
    LinearMap,
    OrthonormalComposite,
    QuadraticFidelity,
    QuadraticPlusProxable,
    SemiOrthogonalComposite,
    Zero,
    difference_operator,
    haar_transform,
    huber_gradient,
    huber_prox,
    huber_value,
    odd_even_split,
    orthonormal_prox,
    scaled_shifted_prox,
    semiorthogonal_prox,
)
from splitrates.operators import extreme_eigenvalues, power_iteration_norm_sq

from _oracles import prox_by_coordinate_descent


class TestHuberScalars:
    def test_value(self):
        assert huber_value(0.0, 1.0) == 0.0
        assert huber_value(1.0, 1.0) == pytest.approx(0.5)  # both branches agree
        assert huber_value(3.0, 0.5) == pytest.approx(2.75)
        assert huber_value(-3.0, 0.5) == pytest.approx(2.75)

    def test_gradient(self):
        assert huber_gradient(2.0, 1.0) == 1.0
        assert huber_gradient(0.5, 1.0) == pytest.approx(0.5)
        assert huber_gradient(0.0, 1.0) == 0.0
        assert huber_gradient(-2.0, 1.0) == -1.0

    def test_prox(self):
        assert huber_prox(3.0, 0.5, 1.0) == pytest.approx(2.0)
        assert huber_prox(1.0, 0.5, 1.0) == pytest.approx(1.0 / 3.0)
        assert huber_prox(0.0, 0.5, 1.0) == 0.0
        assert huber_prox(-3.0, 0.5, 1.0) == pytest.approx(-2.0)

    def test_prox_boundary_belongs_to_linear_branch(self):
        # at |z| = tau + mu both branches coincide
        mu, tau = 0.5, 1.0
        z = tau + mu
        assert huber_prox(z, mu, tau) == pytest.approx(z - tau)
        assert huber_prox(z, mu, tau) == pytest.approx(mu * z / (tau + mu))

    def test_vectorized(self):
        z = np.array([-3.0, 0.0, 1.0])
        np.testing.assert_allclose(huber_value(z, 0.5), [2.75, 0.0, 0.75])
        np.testing.assert_allclose(huber_prox(z, 0.5, 1.0), [-2.0, 0.0, 1.0 / 3.0])

    def test_value_continuous_at_kink(self):
        mu = 0.3
        below = huber_value(mu - 1e-12, mu)
        above = huber_value(mu + 1e-12, mu)
        assert below == pytest.approx(above, abs=1e-10)

    def test_prox_optimality_relation(self):
        # (z - prox(z)) / tau equals the gradient at the prox point
        rng = np.random.default_rng(0)
        for _ in range(200):
            mu = 10.0 ** rng.uniform(-3, 0)
            tau = 10.0 ** rng.uniform(-2, 1)
            z = rng.normal(scale=3.0)
            p = huber_prox(z, mu, tau)
            assert (z - p) / tau == pytest.approx(huber_gradient(p, mu), abs=1e-10)

    def test_gradient_matches_central_differences(self):
        rng = np.random.default_rng(42)
        mu = 0.3
        count = 0
        while count < 100:
            z = rng.normal(scale=2.0)
            if abs(abs(z) - mu) < 1e-3:
                continue  # stay away from the kink
            count += 1
            fd = (huber_value(z + 1e-6, mu) - huber_value(z - 1e-6, mu)) / 2e-6
            grad = huber_gradient(z, mu)
            assert grad == pytest.approx(fd, rel=1e-4, abs=1e-8)


class TestDifferenceOperator:
    def test_constant_in_kernel(self):
        D = difference_operator(3)
        np.testing.assert_allclose(D(np.ones(3)), np.zeros(2))

    def test_row_arithmetic(self):
        D = difference_operator(3)
        np.testing.assert_allclose(D(np.array([0.0, 2.0, 2.0])), [1.0, 0.0])

    def test_adjoint_first_row(self):
        D = difference_operator(4)
        np.testing.assert_allclose(D.adjoint(np.array([1.0, 0.0, 0.0])), [-0.5, 0.5, 0.0, 0.0])

    def test_norm_at_most_one(self):
        D = difference_operator(64)
        assert D.operator_norm_sq <= 1.0
        assert not D.norm_sq_exact

    def test_adjoint_identity_random(self):
        rng = np.random.default_rng(1)
        D = difference_operator(17)
        for _ in range(100):
            x = rng.standard_normal(17)
            y = rng.standard_normal(16)
            assert D(x) @ y == pytest.approx(x @ D.adjoint(y), abs=1e-10)


class TestOddEvenSplit:
    def test_three_point_rows(self):
        D1, D2 = odd_even_split(difference_operator(3))
        np.testing.assert_allclose(D1.matrix, [[-0.5, 0.5, 0.0]])
        np.testing.assert_allclose(D2.matrix, [[0.0, -0.5, 0.5]])

    def test_semiorthogonal_identity_exact(self):
        D1, D2 = odd_even_split(difference_operator(32))
        rng = np.random.default_rng(2)
        for L in (D1, D2):
            u = rng.standard_normal(L.out_dim)
            np.testing.assert_allclose(L(L.adjoint(u)), 0.5 * u, atol=1e-15)
            assert L.operator_norm_sq == 0.5
            assert L.norm_sq_exact

    def test_two_point_even_is_empty(self):
        _, D2 = odd_even_split(difference_operator(2))
        assert D2.out_dim == 0


class TestHaar:
    def test_constant_has_zero_details(self):
        W = haar_transform(8)
        w = W(np.full(8, 3.0))
        np.testing.assert_allclose(w[1:], 0.0, atol=1e-14)
        assert w[0] == pytest.approx(3.0 * math.sqrt(8.0))

    def test_two_point_detail(self):
        W = haar_transform(2)
        w = W(np.array([1.0, -1.0]))
        assert w[1] == pytest.approx(math.sqrt(2.0))
        assert w[0] == pytest.approx(0.0, abs=1e-15)

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for n, levels in ((8, None), (16, 2), (32, 1)):
            W = haar_transform(n, levels)
            x = rng.standard_normal(n)
            np.testing.assert_allclose(W.adjoint(W(x)), x, atol=1e-12)
            np.testing.assert_allclose(W(W.adjoint(x)), x, atol=1e-12)

    def test_orthonormal_as_matrix(self):
        W = haar_transform(16)
        m = np.column_stack([W(col) for col in np.eye(16)])
        np.testing.assert_allclose(m.T @ m, np.eye(16), atol=1e-12)

    def test_adjoint_identity_random(self):
        rng = np.random.default_rng(44)
        W = haar_transform(16, 2)
        for _ in range(100):
            x, y = rng.standard_normal((2, 16))
            assert W(x) @ y == pytest.approx(x @ W.adjoint(y), abs=1e-10)

    def test_non_power_of_two_rejected(self):
        from splitrates import ParameterError

        with pytest.raises(ParameterError):
            haar_transform(12)


class TestSpectral:
    def test_power_iteration_diagonal(self):
        m = np.diag([1.0, 2.0, 0.5])
        got = power_iteration_norm_sq(lambda x: m @ x, lambda y: m.T @ y, 3)
        assert got == pytest.approx(4.0, rel=1e-8)

    def test_extreme_eigenvalues(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((12, 6))
        s = a.T @ a
        lam_min, lam_max = extreme_eigenvalues(s)
        expected = np.linalg.eigvalsh(s)
        assert lam_max == pytest.approx(expected[-1], rel=1e-8)
        assert lam_min == pytest.approx(expected[0], rel=1e-8)

    def test_singular_matrix_reports_zero(self):
        a = np.array([[1.0, 1.0], [1.0, 1.0]])
        lam_min, lam_max = extreme_eigenvalues(a.T @ a)
        assert lam_min == 0.0
        assert lam_max == pytest.approx(4.0, rel=1e-8)


class TestQuadraticFidelity:
    def test_identity_prox(self):
        f = QuadraticFidelity(None, np.zeros(2))
        np.testing.assert_allclose(f.prox(np.array([2.0, 2.0]), 1.0), [1.0, 1.0])

    def test_identity_constants(self):
        z = np.array([0.3, -1.0])
        f = QuadraticFidelity(None, z)
        np.testing.assert_allclose(f.gradient(np.array([1.0, 1.0])), [0.7, 2.0])
        assert f.grad_lipschitz == 1.0
        assert f.strong_convexity == 1.0

    def test_diagonal_constants(self):
        f = QuadraticFidelity(np.diag([1.0, 2.0]), np.zeros(2))
        assert f.strong_convexity == pytest.approx(1.0, rel=1e-8)
        assert f.grad_lipschitz == pytest.approx(4.0, rel=1e-8)

    def test_prox_solves_linear_system(self):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((7, 4))
        z = rng.standard_normal(7)
        f = QuadraticFidelity(A, z)
        x = rng.standard_normal(4)
        tau = 0.7
        y = f.prox(x, tau)
        np.testing.assert_allclose(y + tau * f.gradient(y), x, atol=1e-10)

    def test_rank_deficient_keeps_prox(self):
        A = np.array([[1.0, 1.0]])
        f = QuadraticFidelity(A, np.array([2.0]))
        assert f.strong_convexity == 0.0
        y = f.prox(np.zeros(2), 1.0)
        np.testing.assert_allclose(y + f.gradient(y), np.zeros(2), atol=1e-12)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(6)
        A = rng.standard_normal((5, 3))
        f = QuadraticFidelity(A, rng.standard_normal(5))
        x = rng.standard_normal(3)
        g = f.gradient(x)
        for i in range(3):
            e = np.zeros(3)
            e[i] = 1e-6
            fd = (f.value(x + e) - f.value(x - e)) / 2e-6
            assert g[i] == pytest.approx(fd, rel=1e-4)

    def test_cocoercivity_of_gradient(self):
        rng = np.random.default_rng(7)
        A = rng.standard_normal((6, 4))
        f = QuadraticFidelity(A, np.zeros(6))
        inv_l = 1.0 / f.grad_lipschitz
        for _ in range(100):
            x, y = rng.standard_normal((2, 4))
            dg = f.gradient(x) - f.gradient(y)
            assert (x - y) @ dg >= inv_l * (dg @ dg) - 1e-10


class TestCompositeProx:
    def test_semiorthogonal_identity_reduces_to_prox(self):
        h = Huber(0.5)
        L = LinearMap(lambda x: x, lambda y: y, 3, 3, norm_sq=1.0, norm_sq_exact=True)
        x = np.array([3.0, -1.0, 0.2])
        np.testing.assert_allclose(semiorthogonal_prox(h, L, x, 1.0), h.prox(x, 1.0))

    def test_constant_signal_untouched(self):
        D1, _ = odd_even_split(difference_operator(8))
        comp = SemiOrthogonalComposite(Huber(0.5), D1)
        x = np.full(8, 1.7)
        np.testing.assert_allclose(comp.prox(x, 2.0), x)

    def test_hand_worked_three_point(self):
        D1, _ = odd_even_split(difference_operator(3))
        comp = SemiOrthogonalComposite(Huber(0.5, weight=1.0), D1)
        got = comp.prox(np.array([0.0, 2.0, 2.0]), 1.0)
        np.testing.assert_allclose(got, [0.5, 1.5, 2.0], atol=1e-14)

    def test_non_semiorthogonal_rejected(self):
        with pytest.raises(ConstructionError):
            SemiOrthogonalComposite(Huber(0.5), difference_operator(5))

    def test_matches_numeric_argmin(self):
        rng = np.random.default_rng(8)
        D1, D2 = odd_even_split(difference_operator(7))
        for L in (D1, D2):
            comp = SemiOrthogonalComposite(Huber(0.4, weight=0.8), L)
            for _ in range(5):
                x = rng.normal(scale=2.0, size=7)
                tau = 10.0 ** rng.uniform(-1, 0.7)
                got = comp.prox(x, tau)
                want = prox_by_coordinate_descent(comp.value, x, tau)
                np.testing.assert_allclose(got, want, atol=1e-6)

    def test_empty_even_split_is_identity(self):
        _, D2 = odd_even_split(difference_operator(2))
        comp = SemiOrthogonalComposite(Huber(0.5), D2)
        x = np.array([1.0, -2.0])
        np.testing.assert_allclose(comp.prox(x, 1.0), x)
        assert comp.value(x) == 0.0

    def test_orthonormal_identity_reduces_to_prox(self):
        h = Huber(0.5)
        W = LinearMap(lambda x: x, lambda y: y, 4, 4, norm_sq=1.0, norm_sq_exact=True)
        x = np.array([3.0, -1.0, 0.2, 0.9])
        np.testing.assert_allclose(orthonormal_prox(h, W, x, 1.3), h.prox(x, 1.3))

    def test_orthonormal_zero_function_is_identity(self):
        W = haar_transform(8)
        comp = OrthonormalComposite(Zero(), W)
        x = np.arange(8.0)
        np.testing.assert_allclose(comp.prox(x, 2.0), x, atol=1e-12)

    def test_orthonormal_matches_transform_domain_argmin(self):
        rng = np.random.default_rng(9)
        W = haar_transform(8)
        h = Huber(0.3, weight=0.6)
        comp = OrthonormalComposite(h, W)
        for _ in range(5):
            x = rng.normal(scale=2.0, size=8)
            tau = 10.0 ** rng.uniform(-1, 0.7)
            got = comp.prox(x, tau)
            # independent route: scalar argmin per transform coordinate
            want = W.adjoint(prox_by_coordinate_descent(h.value, W(x), tau))
            np.testing.assert_allclose(got, want, atol=1e-6)

    def test_orthonormality_verified_at_construction(self):
        with pytest.raises(ConstructionError):
            OrthonormalComposite(Huber(0.5), difference_operator(5))


class TestScaledShiftedProx:
    def test_zero_g(self):
        z = np.array([1.0, 2.0])
        x = np.array([4.0, 0.0])
        np.testing.assert_allclose(scaled_shifted_prox(z, Zero(), x, 1.0), (x + z) / 2.0)

    def test_small_tau_limit(self):
        z = np.zeros(3)
        x = np.array([1.0, -2.0, 0.5])
        got = scaled_shifted_prox(z, Huber(0.5), x, 1e-12)
        np.testing.assert_allclose(got, x, atol=1e-9)

    def test_matches_numeric_argmin(self):
        rng = np.random.default_rng(10)
        _, D2 = odd_even_split(difference_operator(5))
        g = SemiOrthogonalComposite(Huber(0.4, weight=0.9), D2)
        z = rng.standard_normal(5)
        full = QuadraticPlusProxable(z, g)
        for _ in range(5):
            x = rng.normal(scale=2.0, size=5)
            tau = 10.0 ** rng.uniform(-1, 0.7)
            got = full.prox(x, tau)
            want = prox_by_coordinate_descent(full.value, x, tau)
            np.testing.assert_allclose(got, want, atol=1e-6)

    def test_constants(self):
        g = Huber(0.5, weight=2.0)
        full = QuadraticPlusProxable(np.zeros(2), g)
        assert full.grad_lipschitz == 1.0 + 4.0
        assert full.strong_convexity == 1.0


class TestFunctionObjects:
    def test_huber_constants(self):
        h = Huber(0.25, weight=0.7)
        assert h.grad_lipschitz == pytest.approx(2.8)
        assert h.strong_convexity == 0.0

    def test_composite_gradient_chain_rule(self):
        rng = np.random.default_rng(11)
        D = difference_operator(9)
        g = Composite(Huber(0.3, weight=0.5), D)
        x = rng.standard_normal(9)
        grad = g.gradient(x)
        for i in range(9):
            e = np.zeros(9)
            e[i] = 1e-6
            fd = (g.value(x + e) - g.value(x - e)) / 2e-6
            assert grad[i] == pytest.approx(fd, abs=1e-4)

    def test_prox_nonexpansive(self):
        rng = np.random.default_rng(12)
        D1, _ = odd_even_split(difference_operator(10))
        funcs = [
            Huber(0.4, weight=0.9),
            SemiOrthogonalComposite(Huber(0.4, weight=0.9), D1),
            OrthonormalComposite(Huber(0.2), haar_transform(16)),
            QuadraticFidelity(rng.standard_normal((12, 10)), rng.standard_normal(12)),
        ]
        for fn in funcs:
            dim = 16 if isinstance(fn, OrthonormalComposite) else 10
            for _ in range(50):
                x, y = rng.standard_normal((2, dim))
                px, py = fn.prox(x, 0.8), fn.prox(y, 0.8)
                assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-12

    def test_diagonal_quadratic_prox(self):
        f = DiagonalQuadratic([2.0, 0.5], z=[1.0, 0.0])
        x = np.array([3.0, 3.0])
        got = f.prox(x, 1.0)
        np.testing.assert_allclose(got + f.gradient(got), x, atol=1e-14)
