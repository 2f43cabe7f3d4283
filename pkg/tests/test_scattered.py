import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mvinterp.approx import lebesgue_function, runge1
from mvinterp.multiindex import build_complete_set
from mvinterp.newton import (InterpolationError, NewtonPolynomial, eval_newton_batch,
                             newton_basis_matrix)
from mvinterp.nodes import default_nodes
from mvinterp.scattered import (NotUnisolventError, build_scattered, interpolate_scattered,
                                perturb_grid, scattered_error_factor)


def perturbed_system(m, n, p, nu, seed):
    A = build_complete_set(m, n, p)
    ref = default_nodes(A)
    rng = np.random.default_rng(seed)
    return build_scattered(A, ref, perturb_grid(ref.points, nu, rng)), rng


def test_identity_system():
    A = build_complete_set(2, 5, 2)
    ref = default_nodes(A)
    s = build_scattered(A, ref, ref.points)
    np.testing.assert_allclose(s.R, np.eye(len(A)), atol=1e-13)
    np.testing.assert_allclose(s.S, np.eye(len(A)), atol=1e-13)
    assert s.s_inf == pytest.approx(1.0, abs=1e-12)
    F = np.arange(len(A), dtype=float)
    np.testing.assert_allclose(interpolate_scattered(s, F), F, atol=1e-12)
    assert np.all(interpolate_scattered(s, np.zeros(len(A))) == 0)
    assert scattered_error_factor(s, 1.0) == pytest.approx(2.0, abs=1e-12)


def test_collinear_nodes_rejected():
    A = build_complete_set(2, 1, np.inf)
    ref = default_nodes(A)
    with pytest.raises(NotUnisolventError) as exc:
        build_scattered(A, ref, [(0, 0), (0.1, 0.1), (0.3, 0.3), (-0.5, -0.5)])
    assert exc.value.condition_estimate > 1e13


def test_size_checks():
    A = build_complete_set(2, 2, 1)
    ref = default_nodes(A)
    with pytest.raises(InterpolationError):
        build_scattered(A, ref, ref.points[:-1])
    s = build_scattered(A, ref, ref.points)
    with pytest.raises(InterpolationError):
        interpolate_scattered(s, np.ones(len(A) + 2))
    with pytest.raises(ValueError):
        scattered_error_factor(s, 0.5)


def test_error_factor_exceeds_one():
    s, _ = perturbed_system(2, 6, 2, 0.25, 0)
    assert scattered_error_factor(s, 1.0) > 1.0


def test_perturb_keeps_boundary():
    A = build_complete_set(2, 8, 2)
    ref = default_nodes(A)
    X = perturb_grid(ref.points, 1.0, np.random.default_rng(0))
    on_edge = np.abs(ref.points) == 1.0
    np.testing.assert_array_equal(X[on_edge], ref.points[on_edge])
    assert np.all(np.abs(X) <= 1.0)
    with pytest.raises(ValueError):
        perturb_grid(ref.points, 1.5, np.random.default_rng(0))
    np.testing.assert_array_equal(perturb_grid(ref.points, 0.0, np.random.default_rng(0)), ref.points)


def test_perturbed_grid_runge_converges():
    errs = []
    xs = np.random.default_rng(99).uniform(-1, 1, (200, 2))
    for n in (4, 8, 12, 16):
        s, _ = perturbed_system(2, n, 2, 0.05, n)
        assert s.s_inf < 100
        Q = s.polynomial(interpolate_scattered(s, runge1(s.given_nodes)))
        errs.append(np.abs(eval_newton_batch(Q, xs) - runge1(xs)).max())
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_polynomial_recovered_on_perturbed_nodes():
    s, rng = perturbed_system(2, 6, 2, 0.05, 4)
    Q = NewtonPolynomial(s.A, s.reference.gp, rng.standard_normal(len(s.A)))
    R = s.polynomial(interpolate_scattered(s, eval_newton_batch(Q, s.given_nodes)))
    xs = rng.uniform(-1, 1, (100, 2))
    q = eval_newton_batch(Q, xs)
    assert np.abs(eval_newton_batch(R, xs) - q).max() <= 1e-7 * max(1.0, np.abs(q).max())


@pytest.mark.parametrize("nu", [0.05, 0.25, 0.5])
def test_inverse_and_interpolation_conditions(nu):
    s, rng = perturbed_system(2, 8, 2, nu, 1)
    np.testing.assert_allclose(s.R @ s.S, np.eye(len(s.A)), atol=1e-8)
    F = rng.standard_normal(len(s.A))
    Q = s.polynomial(interpolate_scattered(s, F))
    back = eval_newton_batch(Q, s.given_nodes)
    assert np.abs(back - F).max() <= 1e-8 * (1 + s.s_inf) * max(1.0, np.abs(F).max())


@pytest.mark.parametrize("seed", range(5))
def test_cross_lebesgue_bound(seed):
    s, rng = perturbed_system(2, 7, 2, 0.25, seed)
    xs = np.vstack([s.reference.points, s.given_nodes, rng.uniform(-1, 1, (4000, 2))])
    lam_ref = lebesgue_function(s.reference, xs, s.LN)
    # Lagrange basis of the given nodes expressed through the reference basis
    L_ref = newton_basis_matrix(s.A, s.reference.gp, xs) @ s.LN
    lam_given = np.abs(L_ref @ s.S).sum(axis=1)
    assert lam_given.max() <= s.s_inf * lam_ref.max() * (1 + 1e-6)


@given(st.integers(1, 3), st.integers(1, 5), st.sampled_from([1, 2, np.inf]), st.integers(0, 10**6))
def test_exactness_invariance(m, n, p, seed):
    A = build_complete_set(m, n, p)
    ref = default_nodes(A)
    rng = np.random.default_rng(seed)
    try:
        s = build_scattered(A, ref, perturb_grid(ref.points, 0.25, rng))
    except NotUnisolventError:
        return
    Q = NewtonPolynomial(A, ref.gp, rng.standard_normal(len(A)))
    R = s.polynomial(interpolate_scattered(s, eval_newton_batch(Q, s.given_nodes)))
    xs = rng.uniform(-1, 1, (40, m))
    q = eval_newton_batch(Q, xs)
    tol = 1e-9 * (1 + s.s_inf) * max(1.0, np.abs(Q.coefficients).max())
    assert np.abs(eval_newton_batch(R, xs) - q).max() <= tol
