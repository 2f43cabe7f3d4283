import numpy as np
import pytest

from mvinterp.approx import runge10
from mvinterp.dual import (DegenerateInputError, dual_decompose, gepp_echelon, sample_torus,
                           torus_canonical_coefficients, torus_level_set, torus_reference,
                           variety_fit)
from mvinterp.multiindex import build_complete_set
from mvinterp.newton import NewtonPolynomial, eval_newton_batch
from mvinterp.nodes import default_nodes
from mvinterp.transform import TransformSet, vandermonde


def canonical(dec, vec):
    T = TransformSet.build(dec.reference)
    return T.NC @ T.LN @ vec


def normalized(v):
    return v / v[np.argmax(np.abs(v))]


def test_reference_nodes_give_full_rank():
    A = build_complete_set(2, 4, 2)
    ref = default_nodes(A)
    d = dual_decompose(A, ref, ref.points)
    assert d.k == len(A) and d.kernel_dimension == 0
    # with R = I every interpolation basis vector is a unit vector
    np.testing.assert_allclose(np.sort(np.abs(d.interp_basis).sum(axis=0)), 1.0, atol=1e-12)
    np.testing.assert_allclose(d.R[d.p0_rows] @ d.interp_basis, np.eye(d.k), atol=1e-12)


def test_points_on_a_line():
    A = build_complete_set(2, 1, 1)
    d = dual_decompose(A, default_nodes(A), [(0, 0), (0.5, 0), (1, 0)])
    assert d.k == 2 and d.kernel_dimension == 1
    # the kernel polynomial is a multiple of y
    c = normalized(canonical(d, d.kernel_basis[:, 0]))
    np.testing.assert_allclose(c, [0, 0, 1], atol=1e-12)


@pytest.mark.parametrize("m,c", [(2, 0.3), (3, -0.4)])
def test_hyperplane_kernel(m, c):
    A = build_complete_set(m, 1, 1)
    rng = np.random.default_rng(m)
    X = rng.uniform(-1, 1, (3 * m, m))
    X[:, -1] = c
    d = dual_decompose(A, default_nodes(A), X)
    assert d.kernel_dimension == 1
    expect = np.zeros(len(A))
    expect[0] = -c
    expect[A.position((0,) * (m - 1) + (1,))] = 1.0
    np.testing.assert_allclose(normalized(canonical(d, d.kernel_basis[:, 0])), normalized(expect),
                               atol=1e-10)


@pytest.mark.parametrize("count", [1, 5, 17, 30])
def test_fewer_nodes_than_basis(count):
    A = build_complete_set(2, 6, 2)
    X = np.random.default_rng(count).uniform(-1, 1, (count, 2))
    d = dual_decompose(A, default_nodes(A), X)
    assert d.k == count
    assert d.kernel_dimension == len(A) - count
    s = np.linalg.svd(d.R, compute_uv=False)
    assert np.sum(s > 1e-10 * s[0]) == d.k


@pytest.mark.parametrize("n,seed", [(4, 0), (6, 1), (8, 2)])
def test_invariants_on_torus(n, seed):
    A = build_complete_set(3, n, 2)
    ref = torus_reference(A)
    X = sample_torus(int(1.5 * len(A)), np.random.default_rng(seed))
    d = dual_decompose(A, ref, X)
    assert d.k + d.kernel_dimension == len(A)
    np.testing.assert_allclose(np.abs(d.kernel_basis).max(axis=0), 1.0)
    assert np.abs(d.R @ d.kernel_basis).max() <= 1e-10
    np.testing.assert_allclose(d.R[d.p0_rows] @ d.interp_basis, np.eye(d.k), atol=1e-8)
    again = dual_decompose(A, ref, d.P0)
    assert again.k == d.k
    assert sorted(again.p0_rows.tolist()) == list(range(d.k))


def test_torus_level_set_recovered():
    A = build_complete_set(3, 4, 2)
    ref = torus_reference(A)
    X = sample_torus(int(1.5 * len(A)), np.random.default_rng(0))
    assert np.abs(torus_level_set(X)).max() < 1e-14
    d = dual_decompose(A, ref, X)
    assert d.kernel_dimension == 1
    got = normalized(canonical(d, d.kernel_basis[:, 0]))
    np.testing.assert_allclose(got, normalized(torus_canonical_coefficients(A)), atol=1e-6)
    # the kernel polynomial is the level-set function up to scale, pointwise
    Q = NewtonPolynomial(A, ref.gp, d.LN @ d.kernel_basis[:, 0])
    ys = np.random.default_rng(1).uniform(-1, 1, (100, 3))
    v, w = eval_newton_batch(Q, ys), torus_level_set(ys)
    scale = v[np.argmax(np.abs(w))] / w[np.argmax(np.abs(w))]
    assert np.abs(v / scale - w).max() <= 1e-10


def test_torus_canonical_coefficients():
    A = build_complete_set(3, 4, 2)
    c = torus_canonical_coefficients(A)
    pts = np.random.default_rng(3).uniform(-1, 1, (20, 3))
    W = np.ones((20, len(A)))
    for i in range(3):
        W *= pts[:, i][:, None] ** A.indices[:, i][None, :]
    np.testing.assert_allclose(W @ c, torus_level_set(pts), atol=1e-13)
    with pytest.raises(ValueError):
        torus_canonical_coefficients(build_complete_set(3, 3, 2))


def test_variety_fit_polynomial_restriction():
    A = build_complete_set(3, 5, 2)
    ref = torus_reference(A)
    rng = np.random.default_rng(5)
    Q = NewtonPolynomial(A, ref.gp, rng.standard_normal(len(A)) * 0.1)
    X = sample_torus(int(1.5 * len(A)), rng)
    fit = variety_fit(A, ref, X, eval_newton_batch(Q, X))
    assert fit.residual_max <= 1e-9
    Y = sample_torus(200, rng)
    q = eval_newton_batch(Q, Y)
    assert np.abs(fit(Y) - q).max() <= 1e-9 * max(1.0, np.abs(q).max())


def test_variety_fit_runge_improves():
    errs = []
    for n in (3, 5, 7):
        rng = np.random.default_rng([0, n])
        A = build_complete_set(3, n, 2)
        X = sample_torus(int(1.5 * len(A)), rng)
        fit = variety_fit(A, torus_reference(A), X, runge10(X))
        Y = sample_torus(200, rng)
        errs.append(np.abs(fit(Y) - runge10(Y)).max())
    assert errs[0] > errs[1] > errs[2]


def test_degenerate_input():
    A = build_complete_set(1, 2, 1)
    ref = default_nodes(A)
    with pytest.raises(DegenerateInputError):
        dual_decompose(A, ref, np.zeros((0, 1)))


def test_gepp_echelon_rank():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((8, 3)) @ rng.standard_normal((3, 6))
    rows, cols, _ = gepp_echelon(M, 1e-10 * np.abs(M).max())
    assert rows.size == 3 and cols.size == 3
    A = build_complete_set(2, 2, 1)
    V = vandermonde(A, default_nodes(A))
    assert gepp_echelon(V, 1e-12)[0].size == len(A)
