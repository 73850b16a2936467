import numpy as np
import pytest
from hypothesis import given, strategies as st

import exitdecay as ed
from exitdecay.errors import NumericalError, ValidationError

times = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)
alphas = st.floats(min_value=0.05, max_value=1.95)


def test_brownian_kernel_is_min():
    spec = ed.KernelSpec(alpha=1.0)
    assert ed.eval_kernel(spec, 0.5, 1.0) == pytest.approx(0.5, abs=0)
    rng = np.random.default_rng(0)
    t, s = rng.uniform(0, 5, 100), rng.uniform(0, 5, 100)
    np.testing.assert_allclose(ed.eval_kernel(spec, t, s), np.minimum(t, s), rtol=0, atol=1e-15)


def test_diagonal_is_power_law():
    for alpha in (0.4, 0.8, 1.0, 1.2, 1.6):
        spec = ed.KernelSpec(alpha=alpha)
        for t in (0.0, 0.3, 1.0, 2.5):
            assert ed.eval_kernel(spec, t, t) == pytest.approx(t**alpha, rel=1e-15)
    assert ed.eval_kernel(ed.KernelSpec(alpha=0.7), 0.0, 0.0) == 0.0


def test_fractional_value_frozen():
    # (1 + 2 - sqrt(3)) / 2, evaluated in arbitrary precision
    got = ed.eval_kernel(ed.KernelSpec(alpha=0.5), 1.0, 4.0)
    assert got == pytest.approx(0.63397459621556135, rel=1e-14)


@given(t=times, s=times, alpha=alphas)
def test_symmetry(t, s, alpha):
    spec = ed.KernelSpec(alpha=alpha)
    assert ed.eval_kernel(spec, t, s) == ed.eval_kernel(spec, s, t)


def test_diagonal_strictly_increasing():
    ts = np.linspace(0.01, 3.0, 50)
    for alpha in (0.4, 1.0, 1.6):
        diag = ed.eval_kernel(ed.KernelSpec(alpha=alpha), ts, ts)
        assert np.all(np.diff(diag) > 0)


def test_invalid_alpha_rejected():
    for alpha in (0.0, -0.5, 2.0, 2.5):
        with pytest.raises(ValidationError):
            ed.KernelSpec(alpha=alpha)
    with pytest.raises(ValidationError):
        ed.KernelSpec(alpha=1.0, family="matern")


def test_gram_brownian_example():
    grid = ed.TimeGrid(1.0, [0.5, 1.0])
    G = ed.gram(ed.KernelSpec(alpha=1.0), grid)
    np.testing.assert_allclose(G, [[0.5, 0.5], [0.5, 1.0]], atol=0)


def test_gram_single_point_is_diagonal_value():
    for alpha in (0.6, 1.3):
        G = ed.gram(ed.KernelSpec(alpha=alpha), ed.TimeGrid(2.0, [1.7]))
        assert G.shape == (1, 1)
        assert G[0, 0] == pytest.approx(1.7**alpha, rel=1e-15)


def test_gram_psd_on_random_grids():
    rng = np.random.default_rng(42)
    for alpha in (0.4, 0.8, 1.0, 1.2, 1.6):
        spec = ed.KernelSpec(alpha=alpha)
        for size in (2, 5, 13, 20, 50):
            pts = np.sort(rng.uniform(0.01, 1.0, size))
            pts = np.unique(pts)
            G = ed.gram(spec, ed.TimeGrid(1.0, pts))
            eig = np.linalg.eigvalsh(G)
            assert eig.min() >= -1e-10 * eig.max()


def test_factor_identity():
    L = ed.factor_psd(np.eye(4))
    np.testing.assert_allclose(L, np.eye(4), atol=1e-14)


def test_factor_reconstruction():
    G = np.array([[0.5, 0.5], [0.5, 1.0]])
    L = ed.factor_psd(G)
    assert np.tril(L, -1).shape == L.shape  # lower triangular by construction
    assert np.abs(np.triu(L, 1)).max() == 0.0
    assert np.abs(L @ L.T - G).max() <= 1e-12


def test_factor_rank_deficient_succeeds_via_jitter():
    G = np.array([[1.0, 1.0], [1.0, 1.0]])
    L = ed.factor_psd(G)
    assert np.abs(L @ L.T - G).max() <= 1e-8


def test_factor_failure_reports_jitter():
    G = np.array([[1.0, 0.0], [0.0, -1.0]])  # indefinite beyond any ladder step
    with pytest.raises(NumericalError, match="jitter"):
        ed.factor_psd(G)
    with pytest.raises(ValidationError):
        ed.factor_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_grid_validation():
    with pytest.raises(ValidationError):
        ed.TimeGrid(1.0, [])
    with pytest.raises(ValidationError):
        ed.TimeGrid(1.0, [0.2, 0.2])
    with pytest.raises(ValidationError):
        ed.TimeGrid(1.0, [0.5, 1.5])
    with pytest.raises(ValidationError):
        ed.TimeGrid(-1.0, [0.5])
    grid = ed.TimeGrid.uniform(2.0, 4)
    np.testing.assert_allclose(grid.points, [0.5, 1.0, 1.5, 2.0])
    assert len(grid) == 4
    # simulation-style grids may include zero
    ed.TimeGrid(1.0, [0.0, 0.5, 1.0])
