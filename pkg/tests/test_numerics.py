import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fig_params
from oracles import integrate_lyapunov, random_stable
from optocluster import numerics
from optocluster.errors import DefinitenessError, NumericalError, ShapeError, StabilityError
from optocluster.graphs import make_graph
from optocluster.model import cluster_bogoliubov
from optocluster.numerics import _sylvester_py
from optocluster.steady_state import drift_matrix

BACKENDS = numerics.available_backends()


def residual_bound(m, c, q):
    return numerics.RESIDUAL_RTOL * (np.linalg.norm(m) * np.linalg.norm(c) + np.linalg.norm(q))


def test_python_backend_always_present():
    assert "python" in BACKENDS
    assert numerics.BACKEND in BACKENDS


def test_scalar_example():
    kappa = 3.0
    c = numerics.solve_lyapunov([[-kappa / 2]], [[kappa]])
    assert c.shape == (1, 1)
    assert c[0, 0] == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("method", ["schur", "kron"])
def test_negative_identity(method, rng):
    s = rng.normal(size=(5, 5))
    s = s + s.T
    c = numerics.solve_lyapunov(-np.eye(5), s, method=method)
    assert np.allclose(c, s / 2, rtol=1e-14, atol=1e-14)


def test_random_six_against_time_integration(rng):
    m = random_stable(rng, 6)
    q = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    c = numerics.solve_lyapunov(m, q)
    ref = integrate_lyapunov(m, q)
    assert np.linalg.norm(c - ref) <= 1e-6 * np.linalg.norm(ref)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("size", [4, 8, 16, 40, 80])
def test_residual_bound_random(backend, size, rng):
    m = random_stable(rng, size, margin=0.1)
    q = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    c = numerics.solve_lyapunov(m, q, backend=backend)
    assert numerics.lyapunov_residual(m, c, q) <= residual_bound(m, c, q)


@pytest.mark.parametrize("size", [4, 12, 24])
def test_methods_and_backends_agree(size, rng):
    m = random_stable(rng, size)
    q = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    ref = numerics.solve_lyapunov(m, q, method="kron")
    for backend in BACKENDS:
        c = numerics.solve_lyapunov(m, q, backend=backend)
        assert np.linalg.norm(c - ref) <= 1e-11 * np.linalg.norm(ref)


@pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernel not built")
def test_compiled_kernel_matches_fallback(rng):
    from optocluster.numerics import _sylvester

    t = np.triu(rng.normal(size=(30, 30)) + 1j * rng.normal(size=(30, 30)))
    t[np.diag_indices(30)] -= 8.0
    f = rng.normal(size=(30, 30)) + 1j * rng.normal(size=(30, 30))
    y1 = np.asarray(_sylvester.solve_triangular_sylvester(t, f))
    y2 = _sylvester_py.solve_triangular_sylvester(t, f)
    assert np.allclose(y1, y2, rtol=1e-13, atol=1e-13)
    assert np.allclose(t @ y1 + y1 @ t.T, f, rtol=1e-12, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 20), seed=st.integers(0, 2**32 - 1))
def test_symmetry_propagation(n, seed):
    rng = np.random.default_rng(seed)
    m = random_stable(rng, n, margin=0.2)
    q = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q = q + q.T
    c = numerics.solve_lyapunov(m, q)
    assert np.linalg.norm(c - c.T) <= 1e-11 * np.linalg.norm(c)


def test_drift_matrix_solution_has_bounded_residual():
    p = fig_params(10)
    m = drift_matrix(p, cluster_bogoliubov(make_graph("complete", 10), p.r))
    q = np.eye(40, dtype=complex)
    c = numerics.solve_lyapunov(m, q)
    assert numerics.lyapunov_residual(m, c, q) <= residual_bound(m, c, q)


def test_unstable_rejected():
    with pytest.raises(StabilityError):
        numerics.solve_lyapunov(np.diag([-1.0, 0.5]), np.eye(2))


def test_marginal_rejected():
    with pytest.raises(StabilityError):
        numerics.solve_lyapunov([[0.0, 1.0], [-1.0, 0.0]], np.eye(2))


def test_unchecked_singular_system_raises():
    # eigenvalues +1 and -1 sum to zero: the Sylvester operator is singular
    with pytest.raises(NumericalError):
        numerics.solve_lyapunov(np.diag([1.0, -1.0]), np.ones((2, 2)), check=False)


def test_bad_arguments():
    with pytest.raises(ShapeError):
        numerics.solve_lyapunov(np.eye(2), np.eye(3))
    with pytest.raises(ShapeError):
        numerics.solve_lyapunov(np.zeros((2, 3)), np.eye(2))
    with pytest.raises(ValueError):
        numerics.solve_lyapunov(-np.eye(2), np.eye(2), method="lu")
    with pytest.raises(ValueError):
        numerics.solve_lyapunov(-np.eye(2), np.eye(2), backend="fortran")


def test_spectral_abscissa_examples():
    assert numerics.spectral_abscissa(np.diag([-1.0, -2.0])) == pytest.approx(-1.0)
    assert numerics.spectral_abscissa([[0.0, 1.0], [-1.0, 0.0]]) == pytest.approx(0.0, abs=1e-15)


def test_spectral_abscissa_drift_regression():
    # frozen from an eigen-decomposition of the N=4 linear drift at gamma = 5e-6 kappa
    p = fig_params(4)
    m = drift_matrix(p, cluster_bogoliubov(make_graph("linear", 4), p.r))
    ref = np.max(np.linalg.eigvals(m).real)
    val = numerics.spectral_abscissa(m)
    assert val < 0
    assert val == pytest.approx(ref, rel=1e-9)


def test_logdet_examples():
    assert numerics.logdet_posdef(2 * np.eye(6)) == pytest.approx(6 * math.log(2), rel=1e-15)
    d = np.array([0.5, 3.0, 7.0])
    assert numerics.logdet_posdef(np.diag(d)) == pytest.approx(np.sum(np.log(d)), rel=1e-15)


def test_logdet_random_spd_against_eigenvalues(rng):
    g = rng.normal(size=(20, 20))
    a = g @ g.T + 1e-3 * np.eye(20)
    ref = np.sum(np.log(np.linalg.eigvalsh(a)))
    assert numerics.logdet_posdef(a) == pytest.approx(ref, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 12), alpha=st.floats(1e-3, 1e3), seed=st.integers(0, 2**32 - 1))
def test_logdet_scaling(n, alpha, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, n))
    v = g @ g.T + np.eye(n)
    lhs = numerics.logdet_posdef(alpha * v)
    rhs = n * math.log(alpha) + numerics.logdet_posdef(v)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_logdet_errors():
    with pytest.raises(DefinitenessError):
        numerics.logdet_posdef(np.diag([1.0, -1.0]))
    with pytest.raises(ShapeError):
        numerics.logdet_posdef([[1.0, 2.0], [0.0, 1.0]])
