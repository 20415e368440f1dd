"""The compiled and numpy kernels must agree bit for bit."""

import numpy as np
import pytest

from fdmethod import kernels
from fdmethod.kernels import _pykernels

try:
    from fdmethod.kernels import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def _series(rng, K=6, n=50, positive=False):
    a = rng.normal(size=(K + 1, n))
    if positive:
        a[0] = np.abs(a[0]) + 0.5
    return np.ascontiguousarray(a)


@needs_c
@pytest.mark.parametrize("name", ["series_exp", "series_log", "series_sqrt"])
def test_unary_kernels_identical(rng, name):
    a = _series(rng, positive=True)
    c0 = {"series_exp": np.exp, "series_log": np.log, "series_sqrt": np.sqrt}[name](a[0])
    np.testing.assert_array_equal(getattr(_pykernels, name)(a, c0), getattr(_ckernels, name)(a, c0))


@needs_c
def test_binary_and_composition_kernels_identical(rng):
    a, b = _series(rng), _series(rng, positive=True)
    np.testing.assert_array_equal(_pykernels.series_mul(a, b), _ckernels.series_mul(a, b))
    c0 = a[0] / b[0]
    np.testing.assert_array_equal(_pykernels.series_div(a, b, c0), _ckernels.series_div(a, b, c0))
    s0, k0 = np.sin(a[0]), np.cos(a[0])
    for x, y in zip(_pykernels.series_sincos(a, s0, k0), _ckernels.series_sincos(a, s0, k0)):
        np.testing.assert_array_equal(x, y)
    for k in range(0, 7):
        np.testing.assert_array_equal(
            _pykernels.series_compose(a[: k + 1], b[: k + 1], k), _ckernels.series_compose(a[: k + 1], b[: k + 1], k)
        )


@needs_c
@pytest.mark.parametrize("S", [2, 4, 32])
def test_cumulative_simpson_identical(rng, S):
    g = np.ascontiguousarray(rng.normal(size=(7, S + 1)))
    np.testing.assert_array_equal(_pykernels.cumulative_simpson(g, 0.1), _ckernels.cumulative_simpson(g, 0.1))


@needs_c
def test_read_only_inputs_accepted():
    a = np.ones((3, 4))
    a.setflags(write=False)
    assert _ckernels.series_mul(a, a).shape == (3, 4)


def test_cumulative_simpson_exact_for_cubics():
    S, d = 8, 0.125
    t = np.arange(S + 1) * d
    g = np.ascontiguousarray((1 + 2 * t - 3 * t**2 + 4 * t**3)[None, :])
    exact = t + t**2 - t**3 + t**4
    for mod in [_pykernels] + ([_ckernels] if _ckernels is not None else []):
        np.testing.assert_allclose(mod.cumulative_simpson(g, d)[0], exact, rtol=0, atol=1e-14)


def test_set_backend(backend):
    assert kernels.BACKEND == backend
    mod = _pykernels if backend == "python" else _ckernels
    assert kernels.series_mul is mod.series_mul
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")


def test_backends_produce_identical_solutions(backend):
    from fdmethod.fdcore import Problem, fd_solve
    from fdmethod.mesh import uniform_grid

    p = Problem(N="-(1+u^2)", phi="cos(x)+sin(x)+sin(x)^3", x0=0, u0=0, x_end=4)
    sol = fd_solve(p, uniform_grid(0, 1 / 3, 12), 3)
    kernels.set_backend("python")
    ref = fd_solve(p, uniform_grid(0, 1 / 3, 12), 3)
    np.testing.assert_array_equal(sol.approximation.values, ref.approximation.values)
