"""Adomian polynomials by truncated series composition.

``A_j`` is the t^j coefficient of ``N(u0 + t u1 + t^2 u2 + ...)``.  Given the
jet of N in u about ``u0`` the composition is a Horner sweep in truncated
t-series arithmetic, batched over sample points.
"""

import numpy as np

from . import kernels
from .jet import Jet


class AdomianOrderError(ValueError):
    pass


def adomian_polys(n_jet, u_values):
    """Return ``[A_0, ..., A_k]`` for ``u_values = [u^(0), ..., u^(k)]``.

    ``n_jet`` is the jet of N in u about ``u_values[0]`` (a :class:`Jet` or a
    bare coefficient array) of order at least k.  Trailing batch dimensions of
    the jet and the values broadcast together.
    """
    coeffs = n_jet.coeffs if isinstance(n_jet, Jet) else np.asarray(n_jet, dtype=float)
    u = np.asarray(u_values, dtype=float)
    k = u.shape[0] - 1
    if coeffs.shape[0] - 1 < k:
        raise AdomianOrderError(
            f"jet of order {coeffs.shape[0] - 1} cannot produce A_{k}; need order >= {k}"
        )
    batch = np.broadcast_shapes(coeffs.shape[1:], u.shape[1:])
    nc = np.broadcast_to(coeffs[: k + 1], (k + 1,) + batch).reshape(k + 1, -1)
    du = np.broadcast_to(u, (k + 1,) + batch).reshape(k + 1, -1)
    out = kernels.series_compose(np.ascontiguousarray(nc), np.ascontiguousarray(du), k)
    return out.reshape((k + 1,) + batch)


def adomian_tail(n_jet, u_values):
    """``A_{j+1}(N; u^(0), ..., u^(j), 0)`` for ``u_values`` of length j+1."""
    u = np.asarray(u_values, dtype=float)
    ext = np.concatenate([u, np.zeros((1,) + u.shape[1:])], axis=0)
    return adomian_polys(n_jet, ext)[-1]
