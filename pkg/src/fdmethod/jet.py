"""Truncated Taylor series ("jets") with batched coefficients."""

from __future__ import annotations

import math

import numpy as np

from . import kernels


def _flat(c):
    return np.ascontiguousarray(c.reshape(c.shape[0], -1), dtype=float)


def broadcast_coeffs(c, batch):
    """Broadcast coefficients ``(K+1, *b)`` to ``(K+1, *batch)``, aligning the
    batch dimensions on the right."""
    pad = len(batch) - (c.ndim - 1)
    c = c.reshape((c.shape[0],) + (1,) * pad + c.shape[1:])
    return np.broadcast_to(c, (c.shape[0],) + batch)


class Jet:
    """Truncated power series c_0 + c_1 d + ... + c_K d^K.

    ``coeffs`` has shape ``(K+1, *batch)``; every arithmetic operation acts
    elementwise over the batch and truncates at order K.  Instances are treated
    as immutable.
    """

    __slots__ = ("coeffs",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim == 0:
            coeffs = coeffs.reshape(1)
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value, order):
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, value, order):
        """The jet of the identity map about ``value``."""
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    @property
    def value(self):
        return self.coeffs[0]

    def derivative(self, p):
        """p-th derivative with respect to the expansion variable."""
        return math.factorial(p) * self.coeffs[p]

    def __repr__(self):
        return f"Jet(order={self.order}, coeffs={self.coeffs!r})"

    # arithmetic -------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError(f"jet order mismatch: {self.order} vs {other.order}")
            return other
        return Jet.constant(other, self.order)

    def _pair(self, other):
        other = self._coerce(other)
        batch = np.broadcast_shapes(self.coeffs.shape[1:], other.coeffs.shape[1:])
        return broadcast_coeffs(self.coeffs, batch), broadcast_coeffs(other.coeffs, batch), batch

    def __add__(self, other):
        a, b, _ = self._pair(other)
        return Jet(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, _ = self._pair(other)
        return Jet(a - b)

    def __rsub__(self, other):
        a, b, _ = self._pair(other)
        return Jet(b - a)

    def __neg__(self):
        return Jet(-self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            batch = np.broadcast_shapes(self.coeffs.shape[1:], other.shape)
            return Jet(broadcast_coeffs(self.coeffs, batch) * other)
        a, b, batch = self._pair(other)
        if self.order == 0:
            return Jet(a * b)
        out = kernels.series_mul(_flat(a), _flat(b))
        return Jet(out.reshape((self.order + 1,) + batch))

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b, batch = self._pair(other)
        c0 = a[0] / b[0]
        if self.order == 0:
            return Jet(c0[None])
        out = kernels.series_div(_flat(a), _flat(b), c0.reshape(-1))
        return Jet(out.reshape((self.order + 1,) + batch))

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def powi(self, n):
        """Integer power by repeated squaring (exact series arithmetic)."""
        if n < 0:
            return 1.0 / self.powi(-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        if result is None:
            return Jet.constant(np.ones(self.coeffs.shape[1:]), self.order)
        return result

    # elementary functions ---------------------------------------------------

    def _unary(self, kernel, c0):
        if self.order == 0:
            return Jet(c0[None])
        batch = self.coeffs.shape[1:]
        out = kernel(_flat(self.coeffs), c0.reshape(-1))
        return Jet(out.reshape((self.order + 1,) + batch))

    def exp(self):
        return self._unary(kernels.series_exp, np.exp(self.coeffs[0]))

    def log(self):
        return self._unary(kernels.series_log, np.log(self.coeffs[0]))

    def sqrt(self):
        return self._unary(kernels.series_sqrt, np.sqrt(self.coeffs[0]))

    def _sincos(self):
        s0 = np.sin(self.coeffs[0])
        c0 = np.cos(self.coeffs[0])
        if self.order == 0:
            return Jet(s0[None]), Jet(c0[None])
        batch = self.coeffs.shape[1:]
        s, c = kernels.series_sincos(_flat(self.coeffs), s0.reshape(-1), c0.reshape(-1))
        shape = (self.order + 1,) + batch
        return Jet(s.reshape(shape)), Jet(c.reshape(shape))

    def sin(self):
        return self._sincos()[0]

    def cos(self):
        return self._sincos()[1]

    def abs(self):
        if self.order == 0:
            return Jet(np.abs(self.coeffs))
        return Jet(np.sign(self.coeffs[0]) * self.coeffs)

    def pow(self, exponent):
        """Real power via exp(exponent * log(self)); base must be positive."""
        return (self.log() * exponent).exp()
