"""Truncated Taylor arithmetic for radial functions.

A :class:`Jet` stores Taylor coefficients ``c[k] = f^{(k)}(x0)/k!`` up to a
fixed order, optionally for many base points at once (trailing axis).
"""

from __future__ import annotations

from math import factorial

import numpy as np


class Jet:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    # constructors ------------------------------------------------------
    @classmethod
    def variable(cls, x0, order: int) -> "Jet":
        x0 = np.asarray(x0, float)
        c = np.zeros((order + 1,) + x0.shape)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int, shape=()) -> "Jet":
        c = np.zeros((order + 1,) + np.broadcast_shapes(np.shape(value), tuple(shape)))
        c[0] = value
        return cls(c)

    @classmethod
    def from_derivatives(cls, derivs) -> "Jet":
        d = np.asarray(derivs, float)
        fact = np.array([factorial(k) for k in range(d.shape[0])], float)
        return cls(d / fact.reshape((-1,) + (1,) * (d.ndim - 1)))

    # accessors ---------------------------------------------------------
    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def derivatives(self) -> np.ndarray:
        fact = np.array([factorial(k) for k in range(self.order + 1)], float)
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    # arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        c = np.zeros_like(self.c)
        c[0] = other
        return Jet(c)

    def __add__(self, other):
        return Jet(self.c + self._coerce(other).c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return Jet(self.c - self._coerce(other).c)

    def __rsub__(self, other):
        return Jet(self._coerce(other).c - self.c)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other)
        n = self.order
        out = np.zeros(np.broadcast_shapes(self.c.shape, other.c.shape))
        for i in range(n + 1):
            for j in range(n + 1 - i):
                out[i + j] += self.c[i] * other.c[j]
        return Jet(out)

    __rmul__ = __mul__

    def compose(self, outer_derivs) -> "Jet":
        """g(self) given ``outer_derivs[k] = g^{(k)}(self.value)``."""
        n = self.order
        d = self.c.copy()
        d[0] = 0.0
        shift = Jet(d)
        power = Jet.constant(1.0, n, self.c.shape[1:])
        out = Jet(np.zeros_like(self.c))
        for k in range(n + 1):
            out = out + power * (np.asarray(outer_derivs[k], float) / factorial(k))
            power = power * shift
        return out

    def sqrt(self) -> "Jet":
        x = self.value
        derivs = [np.sqrt(x)]
        coef = 0.5
        for k in range(1, self.order + 1):
            derivs.append(coef * x ** (0.5 - k))
            coef *= 0.5 - k
        return self.compose(derivs)
