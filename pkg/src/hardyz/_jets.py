"""Truncated Taylor series ("jets") for exact derivatives of composed functions.

A jet of order K is an array ``c`` of shape ``(K + 1, ...)`` holding
``c[k] = f^{(k)}(x0) / k!``.  Trailing axes broadcast, so many expansion
points are handled at once.
"""

from __future__ import annotations

import math

import numpy as np


def variable(x0, order: int) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    c = np.zeros((order + 1,) + x0.shape)
    c[0] = x0
    if order >= 1:
        c[1] = 1.0
    return c


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for k in range(out.shape[0]):
        for j in range(k + 1):
            out[k] += a[j] * b[k - j]
    return out


def reciprocal(a: np.ndarray) -> np.ndarray:
    q = np.zeros_like(a)
    q[0] = 1.0 / a[0]
    for k in range(1, a.shape[0]):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc += a[j] * q[k - j]
        q[k] = -acc * q[0]
    return q


def exp(a: np.ndarray) -> np.ndarray:
    e = np.zeros_like(a)
    e[0] = np.exp(a[0])
    for k in range(1, a.shape[0]):
        acc = np.zeros_like(a[0])
        for j in range(1, k + 1):
            acc += j * a[j] * e[k - j]
        e[k] = acc / k
    return e


def log(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for k in range(1, a.shape[0]):
        acc = np.zeros_like(a[0])
        for j in range(1, k):
            acc += j * out[j] * a[k - j]
        out[k] = (a[k] - acc / k) / a[0]
    return out


def power(a: np.ndarray, alpha: float) -> np.ndarray:
    return exp(alpha * log(a))


def derivatives(c: np.ndarray) -> np.ndarray:
    """Convert Taylor coefficients to derivatives ``f^{(k)}(x0)``."""
    fact = np.array([math.factorial(k) for k in range(c.shape[0])], dtype=float)
    return c * fact.reshape((-1,) + (1,) * (c.ndim - 1))
