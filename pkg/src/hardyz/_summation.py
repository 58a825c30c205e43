"""Compensated summation helpers.

Scalar sums go through :func:`math.fsum` (exactly rounded).  Sums that run
over an index ``n`` while being vectorised over a grid of ``t`` use
:class:`NeumaierAccumulator`, which carries a running compensation array.
"""

from __future__ import annotations

import math

import numpy as np


def fsum_complex(values) -> complex:
    """Exactly rounded sum of a complex sequence, real and imaginary parts separately."""
    arr = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


def fsum_real(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).ravel())


class NeumaierAccumulator:
    """Element-wise compensated running sum over arrays of a fixed shape."""

    def __init__(self, shape, dtype=float):
        self.total = np.zeros(shape, dtype=dtype)
        self._comp = np.zeros(shape, dtype=dtype)

    def add(self, term) -> None:
        if np.iscomplexobj(self.total):
            term = np.asarray(term, dtype=complex)
            self._add_real(term.real, self.total.real, self._comp.real)
            self._add_real(term.imag, self.total.imag, self._comp.imag)
        else:
            self._add_real(np.asarray(term, dtype=float), self.total, self._comp)

    @staticmethod
    def _add_real(term, total, comp) -> None:
        s = total + term
        big = np.abs(total) >= np.abs(term)
        # lost low-order bits of whichever operand was smaller
        comp += np.where(big, (total - s) + term, (term - s) + total)
        total[...] = s

    def result(self):
        return self.total + self._comp
