"""Finitely supported KP time vectors and the matrix series ``g(W) = sum t_i W^i``."""

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .linalg import as_matrix

DEFAULT_MAX_INDEX = 16


@dataclass(frozen=True)
class TimeVector:
    """Sparse map ``i -> t_i`` (``i >= 1``) of complex KP times.

    Zero entries are dropped, so two vectors compare equal iff they have the
    same support and values.
    """

    entries: tuple = ()
    max_index: int = DEFAULT_MAX_INDEX

    def __init__(self, times: Mapping[int, complex] | None = None, max_index: int = DEFAULT_MAX_INDEX):
        if max_index < 1:
            raise ValueError("max_index must be >= 1")
        items = []
        for i, v in sorted((times or {}).items()):
            i = int(i)
            v = complex(v)
            if i < 1 or i > max_index:
                raise ValueError(f"time index {i} outside 1..{max_index}")
            if not np.isfinite(v.real) or not np.isfinite(v.imag):
                raise ValueError(f"time t_{i} is not finite")
            if v != 0:
                items.append((i, v))
        object.__setattr__(self, "entries", tuple(items))
        object.__setattr__(self, "max_index", int(max_index))

    @classmethod
    def of(cls, *values, max_index=DEFAULT_MAX_INDEX):
        """``TimeVector.of(t1, t2, ...)`` from a dense prefix."""
        return cls({i + 1: v for i, v in enumerate(values)}, max_index=max(max_index, len(values)))

    @classmethod
    def xyt(cls, x, y=0.0, t=0.0):
        """The ``(t1, t2, t3) = (x, y, t)`` slice used for the KP equation."""
        return cls({1: x, 2: y, 3: t})

    @classmethod
    def miwa(cls, a, order):
        """Truncated Miwa vector ``[a] = (a, a^2/2, ..., a^order/order)``."""
        a = complex(a)
        return cls({i: a**i / i for i in range(1, order + 1)}, max_index=max(order, DEFAULT_MAX_INDEX))

    def __getitem__(self, i):
        return dict(self.entries).get(i, 0.0j)

    def as_dict(self):
        return dict(self.entries)

    @property
    def support(self):
        return tuple(i for i, _ in self.entries)

    @property
    def degree(self):
        return self.entries[-1][0] if self.entries else 0

    def is_zero(self):
        return not self.entries

    def replace(self, **updates):
        """Copy with ``t_i`` overridden, e.g. ``tv.replace(t2=0)``."""
        d = self.as_dict()
        for key, value in updates.items():
            d[int(key.lstrip("t"))] = value
        return TimeVector(d, self.max_index)

    def _combine(self, other, sign):
        d = self.as_dict()
        for i, v in other.entries:
            d[i] = d.get(i, 0) + sign * v
        return TimeVector(d, max(self.max_index, other.max_index))

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)


def g_eval(w, t: TimeVector):
    """``sum_i t_i W^i`` by Horner accumulation over the support of ``t``."""
    w = as_matrix(w)
    n = w.shape[0]
    acc = np.zeros((n, n), dtype=np.complex128)
    if t.is_zero():
        return acc
    ident = np.eye(n, dtype=np.complex128)
    for i in range(t.degree, 0, -1):
        acc = acc @ w if i < t.degree else acc
        acc = acc + t[i] * ident
    return acc @ w


def g_scalar(z, t: TimeVector):
    z = complex(z)
    return sum(v * z**i for i, v in t.entries)
