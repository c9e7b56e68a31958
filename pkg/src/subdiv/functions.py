"""Test functions: real exponential polynomials, tabulated data, plain callables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .sequence import RefinableSequence

__all__ = [
    "Poly", "Cos", "Sin", "Cosh", "Sinh", "Term",
    "ExpPoly", "Tabulated", "Expression", "FunctionSpec", "sample",
]


@dataclass(frozen=True)
class Poly:
    power: int = 0

    def __post_init__(self):
        if int(self.power) != self.power or self.power < 0:
            raise ValueError(f"Poly power must be a nonnegative integer, got {self.power!r}")

    def __call__(self, t, phase=0.0):
        return (t + phase) ** int(self.power)


@dataclass(frozen=True)
class _Periodic:
    freq: float

    def __post_init__(self):
        if not self.freq > 0:
            raise ValueError(f"{type(self).__name__} frequency must be positive, got {self.freq!r}")


class Cos(_Periodic):
    def __call__(self, t, phase=0.0):
        return np.cos(self.freq * t + phase)


class Sin(_Periodic):
    def __call__(self, t, phase=0.0):
        return np.sin(self.freq * t + phase)


@dataclass(frozen=True)
class _Hyperbolic:
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"{type(self).__name__} rate must be positive, got {self.rate!r}")


class Cosh(_Hyperbolic):
    def __call__(self, t, phase=0.0):
        return np.cosh(self.rate * t + phase)


class Sinh(_Hyperbolic):
    def __call__(self, t, phase=0.0):
        return np.sinh(self.rate * t + phase)


Basis = Union[Poly, Cos, Sin, Cosh, Sinh]


@dataclass(frozen=True)
class Term:
    """``coefficient * basis(t)`` with the phase added to the basis argument."""

    basis: Basis
    coefficient: float = 1.0
    phase: float = 0.0


@dataclass(frozen=True)
class ExpPoly:
    """Finite sum of :class:`Term` objects.

    Example:
        >>> F = ExpPoly([Term(Poly(2)), Term(Poly(1), -3.0), Term(Poly(0))])
        >>> F(2.0)
        -1.0
    """

    terms: Sequence[Term] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros_like(t)
        for term in self.terms:
            out = out + term.coefficient * term.basis(t, term.phase)
        return out


@dataclass(frozen=True)
class Tabulated:
    """Values known only at given abscissae."""

    abscissae: Sequence[float]
    ordinates: Sequence[float]

    def __post_init__(self):
        x = np.asarray(self.abscissae, dtype=np.float64)
        y = np.asarray(self.ordinates, dtype=np.float64)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("abscissae and ordinates must be 1-D of equal length")
        object.__setattr__(self, "abscissae", x)
        object.__setattr__(self, "ordinates", y)

    def __call__(self, t, *, rtol=1e-12):
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        scale = max(1.0, float(np.max(np.abs(self.abscissae))))
        idx = np.searchsorted(self.abscissae, t)
        out = np.empty_like(t)
        for k, (ti, j) in enumerate(zip(t, idx)):
            hits = [m for m in (j - 1, j) if 0 <= m < len(self.abscissae)
                    and abs(self.abscissae[m] - ti) <= rtol * scale]
            if not hits:
                raise ValueError(f"no tabulated value at t={ti!r}")
            out[k] = self.ordinates[hits[0]]
        return out


@dataclass(frozen=True)
class Expression:
    """Any vectorised callable, for test functions outside the exponential polynomials."""

    func: Callable
    name: str = "expression"

    def __call__(self, t):
        return np.asarray(self.func(np.asarray(t, dtype=np.float64)), dtype=np.float64)


FunctionSpec = Union[ExpPoly, Tabulated, Expression]


def sample(func: FunctionSpec, h: float, index_range: tuple[int, int], *,
           periodic: bool = False) -> RefinableSequence:
    """Samples ``F(i h)`` for ``i`` in the closed range ``index_range``.

    Example:
        >>> sample(ExpPoly([Term(Poly(2))]), 1.0, (0, 3)).values.tolist()
        [0.0, 1.0, 4.0, 9.0]
    """
    lo, hi = (int(i) for i in index_range)
    if hi < lo:
        raise ValueError(f"empty index range {index_range!r}")
    if not h > 0:
        raise ValueError(f"h must be positive, got {h!r}")
    t = np.arange(lo, hi + 1, dtype=np.float64) * h
    values = func(t)
    make = RefinableSequence.periodic if periodic else RefinableSequence.open
    return make(values, base_step=h, left_index=lo)
