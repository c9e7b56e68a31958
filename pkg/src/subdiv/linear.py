"""Linear interpolatory schemes, stationary and level dependent.

Contains the mask-based stationary rules (2-point and 4-point
Deslauriers-Dubuc), the 2-point and 4-point non-stationary schemes that
reproduce exponentials, the tension parameter ``phi`` and the annihilating
filters ("orthogonal rules") of exponential-polynomial spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .exceptions import IndeterminatePhiError, InsufficientDataError, InvalidSpaceError
from .sequence import (
    BoundaryPolicy,
    RefinableSequence,
    check_policy,
    refine_interpolatory,
)

__all__ = [
    "FrequencyParameter",
    "phi",
    "gamma_level_coefficient",
    "Mask",
    "T11",
    "T22",
    "refine_mask",
    "refine_T_gamma",
    "refine_2pt_nonstationary",
    "PolynomialFactor",
    "RealExpFactor",
    "ConjugatePairFactor",
    "OrthogonalRule",
    "orthogonal_rule",
    "annihilation_residual",
    "phi_from_samples",
]


@dataclass(frozen=True)
class FrequencyParameter:
    """Frequency ``gamma`` of the space span{1, exp(gamma t), exp(-gamma t)}.

    ``gamma`` is either zero, real (``kind="hyperbolic"``) or purely imaginary
    with modulus in (0, pi) (``kind="trigonometric"``). Only the modulus is
    stored; all arithmetic stays real.
    """

    kind: str = "zero"
    magnitude: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "hyperbolic", "trigonometric"):
            raise ValueError(f"unknown frequency kind {self.kind!r}")
        m = float(self.magnitude)
        object.__setattr__(self, "magnitude", m)
        if self.kind == "zero":
            if m != 0.0:
                raise ValueError("a zero frequency has magnitude 0")
        elif self.kind == "hyperbolic":
            if not (m > 0 and math.isfinite(m)):
                raise ValueError(f"hyperbolic magnitude must be positive, got {m}")
        elif not 0.0 < m < math.pi:
            raise ValueError(f"trigonometric magnitude must lie in (0, pi), got {m}")

    @classmethod
    def zero(cls):
        return cls("zero", 0.0)

    @classmethod
    def hyperbolic(cls, magnitude):
        return cls("hyperbolic", magnitude)

    @classmethod
    def trigonometric(cls, magnitude):
        return cls("trigonometric", magnitude)

    @classmethod
    def parse(cls, kind: str, magnitude: float = 0.0) -> "FrequencyParameter":
        """Build from the short CLI names ``zero``, ``hyper`` and ``trig``."""
        aliases = {"zero": "zero", "hyper": "hyperbolic", "hyperbolic": "hyperbolic",
                   "trig": "trigonometric", "trigonometric": "trigonometric"}
        try:
            kind = aliases[kind]
        except KeyError:
            raise ValueError(f"unknown frequency kind {kind!r}") from None
        if kind == "zero":
            return cls.zero()
        return cls(kind, magnitude)

    def scaled(self, step: float) -> "FrequencyParameter":
        """Frequency seen on a grid of spacing ``step`` (``gamma * step`` per index)."""
        if self.kind == "zero" or step == 1.0:
            return self
        return FrequencyParameter(self.kind, self.magnitude * step)


def phi(gamma: FrequencyParameter, k: int) -> float:
    """Tension parameter ``(exp(2^-k gamma) + exp(-2^-k gamma)) / 2``."""
    x = math.ldexp(gamma.magnitude, -k)
    if gamma.kind == "hyperbolic":
        return math.cosh(x)
    if gamma.kind == "trigonometric":
        return math.cos(x)
    return 1.0


def _gamma_closed_form(phi_k: float) -> float:
    return 0.5 / ((1.0 + math.sqrt(2.0 * (1.0 + phi_k))) ** 2 - 1.0)


def gamma_level_coefficient(gamma: FrequencyParameter, k: int) -> float:
    """Weight of the second difference in the level-``k`` 4-point rule.

    Computed as ``1 / (16 phi_{k+2}^2 phi_{k+1})`` and cross-checked against
    the expression in ``phi_k`` alone. The cross-check tolerance is 1e-13
    relative, widened by the conditioning of ``1 + phi_k`` when ``phi_k``
    approaches -1.
    """
    p1 = phi(gamma, k + 1)
    p2 = phi(gamma, k + 2)
    value = 1.0 / (16.0 * p2 * p2 * p1)
    pk = phi(gamma, k)
    closed = _gamma_closed_form(pk)
    tol = 1e-13 + 8 * np.finfo(float).eps / (1.0 + pk)
    if abs(closed - value) > tol * abs(value):
        raise ArithmeticError(
            f"level coefficient mismatch for {gamma} at level {k}: {value!r} vs {closed!r}"
        )
    return value


@dataclass(frozen=True)
class Mask:
    """Stationary linear rule ``(S f)_{2i+j} = sum_l rule_j[l] * f_{i+l}``.

    ``even`` and ``odd`` map a stencil offset ``l`` to its coefficient. With
    the usual mask notation ``rule_j[l] = a_{j - 2l}``.
    """

    even: Mapping[int, float]
    odd: Mapping[int, float]
    name: str = "mask"

    def __post_init__(self):
        for label, rule in (("even", self.even), ("odd", self.odd)):
            if not rule:
                raise ValueError(f"{label} rule of a mask cannot be empty")
            if abs(math.fsum(rule.values()) - 1.0) > 1e-12:
                raise ValueError(f"{label} coefficients of {self.name} must sum to 1")

    @classmethod
    def from_coefficients(cls, a: Sequence[float], support_start: int, name="mask"):
        """Build from the full mask ``a_i``, ``i = support_start, ...``."""
        even, odd = {}, {}
        for n, coef in enumerate(a):
            i = support_start + n
            j = i % 2
            # a_i contributes to rule_j at offset l with i = j - 2l
            (even if j == 0 else odd)[(j - i) // 2] = float(coef)
        return cls(even, odd, name)

    @property
    def is_interpolatory(self) -> bool:
        return dict(self.even) == {0: 1.0}


T11 = Mask({0: 1.0}, {0: 0.5, 1: 0.5}, "T11")
T22 = Mask({0: 1.0}, {-1: -1 / 16, 0: 9 / 16, 1: 9 / 16, 2: -1 / 16}, "T22")


def _apply_rule(values, rule, start, count, periodic):
    n = len(values)
    idx = np.arange(start, start + count)
    acc = np.zeros(count)
    for off in sorted(rule):
        pos = (idx + off) % n if periodic else idx + off
        acc += rule[off] * values[pos]
    return acc


def refine_mask(seq: RefinableSequence, mask: Mask, policy: BoundaryPolicy | None = None
                ) -> RefinableSequence:
    """One step of the stationary linear scheme with the given mask."""
    policy = check_policy(seq, policy)
    v = seq.values
    n = len(v)
    if policy is BoundaryPolicy.PERIODIC_WRAP:
        out = np.empty(2 * n)
        out[0::2] = _apply_rule(v, mask.even, 0, n, True)
        out[1::2] = _apply_rule(v, mask.odd, 0, n, True)
        return seq.with_values(out, level=seq.level + 1, left_index=2 * seq.left_index)

    # Valid coarse indices per parity, then the longest contiguous fine run.
    ranges = []
    for j, rule in ((0, mask.even), (1, mask.odd)):
        lo, hi = -min(rule), n - 1 - max(rule)
        ranges.append((2 * lo + j, 2 * hi + j))
    m_lo = max(r[0] for r in ranges) - 1
    m_hi = min(r[1] for r in ranges) + 1
    m_lo = max(m_lo, min(r[0] for r in ranges))
    m_hi = min(m_hi, max(r[1] for r in ranges))
    if m_hi < m_lo or any(r[1] < r[0] for r in ranges):
        raise InsufficientDataError(
            f"{mask.name}: open sequence of length {n} is shorter than the mask support"
        )
    out = np.empty(m_hi - m_lo + 1)
    for j, rule in ((0, mask.even), (1, mask.odd)):
        first = m_lo + ((j - m_lo) % 2)
        if first > m_hi:
            continue
        count = (m_hi - first) // 2 + 1
        out[first - m_lo::2] = _apply_rule(v, rule, (first - j) // 2, count, False)
    return seq.with_values(out, level=seq.level + 1, left_index=2 * seq.left_index + m_lo)


def refine_T_gamma(seq: RefinableSequence, gamma: FrequencyParameter,
                   policy: BoundaryPolicy | None = None) -> RefinableSequence:
    """Level-dependent 4-point scheme reproducing span{1, t, exp(gamma t), exp(-gamma t)}.

    The level is read from ``seq.level``; the frequency is in units of the
    abscissa, so it is rescaled by ``seq.base_step``.
    """
    if gamma.kind == "zero":
        return refine_mask(seq, T22, policy)
    g = gamma_level_coefficient(gamma.scaled(seq.base_step), seq.level)

    def insert(fm1, f0, f1, f2):
        return 0.5 * f0 + 0.5 * f1 - g * (f2 - f1 - f0 + fm1)

    return refine_interpolatory(seq, insert, (-1, 0, 1, 2), policy, name="T_gamma")


def refine_2pt_nonstationary(seq: RefinableSequence, gamma: FrequencyParameter,
                             policy: BoundaryPolicy | None = None) -> RefinableSequence:
    """Level-dependent 2-point scheme reproducing span{exp(gamma t), exp(-gamma t)}."""
    p = phi(gamma.scaled(seq.base_step), seq.level + 1)
    w = 1.0 / (2.0 * p)

    def insert(f0, f1):
        return w * f1 + w * f0

    return refine_interpolatory(seq, insert, (0, 1), policy, name="2pt_gamma")


# -- annihilating filters ----------------------------------------------------


@dataclass(frozen=True)
class PolynomialFactor:
    """Factor ``(1 - z)**multiplicity``: annihilates polynomials of degree < multiplicity."""

    multiplicity: int = 1


@dataclass(frozen=True)
class RealExpFactor:
    """Factor ``1 - exp(2^-k rate) z`` for a real, signed exponential rate."""

    rate: float


@dataclass(frozen=True)
class ConjugatePairFactor:
    """Factor ``(1 - 2 phi z + z**2)**multiplicity`` for the pair ``+-i*magnitude``."""

    magnitude: float
    multiplicity: int = 1


Factor = Union[PolynomialFactor, RealExpFactor, ConjugatePairFactor]


@dataclass(frozen=True)
class OrthogonalRule:
    """Filter ``b`` with ``sum_m b[m] F(t_{i-m}) = 0`` on a given space and grid.

    ``b[m]`` is the coefficient of ``z**m``; the filter acts by convolution.
    """

    coefficients: tuple
    reference_level: int
    base_step: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))


def _factor_roots(factor: Factor):
    """Frequencies (as hashable keys) a factor accounts for."""
    if isinstance(factor, PolynomialFactor):
        return [("real", 0.0)]
    if isinstance(factor, RealExpFactor):
        return [("real", float(factor.rate))]
    return [("imag", float(factor.magnitude)), ("imag", -float(factor.magnitude))]


def orthogonal_rule(factors: Sequence[Factor], k: int, *, base_step: float = 1.0) -> OrthogonalRule:
    """Coefficients of ``prod_n (1 - exp(2^-k gamma_n) z)^mu_n`` in increasing powers of z."""
    seen = set()
    for f in factors:
        for root in _factor_roots(f):
            if root in seen:
                raise InvalidSpaceError(f"repeated frequency {root[1]} ({root[0]}) in factor list")
            seen.add(root)
    scale = base_step * 2.0 ** (-k)
    poly = np.array([1.0])
    for f in factors:
        if isinstance(f, PolynomialFactor):
            if f.multiplicity < 1:
                raise InvalidSpaceError("multiplicity must be at least 1")
            piece, mu = np.array([1.0, -1.0]), f.multiplicity
        elif isinstance(f, RealExpFactor):
            piece, mu = np.array([1.0, -math.exp(scale * f.rate)]), 1
        elif isinstance(f, ConjugatePairFactor):
            if not 0.0 < f.magnitude < math.pi / scale or f.multiplicity < 1:
                raise InvalidSpaceError(f"invalid conjugate pair {f}")
            c = math.cos(scale * f.magnitude)
            piece, mu = np.array([1.0, -2.0 * c, 1.0]), f.multiplicity
        else:
            raise TypeError(f"unsupported factor {f!r}")
        for _ in range(mu):
            poly = np.convolve(poly, piece)
    return OrthogonalRule(tuple(poly), k, base_step)


def annihilation_residual(rule: OrthogonalRule, seq: RefinableSequence) -> float:
    """Sup over all full windows of ``|sum_m b[m] f_{i-m}|``."""
    if seq.level != rule.reference_level or seq.base_step != rule.base_step:
        raise ValueError("rule and sequence live on different grids")
    b = np.asarray(rule.coefficients)
    v = seq.values
    if seq.is_periodic:
        v = np.concatenate([v, v[: len(b) - 1]])
    if len(v) < len(b):
        raise InsufficientDataError(f"need at least {len(b)} samples, got {len(v)}")
    res = np.convolve(v, b, mode="valid")
    return float(np.max(np.abs(res)))


def phi_from_samples(f_im1: float, f_i: float, f_ip1: float, f_ip2: float) -> float:
    """Recover ``phi`` from four consecutive samples of a function in span{1, e^{gt}, e^{-gt}}."""
    if f_ip1 == f_i:
        raise IndeterminatePhiError("phi cannot be deduced from the data when f_i == f_{i+1}")
    return 0.5 * ((f_ip2 - f_im1) / (f_ip1 - f_i) - 1.0)
