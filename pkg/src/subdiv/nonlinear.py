"""The nonlinear stationary 4-point scheme and its difference schemes.

The insertion rule is the 4-point rule whose second-difference weight is not
fixed but recovered from the data itself::

    f_{2i+1} = (f_i + f_{i+1}) / 2 - G * (f_{i+2} - f_{i+1} - f_i + f_{i-1})

with ``G = gamma_eps(f_{i-1}, f_i, f_{i+1}, f_{i+2})``. On samples of
``a + b exp(gt) + c exp(-gt)`` this weight equals the one of the
level-dependent scheme for that ``g``, so conics are reproduced without
knowing their frequency.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import InsufficientDataError, RuleDomainError
from .sequence import BoundaryPolicy, RefinableSequence, check_policy, refine_interpolatory

__all__ = [
    "EpsilonParameter",
    "SQRT3_MINUS_1",
    "gamma_eps",
    "gamma_eps_diff",
    "gamma_eps_branches",
    "refine_S_eps",
    "refine_S_eps_diff",
    "h_ratio",
    "psi",
    "refine_R",
]

SQRT3_MINUS_1 = math.sqrt(3.0) - 1.0
_SQRT2 = math.sqrt(2.0)

BRANCH_EXACT, BRANCH_FLAT, BRANCH_DEFAULT = 1, 2, 3

# q = 1 + num/d0 is off by at most a few ulps of |operands| / |d0|
_ROUNDING = 8.0 * np.finfo(np.float64).eps
_MAX_SLACK = 1e-9


@dataclass(frozen=True)
class EpsilonParameter:
    """Cut-off parameter ``eps`` in [0, 2].

    Convergence is certified on (sqrt(3)-1, 2] and monotonicity preservation
    on [0, sqrt(2)]. Values outside the intersection are accepted with a
    warning.
    """

    value: float = 1.0

    def __post_init__(self):
        v = float(self.value)
        if not 0.0 <= v <= 2.0:
            raise ValueError(f"eps must lie in [0, 2], got {v}")
        object.__setattr__(self, "value", v)
        if not (self.convergence_certified() and self.monotonicity_certified()):
            warnings.warn(
                f"eps={v} is outside ({SQRT3_MINUS_1:.4f}, sqrt(2)]: "
                f"convergence certified={self.convergence_certified()}, "
                f"monotonicity certified={self.monotonicity_certified()}",
                stacklevel=3,
            )

    @classmethod
    def coerce(cls, eps) -> "EpsilonParameter":
        return eps if isinstance(eps, cls) else cls(eps)

    def convergence_certified(self) -> bool:
        return SQRT3_MINUS_1 < self.value <= 2.0

    def monotonicity_certified(self) -> bool:
        return 0.0 <= self.value <= _SQRT2

    @property
    def bound(self) -> float:
        """``M_eps = 1 / (2 eps (2 + eps))``, the largest value of the cut-off weight."""
        if self.value == 0.0:
            return math.inf
        return max(1.0 / (2.0 * self.value * (2.0 + self.value)), 1.0 / 16.0)

    def __float__(self):
        return self.value


def _cutoff(num, d0, dm1, d1, eps2, tie_tol=0.0, scale=None):
    """Vectorised cut-off weight; returns ``(weight, branch)``.

    ``num`` is ``f_2 - f_{-1}`` (or ``d_{-1} + d_0 + d_1``) and ``d0`` is
    ``f_1 - f_0``; ``dm1``, ``d1`` are the outer differences used for the tie
    branch. ``tie_tol`` > 0 treats ``|d0| <= tie_tol * max(|dm1|, |d1|)`` as a
    tie; that mode is a heuristic for noisy data and voids the reproduction
    guarantees.

    ``scale`` bounds the magnitude of the operands of ``num``. A ``q`` that
    falls below ``eps^2`` by no more than its rounding error is treated as
    ``eps^2`` itself (samples with exact ``q == eps^2`` otherwise land on
    either side of the threshold at random).
    """
    num = np.asarray(num, dtype=np.float64)
    dm1 = np.asarray(dm1, dtype=np.float64)
    d0 = np.asarray(d0, dtype=np.float64)
    d1 = np.asarray(d1, dtype=np.float64)
    if tie_tol > 0:
        tie = np.abs(d0) <= tie_tol * np.maximum(np.abs(dm1), np.abs(d1))
    else:
        tie = d0 == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        q = 1.0 + num / d0
        if scale is None:
            scale = np.abs(num)
        slack = _ROUNDING * np.asarray(scale, dtype=np.float64) / np.abs(d0)
        near = (q >= eps2 - slack) & (slack <= _MAX_SLACK)
        exact = ~tie & ((q >= eps2) | near)
        s = np.sqrt(np.where(exact, np.maximum(q, eps2), 1.0))
        w_exact = 0.5 / (s * (s + 2.0))
    flat = tie & (((dm1 >= 0) & (d1 >= 0)) | ((dm1 <= 0) & (d1 <= 0)))
    weight = np.where(exact, w_exact, np.where(flat, 0.0, 1.0 / 16.0))
    branch = np.where(exact, BRANCH_EXACT, np.where(flat, BRANCH_FLAT, BRANCH_DEFAULT))
    return weight, branch


def _cutoff_samples(fm1, f0, f1, f2, eps2, tie_tol=0.0):
    # f_2 - f_{-1} is formed directly: rebuilding it from three differences
    # loses exact cancellations (e.g. 3-periodic data sits on q == eps^2).
    scale = np.abs(f2) + np.abs(fm1) + np.abs(f1) + np.abs(f0)
    return _cutoff(f2 - fm1, f1 - f0, f0 - fm1, f2 - f1, eps2, tie_tol, scale)


def _cutoff_diffs(dm1, d0, d1, eps2, tie_tol=0.0):
    scale = np.abs(dm1) + np.abs(d0) + np.abs(d1)
    return _cutoff(dm1 + d0 + d1, d0, dm1, d1, eps2, tie_tol, scale)


def gamma_eps_diff(d_m1: float, d_0: float, d_1: float, eps=1.0) -> float:
    """Cut-off weight written on consecutive differences ``(d_{-1}, d_0, d_1)``.

    Returns ``(1/2) / ((1 + sqrt(q))^2 - 1)`` with
    ``q = 1 + (d_{-1} + d_0 + d_1) / d_0`` when ``d_0 != 0`` and ``q >= eps^2``;
    0 when ``d_0 == 0`` and ``d_{-1}``, ``d_1`` do not change sign; 1/16 otherwise.
    """
    e = EpsilonParameter.coerce(eps).value
    w, _ = _cutoff_diffs(d_m1, d_0, d_1, e * e)
    return float(w)


def gamma_eps(f_m1: float, f_0: float, f_1: float, f_2: float, eps=1.0) -> float:
    """Cut-off weight on four consecutive samples.

    Branch 1 (``f_1 != f_0`` and ``1 + (f_2 - f_{-1}) / (f_1 - f_0) >= eps^2``)
    returns the exponential weight ``(1/2) / ((1 + sqrt(q))^2 - 1)``; branch 2
    (``f_0 == f_1`` inside a monotone window) returns 0; anything else 1/16.
    Ties use exact floating-point equality.
    """
    e = EpsilonParameter.coerce(eps).value
    w, _ = _cutoff_samples(f_m1, f_0, f_1, f_2, e * e)
    return float(w)


def gamma_eps_branches(seq: RefinableSequence, eps=1.0, policy=None, tie_tol=0.0) -> np.ndarray:
    """Which branch of the cut-off fired for every insertion window (1, 2 or 3)."""
    e = EpsilonParameter.coerce(eps).value
    out = {}

    def insert(fm1, f0, f1, f2):
        _, out["branch"] = _cutoff_samples(fm1, f0, f1, f2, e * e, tie_tol)
        return f0

    refine_interpolatory(seq, insert, (-1, 0, 1, 2), policy, name="S_eps")
    return out["branch"]


def refine_S_eps(seq: RefinableSequence, eps=1.0, policy: BoundaryPolicy | None = None,
                 *, tie_tol: float = 0.0) -> RefinableSequence:
    """One step of the nonlinear 4-point scheme.

    Args:
        seq: data at level k.
        eps: cut-off parameter, default 1.
        policy: boundary handling; defaults to the sequence topology.
        tie_tol: relative tolerance for detecting ``f_i == f_{i+1}``. The
            default 0 uses exact comparison; anything else is uncertified.
    """
    e = EpsilonParameter.coerce(eps).value

    def insert(fm1, f0, f1, f2):
        w, _ = _cutoff_samples(fm1, f0, f1, f2, e * e, tie_tol)
        return 0.5 * f0 + 0.5 * f1 - w * (f2 - f1 - f0 + fm1)

    return refine_interpolatory(seq, insert, (-1, 0, 1, 2), policy, name="S_eps")


def refine_S_eps_diff(dseq: RefinableSequence, eps=1.0, scale: str = "half",
                      policy: BoundaryPolicy | None = None) -> RefinableSequence:
    """Difference scheme acting on ``d = forward_difference(f)``.

    ``scale="half"`` gives ``(S d)_{2i+j} = d_i/2 + (-1)^j G(d_{i-1}, d_i, d_{i+1}) (d_{i-1} - d_{i+1})``,
    which maps the differences of ``f`` to the differences of the refined
    data. ``scale="divided"`` returns twice that, the rule acting on divided
    differences ``2^k * diff(f^k)``.
    """
    if scale not in ("half", "divided"):
        raise ValueError(f"scale must be 'half' or 'divided', got {scale!r}")
    e = EpsilonParameter.coerce(eps).value
    policy = check_policy(dseq, policy)
    v = dseq.values
    n = len(v)
    if policy is BoundaryPolicy.PERIODIC_WRAP:
        dm1, d0, d1 = np.roll(v, 1), v, np.roll(v, -1)
        first = 0
    else:
        if n < 3:
            raise InsufficientDataError(f"difference scheme needs 3 values, got {n}")
        dm1, d0, d1 = v[:-2], v[1:-1], v[2:]
        first = 1
    w, _ = _cutoff_diffs(dm1, d0, d1, e * e)
    corr = w * (dm1 - d1)
    out = np.empty(2 * len(d0))
    out[0::2] = 0.5 * d0 + corr
    out[1::2] = 0.5 * d0 - corr
    if scale == "divided":
        out *= 2.0
    return dseq.with_values(out, level=dseq.level + 1, left_index=2 * (dseq.left_index + first))


def h_ratio(x, y):
    """``H(x, y) = (x - y) / (2 + x + y + 2 sqrt(2 + x + y))`` for ``x, y >= 0``.

    Accepts scalars or arrays; the result lies in (-1, 1).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("H is only defined for nonnegative arguments")
    s = 2.0 + (x + y)  # grouped so that H(x, y) == -H(y, x) exactly
    h = (x - y) / (s + 2.0 * np.sqrt(s))
    return float(h) if h.ndim == 0 else h


def psi(j: int, d_m1, d_0, d_1):
    """Rules of the divided-difference scheme on same-signed data.

    ``psi(j, d_{i-1}, d_i, d_{i+1}) = d_i (1 + (-1)^j H(d_{i-1}/d_i, d_{i+1}/d_i))``
    gives ``(S^(1) d)_{2i+j}``. Vectorised over array arguments.
    """
    d_m1 = np.asarray(d_m1, dtype=np.float64)
    d_0 = np.asarray(d_0, dtype=np.float64)
    d_1 = np.asarray(d_1, dtype=np.float64)
    sign = 1.0 if j % 2 == 0 else -1.0
    return d_0 * (1.0 + sign * h_ratio(d_m1 / d_0, d_1 / d_0))


def refine_R(seq: RefinableSequence, policy: BoundaryPolicy | None = None) -> RefinableSequence:
    """Stationary 2-point rule ``sqrt(f_i / (f_{i-1} + 2 f_i + f_{i+1})) (f_i + f_{i+1})``.

    Experimental: the rule is partial. It reproduces span{exp(gt), exp(-gt)}
    where defined and raises :class:`RuleDomainError` elsewhere.
    """
    first = {"i": 0}

    def insert(fm1, f0, f1):
        den = fm1 + 2.0 * f0 + f1
        with np.errstate(divide="ignore", invalid="ignore"):
            rad = f0 / den
        bad = (den == 0.0) | ~(rad >= 0.0)
        if np.any(bad):
            i = int(np.argmax(bad)) + first["i"]
            raise RuleDomainError(f"R rule undefined at insertion index {i}", index=i)
        return np.sqrt(rad) * (f0 + f1)

    policy = check_policy(seq, policy)
    if policy is BoundaryPolicy.TRUNCATE:
        first["i"] = 1
    return refine_interpolatory(seq, insert, (-1, 0, 1), policy, name="R")
