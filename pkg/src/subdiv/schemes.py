"""A small descriptor that names a refinement rule and applies it."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linear import T11, T22, FrequencyParameter, Mask, refine_2pt_nonstationary, refine_mask, refine_T_gamma
from .nonlinear import EpsilonParameter, refine_R, refine_S_eps, refine_S_eps_diff
from .sequence import BoundaryPolicy, RefinableSequence, forward_difference

__all__ = ["SCHEME_NAMES", "SchemeDescriptor", "subdivide"]

SCHEME_NAMES = ("s-eps", "t-gamma", "t11", "t22", "r-rule", "2pt-gamma", "mask")


@dataclass(frozen=True)
class SchemeDescriptor:
    """Which rule to apply: ``s-eps``, ``t-gamma``, ``t11``, ``t22``, ``r-rule``, ``2pt-gamma`` or ``mask``.

    ``eps`` is used by ``s-eps``; ``gamma`` by the two level-dependent
    schemes; ``mask`` by ``mask``.
    """

    name: str = "s-eps"
    eps: float = 1.0
    gamma: FrequencyParameter = field(default_factory=FrequencyParameter.zero)
    mask: Mask | None = None

    def __post_init__(self):
        if self.name not in SCHEME_NAMES:
            raise ValueError(f"unknown scheme {self.name!r}; expected one of {SCHEME_NAMES}")
        if self.name == "mask" and self.mask is None:
            raise ValueError("scheme 'mask' needs a mask")
        if self.name == "s-eps":
            EpsilonParameter.coerce(self.eps)

    @classmethod
    def s_eps(cls, eps=1.0):
        return cls("s-eps", eps=float(eps))

    @property
    def stencil_radius(self) -> int:
        return 1 if self.name in ("t11", "2pt-gamma") else 2

    def refine(self, seq: RefinableSequence, policy: BoundaryPolicy | None = None) -> RefinableSequence:
        if self.name == "s-eps":
            return refine_S_eps(seq, self.eps, policy)
        if self.name == "t22":
            return refine_mask(seq, T22, policy)
        if self.name == "t11":
            return refine_mask(seq, T11, policy)
        if self.name == "mask":
            return refine_mask(seq, self.mask, policy)
        if self.name == "t-gamma":
            return refine_T_gamma(seq, self.gamma, policy)
        if self.name == "2pt-gamma":
            return refine_2pt_nonstationary(seq, self.gamma, policy)
        return refine_R(seq, policy)

    def refine_differences(self, dseq: RefinableSequence) -> RefinableSequence:
        """Apply the induced scheme on first differences (``diff(S f) = S' diff(f)``)."""
        if self.name == "s-eps":
            return refine_S_eps_diff(dseq, self.eps, "half")
        if dseq.is_periodic:
            raise ValueError("difference schemes of linear rules are only provided for open data")
        f = dseq.with_values(np.concatenate([[0.0], np.cumsum(dseq.values)]))
        return forward_difference(self.refine(f))

    def __call__(self, seq, policy=None):
        return self.refine(seq, policy)


def subdivide(scheme: SchemeDescriptor, seq: RefinableSequence, levels: int,
              policy: BoundaryPolicy | None = None) -> RefinableSequence:
    """Apply ``levels`` refinement steps; level-dependent schemes read ``seq.level``."""
    if levels < 0:
        raise ValueError("levels must be nonnegative")
    for _ in range(levels):
        seq = scheme.refine(seq, policy)
    return seq
