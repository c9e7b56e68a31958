"""Sequences on dyadic grids and the difference operators acting on them."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .exceptions import InsufficientDataError

__all__ = [
    "Topology",
    "BoundaryPolicy",
    "RefinableSequence",
    "forward_difference",
    "divided_difference",
    "sup_norm",
    "abscissae",
    "default_policy",
    "refine_interpolatory",
]


class Topology(enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"


class BoundaryPolicy(enum.Enum):
    """How a refinement treats the ends of the stored data.

    ``TRUNCATE`` only emits values whose full stencil is available, so the
    sequence shrinks at both ends on every level. ``PERIODIC_WRAP`` reads the
    stencil cyclically and is only valid for periodic sequences.
    """

    TRUNCATE = "truncate"
    PERIODIC_WRAP = "periodic-wrap"


@dataclass(frozen=True, eq=False)
class RefinableSequence:
    """Real samples living on the grid ``(left_index + j) * base_step * 2**-level``.

    Instances are immutable; every refinement returns a new sequence with the
    level incremented. For periodic sequences the stored values are exactly
    one period.
    """

    values: np.ndarray
    level: int = 0
    base_step: float = 1.0
    left_index: int = 0
    topology: Topology = Topology.OPEN

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if values.size == 0:
            raise InsufficientDataError("a sequence needs at least one value")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "topology", Topology(self.topology))
        if int(self.level) != self.level or self.level < 0:
            raise ValueError(f"level must be a nonnegative integer, got {self.level!r}")
        if not self.base_step > 0:
            raise ValueError(f"base_step must be positive, got {self.base_step!r}")
        object.__setattr__(self, "level", int(self.level))
        object.__setattr__(self, "left_index", int(self.left_index))
        object.__setattr__(self, "base_step", float(self.base_step))

    @classmethod
    def open(cls, values, *, level=0, base_step=1.0, left_index=0) -> "RefinableSequence":
        return cls(values, level, base_step, left_index, Topology.OPEN)

    @classmethod
    def periodic(cls, values, *, level=0, base_step=1.0, left_index=0) -> "RefinableSequence":
        return cls(values, level, base_step, left_index, Topology.PERIODIC)

    @property
    def is_periodic(self) -> bool:
        return self.topology is Topology.PERIODIC

    @property
    def period(self) -> int | None:
        return len(self.values) if self.is_periodic else None

    @property
    def spacing(self) -> float:
        """Grid spacing at the current level."""
        return self.base_step * 2.0 ** (-self.level)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values.tolist())

    def __eq__(self, other):
        if not isinstance(other, RefinableSequence):
            return NotImplemented
        return (
            self.level == other.level
            and self.base_step == other.base_step
            and self.left_index == other.left_index
            and self.topology is other.topology
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def with_values(self, values, **changes) -> "RefinableSequence":
        """Copy of this sequence's metadata carrying new values."""
        return replace(self, values=values, **changes)

    def __repr__(self):
        return (
            f"RefinableSequence(n={len(self)}, level={self.level}, base_step={self.base_step}, "
            f"left_index={self.left_index}, topology={self.topology.value})"
        )


def default_policy(seq: RefinableSequence) -> BoundaryPolicy:
    return BoundaryPolicy.PERIODIC_WRAP if seq.is_periodic else BoundaryPolicy.TRUNCATE


def check_policy(seq: RefinableSequence, policy: BoundaryPolicy | None) -> BoundaryPolicy:
    if policy is None:
        return default_policy(seq)
    policy = BoundaryPolicy(policy)
    if policy is BoundaryPolicy.PERIODIC_WRAP and not seq.is_periodic:
        raise ValueError("PERIODIC_WRAP requires a periodic sequence")
    if policy is BoundaryPolicy.TRUNCATE and seq.is_periodic:
        raise ValueError("TRUNCATE requires an open sequence")
    return policy


def forward_difference(seq: RefinableSequence) -> RefinableSequence:
    """``(f[j+1] - f[j])``; cyclic for periodic sequences.

    The difference ``f[j+1] - f[j]`` is attached to the grid index of ``f[j]``.
    """
    v = seq.values
    if seq.is_periodic:
        return seq.with_values(np.roll(v, -1) - v)
    if len(v) < 2:
        raise InsufficientDataError("forward difference of an open sequence needs 2 values")
    return seq.with_values(v[1:] - v[:-1])


def divided_difference(seq: RefinableSequence) -> RefinableSequence:
    """``2**level * forward_difference(seq)``, at the same level."""
    d = forward_difference(seq)
    return d.with_values(np.ldexp(d.values, seq.level))


def sup_norm(seq) -> float:
    v = seq.values if isinstance(seq, RefinableSequence) else np.asarray(seq, dtype=float)
    return float(np.max(np.abs(v))) if v.size else 0.0


def abscissae(seq: RefinableSequence) -> np.ndarray:
    """Grid positions of the stored values."""
    idx = np.arange(seq.left_index, seq.left_index + len(seq), dtype=np.float64)
    return idx * seq.base_step * 2.0 ** (-seq.level)


def _windows(values: np.ndarray, offsets: Sequence[int], start: int, count: int, periodic: bool):
    n = len(values)
    base = np.arange(start, start + count)
    if periodic:
        return [values[(base + o) % n] for o in offsets]
    return [values[base + o] for o in offsets]


def refine_interpolatory(
    seq: RefinableSequence,
    insert: Callable[..., np.ndarray],
    offsets: Sequence[int],
    policy: BoundaryPolicy | None = None,
    *,
    name: str = "scheme",
) -> RefinableSequence:
    """One binary interpolatory step.

    ``insert`` receives one array per stencil offset (``values[i + o]`` for the
    insertion index ``i``) and returns the inserted values
    ``f^{k+1}_{2i+1}``. Even values are copied.
    """
    policy = check_policy(seq, policy)
    v = seq.values
    n = len(v)
    lo, hi = min(offsets), max(offsets)
    if policy is BoundaryPolicy.PERIODIC_WRAP:
        odd = np.asarray(insert(*_windows(v, offsets, 0, n, True)), dtype=np.float64)
        out = np.empty(2 * n)
        out[0::2] = v
        out[1::2] = odd
        return seq.with_values(out, level=seq.level + 1, left_index=2 * seq.left_index)
    first = -lo
    count = n - hi - first
    if count < 1:
        raise InsufficientDataError(
            f"{name}: open sequence of length {n} is too short for a stencil of width {hi - lo + 1}"
        )
    odd = np.asarray(insert(*_windows(v, offsets, first, count, False)), dtype=np.float64)
    out = np.empty(2 * count + 1)
    out[0::2] = v[first:first + count + 1]
    out[1::2] = odd
    return seq.with_values(out, level=seq.level + 1, left_index=2 * (seq.left_index + first))
