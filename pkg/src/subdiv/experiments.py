"""Numerical experiments: conic reproduction, monotone data, approximation order."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .analysis import smoothness_estimate
from .exceptions import InsufficientDataError
from .functions import Cosh, ExpPoly, Expression, Poly, Sinh, Term
from .nonlinear import EpsilonParameter, gamma_eps_branches
from .schemes import SchemeDescriptor, subdivide
from .sequence import RefinableSequence, forward_difference

__all__ = [
    "MONOTONE_DATA1",
    "MONOTONE_DATA2",
    "F1",
    "F2",
    "ExperimentRecord",
    "circle_samples",
    "circle_reproduction",
    "ConicArc",
    "DEFAULT_ARCS",
    "conic_reproduction",
    "monotone_experiment",
    "approximation_table",
    "subdivide",
]

MONOTONE_DATA1 = (10, 10, 10, 10, 10, 10.5, 10.5, 10.5, 10.5, 15, 50, 50, 50, 50, 60, 85, 85, 85, 85)
MONOTONE_DATA2 = (10, 10.1, 10.2, 10.3, 10.4, 10.5, 10.6, 10.7, 10.8, 15, 50, 50.1, 50.2, 50.3, 60,
                  85, 85.1, 85.2, 85.3)

F1 = Expression(lambda t: np.exp(-2.0 * t * t), "exp(-2t^2)")
F2 = ExpPoly([Term(Cosh(1.0)), Term(Sinh(1.0)), Term(Poly(1), -1.0)])

RNG_NAME = "numpy.random.PCG64"


@dataclass
class ExperimentRecord:
    """Self-describing result of one experiment run."""

    name: str
    parameters: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = 0
    version: str = f"subdiv {__version__}; numpy {np.__version__}; {RNG_NAME}"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return str(obj)


# ---------------------------------------------------------------- circle


def circle_samples(n: int, u: float) -> tuple[RefinableSequence, RefinableSequence]:
    """``n`` equispaced points on the unit circle, rotated by ``u``.

    The angle of sample ``i`` is ``2 pi m / n + u`` with ``m`` the representative
    of ``i`` in ``(-n/2, n/2]``, so mirror-image samples have bit-equal cosines.
    """
    if n < 3:
        raise ValueError("a circle needs at least 3 samples")
    i = np.arange(n)
    m = np.where(i > n // 2, i - n, i)
    t = 2.0 * np.pi * m / n + u
    return RefinableSequence.periodic(np.cos(t)), RefinableSequence.periodic(np.sin(t))


def circle_reproduction(n: int, u: float, eps=1.0, levels: int = 7, *, with_branches: bool = False):
    """Largest deviation ``| |P| - 1 |`` after refining the circle samples.

    With ``with_branches`` the per-coordinate branch counts of the first
    level are returned as well, as ``(deviation, {"x": counts, "y": counts})``.
    """
    x, y = circle_samples(n, u)
    scheme = SchemeDescriptor.s_eps(float(EpsilonParameter.coerce(eps)))
    branches = {"x": _branch_counts(x, eps), "y": _branch_counts(y, eps)}
    x, y = subdivide(scheme, x, levels), subdivide(scheme, y, levels)
    dev = float(np.max(np.abs(np.hypot(x.values, y.values) - 1.0)))
    return (dev, branches) if with_branches else dev


def _branch_counts(seq, eps):
    b = gamma_eps_branches(seq, eps)
    return {str(k): int(np.sum(b == k)) for k in (1, 2, 3)}


# ---------------------------------------------------------------- conics


@dataclass(frozen=True)
class ConicArc:
    """Seven samples of a parametrised conic.

    ``kind`` is ``ellipse`` (``(a cos s, b sin s)``), ``hyperbola``
    (``(a cosh s, b sinh s)``) or ``parabola`` (``(s, a s^2)``), with
    ``s = start + step * i`` for ``i = 0..6``.
    """

    kind: str
    start: float
    step: float
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("ellipse", "hyperbola", "parabola"):
            raise ValueError(f"unknown conic {self.kind!r}")

    def point(self, s):
        s = np.asarray(s, dtype=np.float64)
        if self.kind == "ellipse":
            return self.a * np.cos(s), self.b * np.sin(s)
        if self.kind == "hyperbola":
            return self.a * np.cosh(s), self.b * np.sinh(s)
        return s, self.a * s * s


DEFAULT_ARCS = (
    ConicArc("ellipse", 0.3, 0.5, 2.0, 1.0),
    ConicArc("hyperbola", -1.2, 0.4, 1.0, 1.0),
    ConicArc("parabola", -1.0, 1.0 / 3.0, 1.0),
)


def conic_reproduction(arcs=DEFAULT_ARCS, eps=1.0, levels: int = 7) -> dict:
    """Sup distance between refined nodes and the exact conic, for S_eps and the 4-point rule.

    Each arc's seven samples are refined as two open coordinate sequences;
    every retained node is compared with the conic at the same parameter.

    Returns:
        ``{kind: {"s-eps": err, "t22": err, "ties": bool}}``; duplicate kinds
        get a numeric suffix.
    """
    schemes = {"s-eps": SchemeDescriptor.s_eps(float(EpsilonParameter.coerce(eps))),
               "t22": SchemeDescriptor("t22")}
    out = {}
    for arc in arcs:
        s = arc.start + arc.step * np.arange(7)
        px, py = arc.point(s)
        ties = bool(np.any(np.diff(px) == 0) or np.any(np.diff(py) == 0))
        if ties:
            warnings.warn(f"{arc.kind} arc has coordinate ties; reproduction is not guaranteed", stacklevel=2)
        row = {"ties": ties}
        for name, scheme in schemes.items():
            x = subdivide(scheme, RefinableSequence.open(px), levels)
            y = subdivide(scheme, RefinableSequence.open(py), levels)
            sf = arc.start + arc.step * (x.left_index + np.arange(len(x))) * 2.0 ** (-levels)
            ex, ey = arc.point(sf)
            row[name] = float(np.max(np.hypot(x.values - ex, y.values - ey)))
        key = arc.kind
        n = 2
        while key in out:
            key = f"{arc.kind}-{n}"
            n += 1
        out[key] = row
    return out


# ---------------------------------------------------------------- monotone data


def monotone_experiment(data, eps=1.0, levels: int = 10, *, n: int = 3) -> ExperimentRecord:
    """Per-level monotonicity of refined data and the smoothness estimate.

    The direction is taken from the data (nondecreasing unless the last value
    is smaller than the first). ``monotone[k]`` says level ``k`` keeps that
    direction; ``strict[k]`` says it does so strictly.
    """
    seq = data if isinstance(data, RefinableSequence) else RefinableSequence.open(data)
    if not np.all(np.isfinite(seq.values)):
        raise ValueError("data must be finite")
    sign = -1.0 if seq.values[-1] < seq.values[0] else 1.0
    scheme = SchemeDescriptor.s_eps(float(EpsilonParameter.coerce(eps)))
    monotone, strict = [], []
    cur = seq
    for k in range(levels + 1):
        if k:
            cur = scheme.refine(cur)
        d = sign * forward_difference(cur).values
        monotone.append(bool(np.all(d >= 0)))
        strict.append(bool(np.all(d > 0)))
    params = {"data": [float(v) for v in seq.values], "eps": float(EpsilonParameter.coerce(eps)),
              "levels": levels, "n": n}
    outputs = {"monotone": monotone, "strict": strict}
    constant = bool(np.all(seq.values == seq.values[0]))
    if constant:
        outputs["alpha"] = None
        outputs["constant_output"] = bool(np.all(cur.values == seq.values[0]))
    else:
        report = smoothness_estimate(scheme, seq, n=n, k_max=levels)
        outputs["alpha"] = report.estimated_alpha
        outputs["alpha_trace"] = report.alpha_trace
    return ExperimentRecord("monotone", params, outputs)


# ---------------------------------------------------------------- approximation order


def approximation_table(func, interval, k_range=(0, 3), refine_levels: int = 7, eps=1.0, *,
                        pad: int = 4, scale: float = 100.0):
    """Errors ``E_k`` after ``refine_levels`` steps from samples ``F(i 2^-k / scale)``.

    ``E_k`` is the sup over fine nodes in ``[a, b]`` of the deviation from
    ``F``; ``pad`` coarse samples are added beyond each end of the interval so
    truncation never reaches it.

    Returns:
        list of ``(k, E_k, log2(E_{k-1} / E_k))`` with ``None`` as the first order.
    """
    a, b = (float(v) for v in interval)
    if not a < b:
        raise ValueError("interval must satisfy a < b")
    scheme = SchemeDescriptor.s_eps(float(EpsilonParameter.coerce(eps)))
    fine = 2 ** refine_levels
    rows = []
    prev = None
    for k in range(k_range[0], k_range[1] + 1):
        D = scale * 2.0 ** k
        lo = math.floor(a * D) - pad
        hi = math.ceil(b * D) + pad
        i = np.arange(lo, hi + 1)
        seq = RefinableSequence.open(func(i / D), left_index=lo)
        out = subdivide(scheme, seq, refine_levels)
        m = out.left_index + np.arange(len(out))
        m_lo = math.ceil(a * D * fine - 1e-9)
        m_hi = math.floor(b * D * fine + 1e-9)
        if m[0] > m_lo or m[-1] < m_hi:
            raise InsufficientDataError(f"pad={pad} does not cover [{a}, {b}] after {refine_levels} levels")
        sel = (m >= m_lo) & (m <= m_hi)
        err = float(np.max(np.abs(out.values[sel] - func(m[sel] / (D * fine)))))
        order = None if prev is None else math.log2(prev / err)
        rows.append((k, err, order))
        prev = err
    return rows
