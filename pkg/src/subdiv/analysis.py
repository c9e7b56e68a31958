"""Numerical checks of convergence, monotonicity, smoothness and stability.

Every derivative used here comes from central differences (:func:`fd_jacobian`),
so the hand-derived gradients of the divided-difference rules are checked by
an independent oracle rather than re-derived.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import InsufficientDataError, NotApplicableError
from .nonlinear import psi, refine_S_eps_diff
from .sequence import RefinableSequence, forward_difference, sup_norm

__all__ = [
    "AnalysisReport",
    "General",
    "StrictlyPositive",
    "NearConstantPositive",
    "rho",
    "smoothness_estimate",
    "contraction_report",
    "fd_jacobian",
    "fd_gradient",
    "psi2",
    "g1_ratio",
    "g2_ratio",
    "g2_double",
    "gradient_tables",
    "delta_bar_condition",
    "delta_bar_scan",
    "one_step_order",
    "stability_path_diagnostic",
]


@dataclass
class AnalysisReport:
    """Container for the outputs of the diagnostics in this module.

    ``rho_trace`` entries may be ``inf``; ``None`` marks a level where rho is
    not applicable (zero entry or sign change).
    """

    estimated_alpha: float | None = None
    contraction_factors: list = field(default_factory=list)
    rho_trace: list = field(default_factory=list)
    gradient_norm_table: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    alpha_trace: list = field(default_factory=list)
    gradients: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["gradient_norm_table"] = {
            k: {"point": list(p), "norm": n} for k, (p, n) in self.gradient_norm_table.items()
        }
        out["gradients"] = {k: list(map(float, v)) for k, v in self.gradients.items()}
        return out


@dataclass(frozen=True)
class General:
    """Uniform random values in [-1, 1]."""


@dataclass(frozen=True)
class StrictlyPositive:
    """Uniform random values in (0, 1]."""


@dataclass(frozen=True)
class NearConstantPositive:
    """Positive sequences with ``rho(d) <= rho_bound``."""

    rho_bound: float = 0.05

    def __post_init__(self):
        if not self.rho_bound > 0:
            raise ValueError("rho_bound must be positive")


# ---------------------------------------------------------------- rho


def rho(d) -> float | None:
    """``sup_i max(|d_{i+1}/d_i - 1|, |d_i/d_{i+1} - 1|)``.

    Returns ``None`` when an entry is zero or consecutive entries change sign
    (the quantity is not applicable), otherwise a nonnegative float. Periodic
    sequences are compared cyclically.

    Example:
        >>> rho(RefinableSequence.open([1.0, 2.0]))
        1.0
    """
    seq = d if isinstance(d, RefinableSequence) else RefinableSequence.open(d)
    v = seq.values
    if np.any(v == 0.0):
        return None
    nxt = np.roll(v, -1) if seq.is_periodic else v[1:]
    cur = v if seq.is_periodic else v[:-1]
    if cur.size == 0:
        return 0.0
    if np.any(np.sign(cur) != np.sign(nxt)):
        return None
    with np.errstate(over="ignore"):
        r = np.maximum(np.abs(nxt / cur - 1.0), np.abs(cur / nxt - 1.0))
    return float(np.max(r))


# ---------------------------------------------------------------- smoothness


def smoothness_estimate(scheme, f0: RefinableSequence, n: int = 3, k_max: int = 10) -> AnalysisReport:
    """Hoelder exponent estimate ``log2(|diff^n f^k| / |diff^n f^{k+1}|)``.

    Args:
        scheme: anything with ``refine(seq)``, e.g. a ``SchemeDescriptor``.
        f0: initial data.
        n: order of the differences; must exceed the exponent being measured.
        k_max: deepest level. The estimate uses levels ``k_max - 1`` and ``k_max``.

    Returns:
        AnalysisReport with ``estimated_alpha`` and the per-level ``alpha_trace``
        (entry ``k`` compares levels ``k`` and ``k + 1``).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if k_max < 1:
        raise ValueError("k_max must be positive")
    norms = []
    seq = f0
    for k in range(k_max + 1):
        if k:
            seq = scheme.refine(seq)
        if len(seq) < n + 1 and not seq.is_periodic:
            raise InsufficientDataError(f"level {k} has {len(seq)} values, too few for order-{n} differences")
        d = seq
        for _ in range(n):
            d = forward_difference(d)
        norms.append(sup_norm(d))
    norms = np.array(norms)
    report = AnalysisReport()
    with np.errstate(divide="ignore", invalid="ignore"):
        trace = np.log2(norms[:-1] / norms[1:])
    report.alpha_trace = [float(a) for a in trace]
    report.estimated_alpha = report.alpha_trace[-1]
    report.notes.append(f"n={n}, k_max={k_max}, final difference norm {norms[-1]:.3e}")
    return report


# ---------------------------------------------------------------- contraction


def _draw(rng, data_class, length):
    if isinstance(data_class, StrictlyPositive):
        return rng.uniform(0.0, 1.0, length) + np.finfo(float).tiny
    if isinstance(data_class, NearConstantPositive):
        # log-ratios uniform in +-a with a shrunk so rho stays below the bound
        bound = data_class.rho_bound * 10.0 ** rng.uniform(-2.0, 0.0)
        a = math.log1p(bound)
        steps = rng.uniform(-a, a, length - 1)
        return rng.uniform(0.5, 2.0) * np.exp(np.concatenate([[0.0], np.cumsum(steps)]))
    return rng.uniform(-1.0, 1.0, length)


def contraction_report(scheme_diff: Callable, trials: int, L: int = 1, data_class=None, *,
                       length: int = 16, seed: int = 0) -> AnalysisReport:
    """Empirical contraction factors of a difference scheme.

    For ``General`` and ``StrictlyPositive`` data the factor is
    ``|S^L d| / |d|`` in the sup norm. For ``NearConstantPositive`` data the
    scheme is applied twice and the factor is ``rho(S S d) / rho(d)``.

    Args:
        scheme_diff: a one-step map ``RefinableSequence -> RefinableSequence``.
        trials: number of random sequences.
        L: number of steps (ignored for ``NearConstantPositive``, which uses 2).
        data_class: ``General()`` (default), ``StrictlyPositive()`` or
            ``NearConstantPositive(rho_bound)``.
        length: length of each random open sequence.
        seed: seed of the ``numpy.random.default_rng`` generator.

    Returns:
        AnalysisReport whose ``contraction_factors`` holds the factor of every
        trial; ``notes`` states the sup.
    """
    if trials < 1 or L < 1:
        raise ValueError("trials and L must be positive")
    data_class = General() if data_class is None else data_class
    rng = np.random.default_rng(seed)
    report = AnalysisReport()
    near = isinstance(data_class, NearConstantPositive)
    steps = 2 if near else L
    for _ in range(trials):
        d = RefinableSequence.open(_draw(rng, data_class, length))
        out = d
        for _ in range(steps):
            out = scheme_diff(out)
        if near:
            r0, r1 = rho(d), rho(out)
            report.rho_trace.append((r0, r1))
            report.contraction_factors.append(math.inf if r1 is None else (r1 / r0 if r0 else 0.0))
        else:
            report.contraction_factors.append(sup_norm(out) / sup_norm(d))
    kind = type(data_class).__name__
    report.notes.append(f"{kind}: sup factor {max(report.contraction_factors):.6g} over {trials} trials")
    return report


# ---------------------------------------------------------------- finite differences


def fd_jacobian(func: Callable, point, step: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of ``func`` at ``point``.

    Returns an ``(m, n)`` array for a map from R^n to R^m; scalar maps give
    ``m = 1``. Errors are O(step^2) for smooth maps and zero for affine ones
    up to rounding.

    Raises:
        NotApplicableError: ``func`` fails or returns non-finite values inside
            the stencil.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    x = np.asarray(point, dtype=np.float64).reshape(-1)
    cols = []
    for i in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[i] += step
        xm[i] -= step
        try:
            with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
                fp = np.atleast_1d(np.asarray(func(xp), dtype=np.float64)).reshape(-1)
                fm = np.atleast_1d(np.asarray(func(xm), dtype=np.float64)).reshape(-1)
        except (ArithmeticError, ValueError) as exc:
            raise NotApplicableError(f"map evaluation failed near coordinate {i}: {exc}") from exc
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise NotApplicableError(f"map is not finite near coordinate {i}")
        cols.append((fp - fm) / (2.0 * step))
    return np.stack(cols, axis=1)


def fd_gradient(func: Callable, point, step: float = 1e-5) -> np.ndarray:
    """Gradient of a scalar map, as a 1-D array."""
    return fd_jacobian(func, point, step)[0]


def _fd_gradients_batch(func, X, step):
    # gradient rows for a scalar map vectorised over the columns of X.T
    out = np.empty_like(X)
    for c in range(X.shape[1]):
        Xp, Xm = X.copy(), X.copy()
        Xp[:, c] += step
        Xm[:, c] -= step
        out[:, c] = (func(*Xp.T) - func(*Xm.T)) / (2.0 * step)
    return out


# ---------------------------------------------------------------- divided-difference rules


def psi2(j: int, a, b, c, d, e):
    """Two steps of the divided-difference scheme.

    ``(a, b, c, d, e) = (d_{i-2}, ..., d_{i+2})``; returns the value at fine
    index ``4i + j`` for ``j = 0..4`` (``j = 4`` equals ``j = 0`` at ``i + 1``).
    """
    if j in (0, 1):
        args = (psi(1, a, b, c), psi(0, b, c, d), psi(1, b, c, d))
    elif j in (2, 3):
        args = (psi(0, b, c, d), psi(1, b, c, d), psi(0, c, d, e))
    elif j == 4:
        args = (psi(1, b, c, d), psi(0, c, d, e), psi(1, c, d, e))
    else:
        raise ValueError(f"j must be in 0..4, got {j}")
    return psi(j % 2, *args)


def g1_ratio(x, y):
    """``psi_1(x, 1, y) / psi_0(x, 1, y)``, ratio of the two children of one entry."""
    return psi(1, x, 1.0, y) / psi(0, x, 1.0, y)


def g2_ratio(x, y, z):
    """``psi_0(1, y, y z) / psi_1(x, 1, y)``, ratio across a coarse boundary."""
    return psi(0, 1.0, y, y * z) / psi(1, x, 1.0, y)


def g2_double(j: int, x, y, z, w):
    """Ratio of consecutive double-step outputs, written on local ratios.

    ``psi2(j+1, ...) / psi2(j, ...)`` at ``(x y, y, 1, z, z w)``.
    """
    x = np.asarray(x, dtype=np.float64)
    args = (x * y, y, np.ones_like(x), z, z * np.asarray(w, dtype=np.float64))
    return psi2(j + 1, *args) / psi2(j, *args)


_TABLE = (
    ("psi_0", lambda v: psi(0, *v), (1.0, 1.0, 1.0)),
    ("psi_1", lambda v: psi(1, *v), (1.0, 1.0, 1.0)),
    ("G_1", lambda v: g1_ratio(*v), (1.0, 1.0)),
    ("G_2", lambda v: g2_ratio(*v), (1.0, 1.0, 1.0)),
) + tuple(
    (f"G2_{j}", (lambda j: lambda v: g2_double(j, *v))(j), (1.0, 1.0, 1.0, 1.0)) for j in range(4)
)


def gradient_tables(step: float = 1e-5) -> AnalysisReport:
    """Gradient 1-norms of the divided-difference rules and ratio functions at all-ones points.

    The eight entries are ``psi_0``, ``psi_1``, ``G_1``, ``G_2`` and
    ``G2_0`` .. ``G2_3``; the gradient vectors are stored in ``gradients``.
    """
    report = AnalysisReport()
    for name, fn, point in _TABLE:
        g = fd_gradient(fn, point, step)
        report.gradients[name] = g
        report.gradient_norm_table[name] = (point, float(np.sum(np.abs(g))))
    return report


def _unit_box_boundary(resolution):
    t = np.linspace(-1.0, 1.0, resolution)
    grid = np.stack(np.meshgrid(t, t, t, t, indexing="ij"), axis=-1).reshape(-1, 4)
    return grid[np.any(np.abs(grid) == 1.0, axis=1)]


def delta_bar_condition(delta: float, resolution: int = 32, step: float = 1e-6, *, _unit=None) -> float:
    """Largest gradient 1-norm of ``G2_j`` and ``1/G2_j`` on the boundary of the box of radius ``delta``."""
    unit = _unit_box_boundary(resolution) if _unit is None else _unit
    X = 1.0 + delta * unit if delta > 0 else np.ones((1, 4))
    worst = 0.0
    for j in range(4):
        def g(*a, j=j):
            return g2_double(j, *a)

        def inv(*a, j=j):
            return 1.0 / g2_double(j, *a)

        for fn in (g, inv):
            worst = max(worst, float(np.max(np.sum(np.abs(_fd_gradients_batch(fn, X, step)), axis=1))))
    return worst


def delta_bar_scan(grid_resolution: int = 32, delta_max: float = 0.5, *, tol: float = 1e-4,
                   step: float = 1e-6) -> float:
    """Largest radius ``delta`` on which the double-step ratios stay contractive.

    Bisects on ``delta`` in ``[0, delta_max]`` for the condition that every
    ``G2_j`` and ``1/G2_j`` has gradient 1-norm below 1 on a uniform grid of
    ``grid_resolution`` points per axis on the boundary of the sup-norm box
    around the all-ones point. Returns the lower end of the final bracket.
    """
    if grid_resolution < 8:
        raise ValueError("grid_resolution must be at least 8")
    unit = _unit_box_boundary(grid_resolution)
    lo, hi = 0.0, float(delta_max)
    if delta_bar_condition(hi, step=step, _unit=unit) < 1.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if delta_bar_condition(mid, step=step, _unit=unit) < 1.0:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------- approximation and stability


def one_step_order(func, center: float, h_list: Sequence[float], eps=1.0):
    """Error of one refinement step on samples ``F(center + i h)``, ``i = -2..3``.

    Returns a list of ``(h, error, order)``; ``error`` is the largest deviation
    at the three inserted points ``center + (i + 1/2) h``, ``i = -1, 0, 1``,
    and ``order`` compares with the previous ``h`` (``None`` for the first).
    """
    from .nonlinear import refine_S_eps

    rows = []
    prev = None
    for h in h_list:
        t = center + h * np.arange(-2, 4)
        f = np.asarray(func(t), dtype=np.float64)
        if np.all(f == f[0]):
            raise NotApplicableError("degenerate window: all samples are equal")
        out = refine_S_eps(RefinableSequence.open(f), eps)
        inserted = out.values[1::2]
        exact = np.asarray(func(center + h * (np.arange(-1, 2) + 0.5)), dtype=np.float64)
        err = float(np.max(np.abs(inserted - exact)))
        order = None
        if prev is not None and prev[1] > 0 and err > 0:
            order = math.log(prev[1] / err) / math.log(prev[0] / h)
        rows.append((float(h), err, order))
        prev = (h, err)
    return rows


def _strict_sign(v):
    if np.all(v > 0):
        return 1
    if np.all(v < 0):
        return -1
    return 0


def stability_path_diagnostic(f: RefinableSequence, g: RefinableSequence, eps=1.0, L: int = 1,
                              t_grid: int = 33, step: float = 1e-6) -> float:
    """Largest product of Jacobian norms of the difference scheme along a segment.

    For each ``t`` on a uniform grid of ``[0, 1]`` the path starts at
    ``(1 - t) f + t g`` and is refined ``L`` times; the factors are the sup
    norms (largest row 1-norm) of the central-difference Jacobians of one
    difference-scheme step. A result below 1 means the step contracts
    perturbations along the whole segment.

    Raises:
        NotApplicableError: ``f`` and ``g`` do not share one strict sign, or a
            refined path leaves the strict-sign region.
    """
    if len(f) != len(g) or f.topology is not g.topology:
        raise ValueError("f and g must have the same length and topology")
    s = _strict_sign(f.values)
    if s == 0 or _strict_sign(g.values) != s:
        raise NotApplicableError("f and g must be strictly positive or strictly negative")
    worst = 0.0
    for t in np.linspace(0.0, 1.0, t_grid):
        tau = f.with_values((1.0 - t) * f.values + t * g.values)
        prod = 1.0
        for _ in range(L):
            if _strict_sign(tau.values) != s:
                raise NotApplicableError("the refined path changed sign")
            h = step * sup_norm(tau)
            J = fd_jacobian(lambda v, tau=tau: refine_S_eps_diff(tau.with_values(v), eps).values, tau.values, h)
            prod *= float(np.max(np.sum(np.abs(J), axis=1)))
            tau = refine_S_eps_diff(tau, eps)
        worst = max(worst, prod)
    return worst
