"""scikit-learn style wrapper around the refinement functions."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .linear import FrequencyParameter
from .nonlinear import gamma_eps_branches
from .schemes import SCHEME_NAMES, SchemeDescriptor, subdivide
from .sequence import RefinableSequence

__all__ = ["SubdivisionRefiner"]


class SubdivisionRefiner(TransformerMixin, BaseEstimator):
    """Refine a polyline (or a 1-D sequence) coordinate by coordinate.

    Rows of ``X`` are consecutive points; columns are coordinates. ``transform``
    returns a different number of rows than it receives: ``n * 2**levels``
    for periodic input and ``2n - 5`` per level for open input under the
    4-point rules.

    Args:
        scheme: one of ``s-eps``, ``t-gamma``, ``t11``, ``t22``, ``r-rule``, ``2pt-gamma``.
        eps: cut-off parameter of ``s-eps``.
        gamma_kind: ``zero``, ``hyperbolic`` or ``trigonometric`` (``hyper``
            and ``trig`` are accepted) for the level-dependent schemes.
        gamma_mag: modulus of the frequency.
        levels: number of refinement steps.
        topology: ``open`` or ``periodic``.
        base_step: grid spacing of the input, used by the level-dependent schemes.

    Example:
        >>> import numpy as np
        >>> X = np.c_[np.cos(2 * np.pi * np.arange(3) / 3 + 1e-5), np.sin(2 * np.pi * np.arange(3) / 3 + 1e-5)]
        >>> SubdivisionRefiner(levels=2, topology="periodic").fit_transform(X).shape
        (12, 2)
    """

    def __init__(self, scheme="s-eps", eps=1.0, gamma_kind="zero", gamma_mag=0.0, levels=1,
                 topology="open", base_step=1.0):
        self.scheme = scheme
        self.eps = eps
        self.gamma_kind = gamma_kind
        self.gamma_mag = gamma_mag
        self.levels = levels
        self.topology = topology
        self.base_step = base_step

    def _validate_params(self):
        if self.scheme not in SCHEME_NAMES or self.scheme == "mask":
            raise ValueError(f"scheme must be one of {SCHEME_NAMES[:-1]}, got {self.scheme!r}")
        if self.topology not in ("open", "periodic"):
            raise ValueError(f"topology must be 'open' or 'periodic', got {self.topology!r}")
        if int(self.levels) != self.levels or self.levels < 0:
            raise ValueError(f"levels must be a nonnegative integer, got {self.levels!r}")
        gamma = FrequencyParameter.parse(self.gamma_kind, self.gamma_mag)
        return SchemeDescriptor(self.scheme, eps=float(self.eps), gamma=gamma)

    def _check_X(self, X):
        X = check_array(X, ensure_2d=False, dtype=np.float64)
        return X.reshape(-1, 1) if X.ndim == 1 else X

    def _sequences(self, X):
        make = RefinableSequence.periodic if self.topology == "periodic" else RefinableSequence.open
        return [make(X[:, c], base_step=float(self.base_step)) for c in range(X.shape[1])]

    def fit(self, X, y=None):
        """Validate parameters and record the number of coordinates."""
        self.scheme_ = self._validate_params()
        X = self._check_X(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        """Refined points, one row per fine-grid point."""
        check_is_fitted(self, "scheme_")
        X = self._check_X(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        cols = [subdivide(self.scheme_, s, int(self.levels)).values for s in self._sequences(X)]
        return np.column_stack(cols)

    def branch_statistics(self, X):
        """Counts of cut-off branches 1, 2, 3 fired on the first level, per coordinate."""
        check_is_fitted(self, "scheme_")
        X = self._check_X(X)
        out = []
        for s in self._sequences(X):
            b = gamma_eps_branches(s, self.scheme_.eps)
            out.append({k: int(np.sum(b == k)) for k in (1, 2, 3)})
        return out
