"""scikit-learn compatible wrappers.

Each sample is one length function given per conjugacy class (or per
element with ``per="element"``), so batches of length functions can be pushed
through pipelines, grid searches and ``cross_val``-style tooling.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from .certify import Conclusion, certify, inequality_system
from .characters import character_table
from .groups import FiniteGroup
from .io import parse_group
from .semigroup import decompose, validate_length

__all__ = ["HeatCoefficientTransformer", "PositivityCertifier"]


def _resolve_group(group) -> FiniteGroup:
    if isinstance(group, FiniteGroup):
        return group
    if isinstance(group, dict):
        return parse_group(group)
    raise TypeError("group must be a FiniteGroup or a group spec dict")


class _LengthEstimator(BaseEstimator):
    def _fit_group(self, X):
        if self.per not in ("class", "element"):
            raise ValueError(f"per must be 'class' or 'element', got {self.per!r}")
        self.group_ = _resolve_group(self.group)
        self.table_ = character_table(self.group_)
        X = validate_data(self, X, ensure_all_finite=True, reset=True)
        expected = self.group_.n_classes if self.per == "class" else self.group_.order
        if X.shape[1] != expected:
            raise ValueError(f"expected {expected} columns ({self.per} lengths), got {X.shape[1]}")
        return X

    def _decompositions(self, X):
        check_is_fitted(self, "table_")
        X = validate_data(self, X, ensure_all_finite=True, reset=False)
        for row in X:
            yield decompose(self.table_, validate_length(self.group_, row, per=self.per))


class HeatCoefficientTransformer(TransformerMixin, _LengthEstimator):
    """Map length functions to ``p_r(t)`` for every irrep and every ``t`` in ``times``.

    Output columns are ordered time-major: ``(t_0, r_0), (t_0, r_1), ...``.
    """

    def __init__(self, group=None, times=(1.0,), per="class"):
        self.group = group
        self.times = times
        self.per = per

    def fit(self, X, y=None):
        self._fit_group(X)
        t = check_array(np.atleast_1d(np.asarray(self.times, dtype=float))[None, :])
        if (t < 0).any():
            raise ValueError("times must be nonnegative")
        self.times_ = t.ravel()
        return self

    def transform(self, X):
        rows = [d.values(self.times_).T.ravel() for d in self._decompositions(X)]
        return np.asarray(rows, dtype=float).reshape(len(rows), -1)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "times_")
        return np.array(
            [f"p{r}(t={t:g})" for t in self.times_ for r in range(self.table_.n_irreps)],
            dtype=object,
        )


class PositivityCertifier(_LengthEstimator):
    """Classify length functions by the positivity certificate.

    ``predict`` returns conclusion names; ``decision_function`` returns the
    smallest ``p_r'(0)`` over nontrivial irreps, which is positive exactly on
    the interior of the certified cone.
    """

    def __init__(self, group=None, per="class"):
        self.group = group
        self.per = per

    def fit(self, X, y=None):
        self._fit_group(X)
        self.inequalities_ = inequality_system(self.table_)
        self.classes_ = np.array([c.value for c in Conclusion], dtype=object)
        return self

    def predict(self, X):
        return np.array([certify(d).conclusion.value for d in self._decompositions(X)], dtype=object)

    def decision_function(self, X):
        out = []
        for d in self._decompositions(X):
            slopes = [s.derivative_at_zero(1) for s in d.p[1:]]
            out.append(min(slopes) if slopes else np.inf)
        return np.asarray(out)

    def score(self, X, y=None):
        """Fraction of samples certified positive."""
        return float(np.mean(self.predict(X) == Conclusion.CERTIFIED_POSITIVE.value))
