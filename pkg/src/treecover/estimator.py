"""sklearn-style estimator facade over the tree cover builder."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .assembly import build_tree_cover
from .verify import stretch_oracle


def validate_points(X) -> np.ndarray:
    pts = np.asarray(X, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("X must be a nonempty 2-d array of points")
    if not np.all(np.isfinite(pts)):
        raise ValueError("X must contain finite coordinates only")
    return pts


class EuclideanTreeCover(BaseEstimator):
    """Fit a (1+eps)-stretch tree cover over a point set.

    Parameters mirror the CLI: eps, mode ('nonsteiner'|'steiner'), strategy,
    degree_reduction ('none'|'global').  After fit, `cover_` is the lazy
    cover; `tree_count_` its exact size.
    """

    def __init__(self, eps: float = 0.1, mode: str = "nonsteiner",
                 strategy: str = "dyadic-binary", degree_reduction: str = "none"):
        self.eps = eps
        self.mode = mode
        self.strategy = strategy
        self.degree_reduction = degree_reduction

    def fit(self, X, y=None):
        pts = validate_points(X)
        self.n_features_in_ = pts.shape[1]
        self.points_ = pts
        self.cover_ = build_tree_cover(pts, eps=self.eps, mode=self.mode,
                                       strategy=self.strategy,
                                       degree_reduction=self.degree_reduction)
        self.tree_count_ = self.cover_.tree_count()
        return self

    def _check_fitted(self):
        if not hasattr(self, "cover_"):
            raise RuntimeError("call fit(X) first")

    def pair_distance(self, x: int, y: int) -> float:
        """Tree distance of the pair through its best witness tree."""
        self._check_fitted()
        if x == y:
            return 0.0
        got = self.cover_.best_candidate(x, y)
        if got is None:
            raise KeyError("pair has no witness tree")
        return got[3]

    def pair_stretch(self, x: int, y: int) -> float:
        self._check_fitted()
        d = float(np.linalg.norm(self.points_[x] - self.points_[y]))
        return self.pair_distance(x, y) / d if d > 0 else 1.0

    def max_stretch(self, pairs=None) -> float:
        """Oracle max stretch over the given pairs (default: all)."""
        self._check_fitted()
        return stretch_oracle(self.points_, self.cover_, pairs=pairs).max_stretch
