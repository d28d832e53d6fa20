"""Riemannian metric fields on the simplex and the divergences they induce.

The inverse metric's normalized row sums supply the mean-adjustment weights of
the metric-incentive dynamic; diagonal metrics whose reciprocal entries are
escorts reproduce the escort machinery, and constant SPD matrices extend it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, GeometryError, UnsupportedKindError
from .escorts import EscortSpec, escort_divergence, escort_log, escort_weights
from .simplex import as_state

METRIC_KINDS = ("shahshahani", "euclidean", "diagonal_escort", "constant")


@dataclass(frozen=True)
class MetricField:
    """A metric G(x) on the simplex.

    kinds:
      shahshahani      G_ii = 1/x_i       (the replicator geometry)
      euclidean        G = I              (the projection geometry)
      diagonal_escort  G_ii = 1/phi_i(x_i) for an escort vector phi
      constant         a fixed SPD matrix
    """

    kind: str
    escorts: Optional[tuple] = None
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise DomainError(f"unknown metric kind {self.kind!r}")
        if self.kind == "diagonal_escort":
            if not self.escorts:
                raise DomainError("diagonal_escort needs an escort or escort vector")
            esc = self.escorts if isinstance(self.escorts, (tuple, list)) else (self.escorts,)
            object.__setattr__(self, "escorts", tuple(esc))
        if self.kind == "constant":
            m = np.asarray(self.matrix, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise DomainError("constant metric must be a square matrix")
            if not np.allclose(m, m.T, atol=1e-12):
                raise GeometryError("constant metric must be symmetric")
            if np.any(np.linalg.eigvalsh(m) <= 0):
                raise GeometryError("constant metric must be positive definite")
            m = m.copy()
            m.flags.writeable = False
            object.__setattr__(self, "matrix", m)

    @staticmethod
    def shahshahani() -> "MetricField":
        return MetricField("shahshahani")

    @staticmethod
    def euclidean() -> "MetricField":
        return MetricField("euclidean")

    @staticmethod
    def diagonal_escort(escorts) -> "MetricField":
        if isinstance(escorts, EscortSpec):
            escorts = (escorts,)
        return MetricField("diagonal_escort", escorts=tuple(escorts))

    @staticmethod
    def constant(matrix) -> "MetricField":
        return MetricField("constant", matrix=np.asarray(matrix, dtype=float))

    def _escorts_for(self, n: int) -> tuple:
        esc = self.escorts
        if len(esc) == 1:
            return esc * n
        if len(esc) != n:
            raise DomainError(f"metric escort vector has {len(esc)} entries for n={n}")
        return esc

    def matrix_at(self, x) -> np.ndarray:
        """G(x) as a dense matrix."""
        xv = as_state(x)
        if self.kind == "euclidean":
            return np.eye(xv.size)
        if self.kind == "constant":
            if self.matrix.shape[0] != xv.size:
                raise DomainError("constant metric dimension mismatch")
            return np.array(self.matrix)
        if self.kind == "shahshahani":
            if np.any(xv <= 0.0):
                raise DomainError("Shahshahani metric is undefined on the boundary")
            return np.diag(1.0 / xv)
        w = escort_weights(self._escorts_for(xv.size), xv)
        if np.any(w <= 0.0):
            raise DomainError("escort metric needs positive escort values")
        return np.diag(1.0 / w)

    def inverse_diagonal(self, x) -> Optional[np.ndarray]:
        """Diagonal of G(x)^-1 for diagonal kinds, else None.

        Unlike matrix_at this extends to the boundary: the inverse weights
        x_i or phi_i(x_i) stay finite as coordinates reach zero.
        """
        xv = as_state(x)
        if self.kind == "euclidean":
            return np.ones_like(xv)
        if self.kind == "shahshahani":
            return xv.copy()
        if self.kind == "diagonal_escort":
            return escort_weights(self._escorts_for(xv.size), xv)
        return None


def ghat_unchecked(metric: MetricField, x) -> np.ndarray:
    """Normalized row sums of G(x)^-1 without the sign check.

    The stepping engine uses this so trajectories that leave the simplex
    (record_and_continue) can keep evaluating; the formula extends.
    """
    xv = as_state(x)
    d = metric.inverse_diagonal(xv)
    if d is not None:
        g = d
    else:
        try:
            g = np.linalg.solve(metric.matrix, np.ones(xv.size))
        except np.linalg.LinAlgError as exc:
            raise GeometryError(f"metric is singular: {exc}") from None
    total = float(g.sum())
    if total == 0.0:
        raise GeometryError("inverse metric row sums add to zero")
    return g / total


def ghat(metric: MetricField, x) -> np.ndarray:
    """Normalized row sums of G(x)^-1: the mean-adjustment weight vector.

    Shahshahani gives back x itself, the Euclidean metric the uniform vector,
    and a diagonal escort metric the normalized escort.
    """
    out = ghat_unchecked(metric, x)
    if np.any(out < 0.0):
        raise GeometryError("normalized inverse-metric weights have negative entries")
    return out


def adaptive_coefficients(metric: MetricField, x) -> np.ndarray:
    """C = G^-1 - g g^T / (g . 1) with g = G^-1 1.  Rows sum to zero.

    Applied to a payoff vector this produces the tangent vector field of the
    metric's adaptive dynamic; Shahshahani recovers the replicator field.
    """
    xv = as_state(x)
    d = metric.inverse_diagonal(xv)
    if d is not None:
        inv = np.diag(d)
        g = d
    else:
        try:
            inv = np.linalg.inv(metric.matrix)
        except np.linalg.LinAlgError as exc:
            raise GeometryError(f"metric is singular: {exc}") from None
        g = inv @ np.ones(xv.size)
    total = float(g.sum())
    if total == 0.0:
        raise GeometryError("inverse metric row sums add to zero")
    return inv - np.outer(g, g) / total


def _diagonal_as_escorts(metric: MetricField, n: int) -> Sequence[EscortSpec]:
    if metric.kind == "euclidean":
        return (EscortSpec.constant_one(),) * n
    if metric.kind == "shahshahani":
        return (EscortSpec.power(1.0),) * n
    if metric.kind == "diagonal_escort":
        return metric._escorts_for(n)
    raise UnsupportedKindError(
        f"metric kind {metric.kind!r} has no per-coordinate escort form"
    )


def metric_log(metric: MetricField, i: int, j: int, x: float) -> float:
    """Entrywise antiderivative: integral of G_ij(v) dv from 1 to x.

    Supported for constant matrices and for diagonal metrics whose entries
    depend only on their own coordinate; state-coupled off-diagonal entries
    have no single-variable integral.
    """
    if metric.kind == "constant":
        return float(metric.matrix[i, j]) * (float(x) - 1.0)
    escorts = _diagonal_as_escorts(metric, max(i, j) + 1)
    if i != j:
        return 0.0
    return escort_log(escorts[i], float(x))


def metric_divergence(metric: MetricField, target, x) -> float:
    """Divergence of the state x from the target induced by the metric.

    For diagonal metrics this coincides with the escort divergence of the
    reciprocal diagonal; for a constant metric it is a row-sum weighted half
    squared distance.  Zero iff target == x for supported kinds.
    """
    tv, xv = as_state(target), as_state(x)
    if tv.shape != xv.shape:
        raise DomainError("divergence arguments must have equal dimension")
    if metric.kind == "constant":
        if metric.matrix.shape[0] != xv.size:
            raise DomainError("constant metric dimension mismatch")
        row_sums = metric.matrix.sum(axis=1)
        return 0.5 * float(row_sums @ (tv - xv) ** 2)
    escorts = _diagonal_as_escorts(metric, xv.size)
    return escort_divergence(escorts, tv, xv)
