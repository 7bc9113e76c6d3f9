"""Riemannian and almost Hermitian charts.

A chart is a single coordinate patch: a dimension, coordinate names, and a
metric given entrywise as scalar expression fields.  Only the upper
triangle of the metric is stored; the mirrored entries share the same field
objects, so symmetry is exact by construction.  An almost Hermitian chart
adds a mixed tensor field J with the convention (J X)^i = J^i_j X^j.

Christoffel symbols come from the standard Levi-Civita formula with all
partial derivatives supplied by jets, so there is no step-size error:

    Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)

The two chart-level checks implemented here are the almost Hermitian
conditions (J^2 = -Id and g(JX, JY) = g(X, Y)) and the Kaehler condition
(the covariant derivative of J vanishes).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import Tolerances
from .expressions import ScalarField
from .report import CheckResult, ResidualTracker

__all__ = [
    "SingularMetricError", "Chart", "HermitianChart", "Christoffels",
    "ConstantField", "ExpressionField", "christoffel",
    "covariant_derivative", "coordinate_bracket",
    "validate_almost_hermitian", "kaehler_check", "metric_pd_check",
]


class SingularMetricError(RuntimeError):
    """Metric is not invertible (or too ill-conditioned) at a point."""


def inner(g: np.ndarray, x, y) -> float:
    return float(np.asarray(x) @ g @ np.asarray(y))


def norm(g: np.ndarray, x) -> float:
    return float(np.sqrt(max(inner(g, x, x), 0.0)))


@dataclass(frozen=True, eq=False)
class Chart:
    """Coordinate chart with an expression-valued metric."""

    dim: int
    coords: tuple
    metric: tuple  # dim x dim grid of ScalarField, mirrored across diagonal

    @classmethod
    def from_fields(cls, coords: Sequence[str], rows) -> "Chart":
        m = len(coords)
        if len(rows) != m or any(len(r) != m for r in rows):
            raise ValueError(f"metric must be {m}x{m}")
        # upper triangle wins; lower entries alias the mirrored field
        grid = [[None] * m for _ in range(m)]
        for i in range(m):
            for j in range(i, m):
                grid[i][j] = rows[i][j]
                grid[j][i] = rows[i][j]
        return cls(m, tuple(coords), tuple(tuple(r) for r in grid))

    @classmethod
    def euclidean(cls, coords: Sequence[str]) -> "Chart":
        m = len(coords)
        rows = [[ScalarField.from_text("1" if i == j else "0", coords)
                 for j in range(m)] for i in range(m)]
        return cls.from_fields(coords, rows)

    def metric_at(self, p) -> np.ndarray:
        m = self.dim
        g = np.empty((m, m))
        for i in range(m):
            for j in range(i, m):
                g[i, j] = g[j, i] = self.metric[i][j].eval(p)
        return g

    def metric_jets_at(self, p):
        m = self.dim
        out = [[None] * m for _ in range(m)]
        for i in range(m):
            for j in range(i, m):
                jet = self.metric[i][j].jet(p)
                out[i][j] = jet
                out[j][i] = jet
        return out


@dataclass(frozen=True, eq=False)
class HermitianChart:
    """Chart of even dimension carrying an almost complex structure field."""

    chart: Chart
    j: tuple  # dim x dim grid of ScalarField, (J X)^i = J^i_j X^j

    def __post_init__(self):
        if self.chart.dim % 2:
            raise ValueError("almost Hermitian charts must have even dimension")

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def coords(self) -> tuple:
        return self.chart.coords

    def metric_at(self, p) -> np.ndarray:
        return self.chart.metric_at(p)

    def j_at(self, p) -> np.ndarray:
        m = self.dim
        out = np.empty((m, m))
        for i in range(m):
            for k in range(m):
                out[i, k] = self.j[i][k].eval(p)
        return out

    def j_jets_at(self, p):
        return [[self.j[i][k].jet(p) for k in range(self.dim)]
                for i in range(self.dim)]


@dataclass(frozen=True)
class Christoffels:
    """Levi-Civita connection coefficients at a point, gamma[k, i, j]."""

    point: tuple
    gamma: np.ndarray  # symmetric in (i, j) exactly (mirrored storage)


def christoffel(chart: Chart, p, cond_max: float = 1e12) -> Christoffels:
    m = chart.dim
    gjets = chart.metric_jets_at(p)
    g = np.empty((m, m))
    dg = np.empty((m, m, m))  # dg[l, i, j] = d_l g_ij
    for i in range(m):
        for j in range(i, m):
            g[i, j] = g[j, i] = gjets[i][j].value
            dg[:, i, j] = dg[:, j, i] = gjets[i][j].grad
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > cond_max:
        raise SingularMetricError(
            f"metric condition number {cond:.3e} at point {list(p)!r}")
    ginv = np.linalg.inv(g)
    gamma = np.zeros((m, m, m))
    for k in range(m):
        for i in range(m):
            for j in range(i, m):
                acc = 0.0
                for l in range(m):
                    acc += ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                gamma[k, i, j] = gamma[k, j, i] = 0.5 * acc
    return Christoffels(tuple(float(x) for x in p), gamma)


# -- vector field specs -------------------------------------------------------


class ConstantField:
    """Constant-coefficient extension of a tangent vector."""

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=float)

    def value(self, p) -> np.ndarray:
        return self.coeffs

    def value_and_jacobian(self, p):
        m = len(self.coeffs)
        return self.coeffs, np.zeros((m, m))


class ExpressionField:
    """Vector field with scalar-expression components."""

    def __init__(self, comps: Sequence[ScalarField]):
        self.comps = tuple(comps)

    def value(self, p) -> np.ndarray:
        return np.array([c.eval(p) for c in self.comps])

    def value_and_jacobian(self, p):
        jets_ = [c.jet(p) for c in self.comps]
        value = np.array([j.value for j in jets_])
        jac = np.array([j.grad for j in jets_])
        return value, jac


def covariant_derivative(chart: Chart, field, direction, p,
                         gammas: Christoffels | None = None) -> np.ndarray:
    """(nabla_X V)^k = X^i d_i V^k + Gamma^k_ij X^i V^j at p."""
    x = np.asarray(direction, dtype=float)
    value, jac = field.value_and_jacobian(p)
    if gammas is None:
        gammas = christoffel(chart, p)
    return jac @ x + np.einsum("kij,i,j->k", gammas.gamma, x, value)


def coordinate_bracket(field_x, field_y, p) -> np.ndarray:
    """[X, Y]^k = X^i d_i Y^k - Y^i d_i X^k at p."""
    xv, xj = field_x.value_and_jacobian(p)
    yv, yj = field_y.value_and_jacobian(p)
    return yj @ xv - xj @ yv


# -- chart-level checks --------------------------------------------------------


def metric_pd_check(chart: Chart, points, tol: Tolerances,
                    name: str = "metric-positive-definite") -> CheckResult:
    """Smallest metric eigenvalue must exceed the gate at every point."""
    tracker = ResidualTracker()
    min_eig = np.inf
    for p in points:
        g = chart.metric_at(p)
        eig = float(np.linalg.eigvalsh(g)[0])
        min_eig = min(min_eig, eig)
        # residual counts how far below the gate the spectrum dips
        tracker.add(max(0.0, tol.pd - eig), point=p, label="min eigenvalue")
    passed = tracker.max == 0.0
    return CheckResult.from_tracker(
        name, tracker, passed,
        detail=f"min eigenvalue {min_eig:.3e}",
        extras={"min_eigenvalue": min_eig})


def validate_almost_hermitian(hchart: HermitianChart, points, directions: int,
                              tol: Tolerances,
                              rng: np.random.Generator | None = None) -> CheckResult:
    """Check J^2 = -Id and g(JX, JY) = g(X, Y) over sampled points."""
    rng = rng or np.random.default_rng(0)
    m = hchart.dim
    tracker = ResidualTracker()
    max_sq = 0.0
    max_compat = 0.0
    for p in points:
        g = hchart.metric_at(p)
        jm = hchart.j_at(p)
        res_sq = float(np.max(np.abs(jm @ jm + np.eye(m))))
        max_sq = max(max_sq, res_sq)
        tracker.add(res_sq, point=p, label="J^2 + Id")
        for _ in range(directions):
            x = rng.standard_normal(m)
            y = rng.standard_normal(m)
            res = abs(inner(g, jm @ x, jm @ y) - inner(g, x, y))
            max_compat = max(max_compat, res)
            tracker.add(res, point=p, vectors=(x, y), label="g(JX,JY)-g(X,Y)")
    passed = max_sq < tol.alg and max_compat < tol.alg
    return CheckResult.from_tracker(
        "almost-hermitian", tracker, passed,
        extras={"max_j_squared": max_sq, "max_compatibility": max_compat})


def kaehler_check(hchart: HermitianChart, points, directions: int,
                  tol: Tolerances,
                  rng: np.random.Generator | None = None) -> CheckResult:
    """Residual of nabla_X (J Y) - J (nabla_X Y) for constant X, Y.

    Evaluated on every coordinate basis pair (complete, by bilinearity of
    the J-derivative) plus random smoke pairs.
    """
    rng = rng or np.random.default_rng(0)
    m = hchart.dim
    tracker = ResidualTracker()
    for p in points:
        g = hchart.metric_at(p)
        jm = hchart.j_at(p)
        jjets = hchart.j_jets_at(p)
        gammas = christoffel(hchart.chart, p)
        # d_l (J y)^k for constant y is grad of the J entries contracted with y
        djac = np.array([[jjets[i][k].grad for k in range(m)]
                         for i in range(m)])  # djac[i, k, l]
        pairs = [(np.eye(m)[i], np.eye(m)[j])
                 for i in range(m) for j in range(m)]
        pairs += [(rng.standard_normal(m), rng.standard_normal(m))
                  for _ in range(directions)]
        for x, y in pairs:
            jy = jm @ y
            jy_jac = np.einsum("ikl,k->il", djac, y)
            lhs = jy_jac @ x + np.einsum("kij,i,j->k", gammas.gamma, x, jy)
            rhs = jm @ np.einsum("kij,i,j->k", gammas.gamma, x, y)
            tracker.add(norm(g, lhs - rhs), point=p, vectors=(x, y))
    passed = tracker.max < tol.alg
    return CheckResult.from_tracker("kaehler", tracker, passed)
