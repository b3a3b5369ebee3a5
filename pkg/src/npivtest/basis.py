"""Sieve basis construction.

B-splines (any order >= 2, equispaced or quantile interior knots), the
orthonormal cosine basis on the support interval, power series, tensor
products for multivariate regressors, and the derivative-constraint matrices
that turn monotonicity/curvature nulls into polyhedral cones {M beta <= 0}.

Dimension accounting: `dim` is the number of basis functions J, not a knot
count. For a B-spline of order m (degree m-1) with N interior knots,
J = m + N.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

__all__ = [
    "BasisSpec",
    "ConstraintMatrix",
    "eval_design",
    "deriv_constraints",
    "tensor_design",
    "zeta",
    "min_dim",
]

_FAMILIES = ("bspline", "cosine", "power")
_CONSTRAINT_KINDS = ("decreasing", "increasing", "convex", "concave", "custom")


@dataclass(frozen=True)
class BasisSpec:
    """One-dimensional sieve basis of `dim` functions on [lo, hi].

    order is the B-spline order (degree + 1); it is ignored for the cosine
    and power families. Interior knots are equispaced by default; the
    'quantile' rule places them at empirical quantiles of `knot_data`.
    """

    family: str
    dim: int
    order: int = 3
    support: tuple[float, float] = (0.0, 1.0)
    knot_rule: str = "equispaced"
    knot_data: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise InputError(f"unknown basis family {self.family!r}; expected one of {_FAMILIES}")
        lo, hi = self.support
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise InputError(f"support must be a finite interval [lo, hi) with lo < hi, got {self.support}")
        if self.family == "bspline":
            if self.order < 2:
                raise InputError(f"B-spline order must be >= 2, got {self.order}")
            if self.dim < self.order:
                raise InputError(
                    f"B-spline basis needs dim >= order, got dim={self.dim}, order={self.order}"
                )
        elif self.dim < 1:
            raise InputError(f"basis dim must be >= 1, got {self.dim}")
        if self.knot_rule not in ("equispaced", "quantile"):
            raise InputError(f"unknown knot rule {self.knot_rule!r}")
        if self.knot_rule == "quantile" and self.knot_data is None:
            raise InputError("quantile knot rule requires knot_data")

    @property
    def n_interior(self) -> int:
        return self.dim - self.order if self.family == "bspline" else 0

    def interior_knots(self) -> np.ndarray:
        lo, hi = self.support
        n = self.n_interior
        if n == 0:
            return np.empty(0)
        if self.knot_rule == "equispaced":
            return lo + (hi - lo) * np.arange(1, n + 1) / (n + 1)
        probs = np.arange(1, n + 1) / (n + 1)
        knots = np.quantile(np.asarray(self.knot_data, dtype=float), probs)
        knots = np.clip(knots, lo, hi)
        if np.any(np.diff(knots) <= 0) or knots[0] <= lo or knots[-1] >= hi:
            raise InputError(
                "quantile knots are not strictly increasing inside the support; "
                "the data has too many ties for this many knots"
            )
        return knots

    def knot_vector(self) -> np.ndarray:
        """Clamped knot vector: order copies of each endpoint around the interior knots."""
        lo, hi = self.support
        return np.concatenate(
            [np.full(self.order, lo), self.interior_knots(), np.full(self.order, hi)]
        )

    def with_dim(self, dim: int) -> "BasisSpec":
        return BasisSpec(self.family, dim, self.order, self.support, self.knot_rule, self.knot_data)


def min_dim(spec: BasisSpec) -> int:
    """Smallest admissible dimension for the spec's family."""
    return spec.order if spec.family == "bspline" else 1


def _clamp(spec: BasisSpec, x: np.ndarray) -> np.ndarray:
    lo, hi = spec.support
    if np.any((x < lo) | (x > hi)):
        warnings.warn(
            f"{int(np.sum((x < lo) | (x > hi)))} evaluation points outside [{lo}, {hi}] were clamped",
            stacklevel=3,
        )
        x = np.clip(x, lo, hi)
    return x


def _bspline_design(x: np.ndarray, t: np.ndarray, order: int, deriv: int) -> np.ndarray:
    """All order-`order` B-splines on knot vector t, evaluated (or differentiated) at x."""
    nb = len(t) - order
    if deriv > 0:
        if order == 1:
            return np.zeros((len(x), nb))
        lower = _bspline_design(x, t, order - 1, deriv - 1)  # nb + 1 functions
        out = np.zeros((len(x), nb))
        for j in range(nb):
            d1 = t[j + order - 1] - t[j]
            d2 = t[j + order] - t[j + 1]
            if d1 > 0:
                out[:, j] += (order - 1) / d1 * lower[:, j]
            if d2 > 0:
                out[:, j] -= (order - 1) / d2 * lower[:, j + 1]
        return out
    hi = t[-1]
    n1 = len(t) - 1
    b0 = np.zeros((len(x), n1), dtype=bool)
    for j in range(n1):
        if t[j] < t[j + 1]:
            cond = (t[j] <= x) & (x < t[j + 1])
            if t[j + 1] == hi:
                cond = cond | (x == hi)  # right-closed last interval
            b0[:, j] = cond
    b = b0.astype(float)
    for m in range(2, order + 1):
        nxt = np.zeros((len(x), len(t) - m))
        for j in range(len(t) - m):
            d1 = t[j + m - 1] - t[j]
            d2 = t[j + m] - t[j + 1]
            if d1 > 0:
                nxt[:, j] += (x - t[j]) / d1 * b[:, j]
            if d2 > 0:
                nxt[:, j] += (t[j + m] - x) / d2 * b[:, j + 1]
        b = nxt
    return b


def eval_design(spec: BasisSpec, x, deriv: int = 0) -> np.ndarray:
    """(n x J) design matrix of the basis (or its deriv-th derivative) at sample points x.

    Points outside the support are clamped to it with a warning.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise InputError(f"eval_design expects scalar or 1-d x, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("evaluation points contain non-finite values")
    if deriv < 0:
        raise InputError(f"derivative order must be >= 0, got {deriv}")
    x = _clamp(spec, x)
    lo, hi = spec.support
    width = hi - lo
    if spec.family == "bspline":
        if deriv >= spec.order:
            return np.zeros((len(x), spec.dim))
        return _bspline_design(x, spec.knot_vector(), spec.order, deriv)
    u = (x - lo) / width
    j = np.arange(spec.dim)
    if spec.family == "power":
        cols = []
        for jj in j:
            if deriv == 0:
                cols.append(u**jj)
            elif jj < deriv:
                cols.append(np.zeros_like(u))
            else:
                coef = np.prod(np.arange(jj, jj - deriv, -1)).astype(float)
                cols.append(coef * u ** (jj - deriv) / width**deriv)
        return np.column_stack(cols)
    # cosine: {1, sqrt(2) cos(pi j u)}, orthonormal w.r.t. Lebesgue on [lo, hi] scaled to unit mass
    cols = []
    for jj in j:
        if jj == 0:
            cols.append(np.ones_like(u) if deriv == 0 else np.zeros_like(u))
            continue
        w = np.pi * jj
        phase = deriv % 4
        fn = [np.cos, lambda z: -np.sin(z), lambda z: -np.cos(z), np.sin][phase]
        cols.append(np.sqrt(2.0) * (w / width) ** deriv * fn(w * u))
    return np.column_stack(cols)


@dataclass(frozen=True)
class ConstraintMatrix:
    """Polyhedral-cone null {beta : rows @ beta <= 0}."""

    rows: np.ndarray
    kind: str

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if not np.all(np.isfinite(rows)):
            raise InputError("constraint rows contain non-finite entries")
        if self.kind not in _CONSTRAINT_KINDS:
            raise InputError(f"unknown constraint kind {self.kind!r}")
        object.__setattr__(self, "rows", rows)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    def negated(self, kind: str | None = None) -> "ConstraintMatrix":
        return ConstraintMatrix(-self.rows, kind or self.kind)


def _greville(t: np.ndarray, order: int) -> np.ndarray:
    nb = len(t) - order
    return np.array([np.mean(t[j + 1 : j + order]) for j in range(nb)])


def _derivative_points(spec: BasisSpec, deriv: int) -> np.ndarray:
    """Points where the deriv-th derivative pins down its sign on the whole interval.

    The derivative of an order-m spline is an order-(m - deriv) spline; for
    order >= 2 its Greville abscissae are interpolatory enough to use
    directly, for order 1 (piecewise constant) one point per knot interval
    suffices.
    """
    t = spec.knot_vector()
    d_order = spec.order - deriv
    t_reduced = t[deriv : len(t) - deriv]
    if d_order >= 2:
        return _greville(t_reduced, d_order)
    breaks = np.concatenate([[spec.support[0]], spec.interior_knots(), [spec.support[1]]])
    return 0.5 * (breaks[:-1] + breaks[1:])


def deriv_constraints(spec: BasisSpec, kind: str) -> ConstraintMatrix:
    """Constraint rows M with M beta <= 0 iff the fitted spline satisfies the shape null.

    decreasing/increasing constrain the first derivative at dim-1 points;
    convex/concave constrain the second derivative (one row per knot interval
    for quadratic splines). Exact over the whole interval for quadratic
    splines under monotonicity and for any order whose constrained derivative
    is piecewise linear or constant.
    """
    if spec.family != "bspline":
        raise InputError(f"derivative constraints require a B-spline basis, got {spec.family!r}")
    if kind in ("decreasing", "increasing"):
        if spec.order < 2:
            raise InputError("monotonicity constraints need B-spline order >= 2")
        rows = eval_design(spec, _derivative_points(spec, 1), deriv=1)
        return ConstraintMatrix(rows if kind == "decreasing" else -rows, kind)
    if kind in ("concave", "convex"):
        if spec.order < 3:
            raise InputError("curvature constraints need B-spline order >= 3")
        rows = eval_design(spec, _derivative_points(spec, 2), deriv=2)
        return ConstraintMatrix(rows if kind == "concave" else -rows, kind)
    raise InputError(f"unsupported constraint kind {kind!r}; use a custom ConstraintMatrix instead")


def tensor_design(specs, x) -> np.ndarray:
    """Row-wise tensor product design; columns are all cross-products, one factor per coordinate."""
    if isinstance(specs, BasisSpec):
        specs = [specs]
    if len(specs) < 1:
        raise InputError("tensor_design needs at least one basis spec")
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] != len(specs):
        raise InputError(
            f"sample has {x.shape[1] if x.ndim == 2 else 1} coordinates but {len(specs)} basis specs were given"
        )
    design = eval_design(specs[0], x[:, 0])
    for k, spec in enumerate(specs[1:], start=1):
        nxt = eval_design(spec, x[:, k])
        design = np.einsum("ij,ik->ijk", design, nxt).reshape(x.shape[0], -1)
    return design


def zeta(spec, dim: int | None = None) -> float:
    """Sup-norm growth constant of the sieve: sqrt(J) for spline/cosine, J for power series."""
    if isinstance(spec, (list, tuple)):
        families = {s.family for s in spec}
        total = int(np.prod([s.dim for s in spec])) if dim is None else dim
        if families == {"power"}:
            return float(total)
        if "power" in families:
            raise InputError("mixed power/non-power tensor factors have no common growth rate")
        return float(np.sqrt(total))
    j = spec.dim if dim is None else dim
    return float(j) if spec.family == "power" else float(np.sqrt(j))
