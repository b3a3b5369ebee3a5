"""The adaptive restriction test.

Per candidate sieve dimension J the machinery computes a centered
(leave-one-out) quadratic-form statistic D_J from null-restricted residuals,
a normalization v_J from unrestricted residuals, and an active-rank-adjusted
chi-square critical value with Bonferroni correction over the candidate set.
The test rejects when any standardized statistic W_J exceeds one.

Candidate sets come in three modes:
  * 'dyadic': the exponential-scan set {J_ * 2^j} capped by the data-driven
    stability bound J_max;
  * 'knots': every dimension from the basis minimum up to J_max (the grid the
    simulation reproductions use);
  * an explicit list, taken literally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .basis import BasisSpec, ConstraintMatrix, deriv_constraints, eval_design, tensor_design, zeta
from .errors import InputError, NumericalError
from .linalg import frobenius_norm, orthonormal_range, sym_inv_sqrt
from .npiv import NpivFit, RestrictedFit, fit_from_design, fit_restricted_cone, fit_restricted_parametric
from .randdist import chisq_quantile, chisq_sf

__all__ = [
    "NullSpec",
    "RunConfig",
    "CandidateGrid",
    "CandidateRecord",
    "TestReport",
    "compute_shat",
    "build_grid",
    "compute_D",
    "compute_vhat",
    "gamma_hat",
    "eta_hat",
    "adaptive_test",
    "adaptive_scan",
    "decide",
    "cs_contains",
    "image_space_scan",
    "image_space_test",
]

_SHAPE_KINDS = ("decreasing", "increasing", "convex", "concave")
_MODEL_KINDS = ("linear", "quadratic")
_BASIS_NAMES = {
    "bspline2": ("bspline", 3),
    "bspline3": ("bspline", 4),
    "cosine": ("cosine", 0),
    "power": ("power", 0),
}


@dataclass(frozen=True)
class NullSpec:
    """Null hypothesis: a polyhedral-cone shape restriction or a parametric form."""

    kind: str  # 'shape' | 'parametric'
    shape: str | None = None
    model: str | None = None
    custom_rows: Callable[[BasisSpec], ConstraintMatrix] | None = field(default=None, compare=False)
    custom_design: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == "shape":
            if self.shape not in _SHAPE_KINDS and self.custom_rows is None:
                raise InputError(f"shape null needs shape in {_SHAPE_KINDS} or custom rows, got {self.shape!r}")
        elif self.kind == "parametric":
            if self.model not in _MODEL_KINDS and self.custom_design is None:
                raise InputError(f"parametric null needs model in {_MODEL_KINDS} or a custom design")
        else:
            raise InputError(f"null kind must be 'shape' or 'parametric', got {self.kind!r}")

    @staticmethod
    def from_name(name: str) -> "NullSpec":
        if name in _SHAPE_KINDS:
            return NullSpec(kind="shape", shape=name)
        if name in _MODEL_KINDS:
            return NullSpec(kind="parametric", model=name)
        raise InputError(f"unknown null {name!r}; expected one of {_SHAPE_KINDS + _MODEL_KINDS}")

    def describe(self) -> str:
        return self.shape if self.kind == "shape" else f"parametric:{self.model}"

    def constraints(self, spec: BasisSpec) -> ConstraintMatrix:
        if self.kind != "shape":
            raise InputError("constraints are only defined for shape nulls")
        if self.custom_rows is not None:
            return self.custom_rows(spec)
        return deriv_constraints(spec, self.shape)


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration; mirrors the CLI flags one-to-one."""

    alpha: float = 0.05
    basis: str = "bspline2"
    grid: str | tuple[int, ...] = "dyadic"  # 'dyadic' | 'knots' | explicit tuple
    k_factor: int = 4
    seed: int | None = None
    support: tuple[float, float] = (0.0, 1.0)
    knot_rule: str = "equispaced"
    rcond: float | None = None

    schema_version: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.basis not in _BASIS_NAMES:
            raise InputError(f"unknown basis {self.basis!r}; expected one of {sorted(_BASIS_NAMES)}")
        if self.k_factor < 2:
            raise InputError(f"k_factor must be >= 2, got {self.k_factor}")
        if isinstance(self.grid, str):
            if self.grid not in ("dyadic", "knots"):
                raise InputError(f"grid mode must be 'dyadic', 'knots', or an explicit list, got {self.grid!r}")
        else:
            lst = tuple(int(j) for j in self.grid)
            if len(lst) == 0 or any(j < 1 for j in lst):
                raise InputError(f"explicit grid must be a non-empty list of positive dims, got {self.grid}")
            object.__setattr__(self, "grid", tuple(sorted(set(lst))))

    @property
    def family(self) -> str:
        return _BASIS_NAMES[self.basis][0]

    @property
    def order(self) -> int:
        return _BASIS_NAMES[self.basis][1]

    def psi_spec(self, j: int, knot_data=None) -> BasisSpec:
        return BasisSpec(self.family, j, max(self.order, 2), self.support, self.knot_rule, knot_data)

    def instrument_specs(self, k_target: int, d_w: int, knot_data=None):
        """Basis spec(s) of total dimension >= k_target for a d_w-dimensional instrument."""
        base = max(k_target, self._family_min())
        if d_w == 1:
            return self.psi_spec(base, knot_data)
        per_dim = max(self._family_min(), math.ceil(base ** (1.0 / d_w)))
        while per_dim**d_w < base:
            per_dim += 1
        return [self.psi_spec(per_dim, None if knot_data is None else knot_data[:, i]) for i in range(d_w)]

    def _family_min(self) -> int:
        return max(self.order, 2) if self.family == "bspline" else 1

    def basis_min(self) -> int:
        return self._family_min()

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "alpha": self.alpha,
            "basis": self.basis,
            "grid": self.grid if isinstance(self.grid, str) else list(self.grid),
            "k_factor": self.k_factor,
            "seed": self.seed,
            "support": list(self.support),
            "knot_rule": self.knot_rule,
            "rcond": self.rcond,
        }

    @staticmethod
    def from_dict(d: dict) -> "RunConfig":
        d = dict(d)
        version = d.pop("schema_version", 1)
        if version != 1:
            raise InputError(f"unsupported config schema version {version}")
        grid = d.get("grid", "dyadic")
        if isinstance(grid, list):
            d["grid"] = tuple(grid)
        if "support" in d and d["support"] is not None:
            d["support"] = tuple(d["support"])
        known = {k: v for k, v in d.items() if k in RunConfig.__dataclass_fields__}
        unknown = set(d) - set(known)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return RunConfig(**known)


@dataclass(frozen=True)
class CandidateGrid:
    """Candidate sieve dimensions with their stability diagnostics."""

    mode: str
    j_underbar: int
    j_max_exp: int
    hard_cap: int
    j_max_hat: int
    j_list: tuple[int, ...]
    shat: dict[int, float]
    fallback: bool = False
    warnings: tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return len(self.j_list)


@dataclass(frozen=True)
class CandidateRecord:
    """Per-candidate statistics; eta/w_stat/p_value are at the report's alpha."""

    j: int
    k: int
    d_stat: float
    v_stat: float
    s_hat: float
    gamma: int
    eta: float
    w_stat: float
    p_value: float
    n_active: int

    def to_dict(self) -> dict:
        return {
            "J": self.j,
            "K": self.k,
            "D": self.d_stat,
            "v": self.v_stat,
            "s_hat": self.s_hat,
            "gamma": self.gamma,
            "eta": self.eta,
            "W": self.w_stat,
            "p_value": self.p_value,
            "n_active": self.n_active,
        }


@dataclass(frozen=True)
class TestReport:
    """Outcome of one adaptive test run."""

    statistic: str  # 'structural' | 'image-space'
    null: str
    alpha: float
    grid: CandidateGrid
    per_j: tuple[CandidateRecord, ...]
    reject: bool
    j_reported: int
    j_selected_set: tuple[int, ...]
    p_value: float
    p_threshold: float
    config: dict
    warnings: tuple[str, ...] = ()

    @property
    def w_reported(self) -> float:
        for rec in self.per_j:
            if rec.j == self.j_reported:
                return rec.w_stat
        raise KeyError(self.j_reported)

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "null": self.null,
            "alpha": self.alpha,
            "grid": {
                "mode": self.grid.mode,
                "J_underbar": self.grid.j_underbar,
                "j_max_exp": self.grid.j_max_exp,
                "hard_cap": self.grid.hard_cap,
                "J_max_hat": self.grid.j_max_hat,
                "J_list": list(self.grid.j_list),
                "fallback": self.grid.fallback,
            },
            "per_J": [rec.to_dict() for rec in self.per_j],
            "reject": self.reject,
            "J_reported": self.j_reported,
            "J_selected_set": list(self.j_selected_set),
            "W_reported": self.w_reported,
            "p_value": self.p_value,
            "p_threshold": self.p_threshold,
            "config": self.config,
            "warnings": list(self.warnings),
        }


def _numerically_zero(residuals: np.ndarray, y: np.ndarray) -> bool:
    """Residuals at rounding level relative to the outcome scale count as exact zeros."""
    return float(np.max(np.abs(residuals), initial=0.0)) <= 1e-12 * (1.0 + float(np.max(np.abs(y))))


def compute_shat(psi, b, omega=None) -> float:
    """Minimal singular value of the orthonormalized cross-gram (B'B)^{-1/2} B'Psi (Psi'O Psi)^{-1/2}."""
    psi = np.asarray(psi, dtype=float)
    b = np.asarray(b, dtype=float)
    if psi.shape[0] != b.shape[0]:
        raise InputError("Psi and B must share the number of rows")
    n = psi.shape[0]
    om = np.ones(n) if omega is None else np.asarray(omega, dtype=float)
    gb = b.T @ b / n
    gw = psi.T @ (psi * om[:, None]) / n
    for name, g in (("instrument gram B'B", gb), ("weighted regressor gram Psi'Omega Psi", gw)):
        evals = np.linalg.eigvalsh(0.5 * (g + g.T))
        if evals[-1] <= 0 or evals[0] <= 1e-12 * g.shape[0] * evals[-1]:
            raise NumericalError(f"{name} is numerically singular (dim {g.shape[0]})")
    a = sym_inv_sqrt(gb) @ (b.T @ psi / n) @ sym_inv_sqrt(gw)
    svals = np.linalg.svd(a, compute_uv=False)
    return float(svals[-1])


def _res_parameters(n: int) -> tuple[int, int, int]:
    if n < 20:
        raise InputError(f"need at least 20 observations, got {n}")
    j_under = max(1, math.floor(math.sqrt(math.log(math.log(n)))))
    j_max_exp = max(0, math.ceil(math.log2(n ** (1.0 / 3.0) / j_under)))
    return j_under, j_max_exp, j_under * 2**j_max_exp


def _design_for(config: RunConfig, j: int, x, k_target: int, w, quantile_ok: bool = True):
    """(psi_spec, Psi, b_specs, B) for candidate dimension j."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    knot_x = x if (config.knot_rule == "quantile" and quantile_ok) else None
    psi_spec = config.psi_spec(j, knot_x)
    d_w = 1 if w.ndim == 1 else w.shape[1]
    knot_w = w if (config.knot_rule == "quantile" and quantile_ok) else None
    b_specs = config.instrument_specs(k_target, d_w, knot_w)
    psi = eval_design(psi_spec, x)
    b = eval_design(b_specs, w) if isinstance(b_specs, BasisSpec) else tensor_design(b_specs, w)
    return psi_spec, psi, b_specs, b


def build_grid(x, w, config: RunConfig, mu=None) -> CandidateGrid:
    """Candidate dimensions via the exponential scan, the knot scan, or an explicit list."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    j_under, j_max_exp, hard_cap = _res_parameters(n)
    basis_min = config.basis_min()
    shat: dict[int, float] = {}
    warnings_list: list[str] = []

    def shat_at(j: int) -> float:
        if j not in shat:
            _, psi, _, b = _design_for(config, j, x, config.k_factor * j, w)
            shat[j] = compute_shat(psi, b, mu)
        return shat[j]

    if isinstance(config.grid, tuple):
        j_list = [j for j in config.grid]
        for j in j_list:
            if j < basis_min:
                raise InputError(f"explicit grid entry J={j} is below the basis minimum {basis_min}")
            shat_at(j)
        return CandidateGrid(
            mode="explicit",
            j_underbar=j_under,
            j_max_exp=j_max_exp,
            hard_cap=hard_cap,
            j_max_hat=max(j_list),
            j_list=tuple(j_list),
            shat=shat,
        )

    # data-driven stability bound: first J where the noise level overtakes s_J
    j_max_hat = hard_cap
    scan_start = max(j_under + 1, basis_min)
    for j in range(scan_start, hard_cap + 1):
        try:
            s_j = shat_at(j)
        except NumericalError as exc:
            warnings_list.append(f"stability scan stopped at J={j}: {exc}")
            j_max_hat = max(scan_start, j - 1)
            break
        noise = 1.5 * zeta(config.psi_spec(j)) ** 2 * math.sqrt(math.log(j) / n)
        if noise >= s_j:
            j_max_hat = j
            break

    if config.grid == "dyadic":
        raw = [j_under * 2**jj for jj in range(j_max_exp + 1)]
        lifted = sorted({max(j, basis_min) for j in raw})
        j_list = [j for j in lifted if j <= j_max_hat]
    else:  # knots
        j_list = list(range(basis_min, min(j_max_hat, hard_cap) + 1))

    fallback = False
    if not j_list:
        j_list = [basis_min]
        fallback = True
        warnings_list.append(
            f"J_max_hat={j_max_hat} leaves no admissible candidate; falling back to the singleton {{{basis_min}}}"
        )
    for j in j_list:
        shat_at(j)
    return CandidateGrid(
        mode=config.grid,
        j_underbar=j_under,
        j_max_exp=j_max_exp,
        hard_cap=hard_cap,
        j_max_hat=j_max_hat,
        j_list=tuple(j_list),
        shat=shat,
        fallback=fallback,
        warnings=tuple(warnings_list),
    )


def compute_D(restricted_residuals, fit: NpivFit, omega=None) -> float:
    """Centered leave-one-out quadratic form of the restricted residuals.

    Equals 2/(n(n-1)) sum_{i<i'} r_i r_{i'} [Q' Omega Q]_{i i'} with
    Q = sqrt(n) Psi C; may be negative.
    """
    r = np.asarray(restricted_residuals, dtype=float)
    n = fit.n
    if r.shape != (n,):
        raise InputError(f"residual vector must have shape ({n},), got {r.shape}")
    t = fit.coeff_map @ r
    quad = float(t @ fit.gram_weighted @ t)
    col_norms2 = np.sum(fit.scaled_map**2, axis=0)
    loo = float(np.sum(r * r * col_norms2))
    return (quad - loo) / (n - 1)


def compute_vhat(fit: NpivFit, unrestricted_residuals=None, omega=None) -> float:
    """Frobenius norm of the standardized residual-sandwich normalizer."""
    u = fit.residuals if unrestricted_residuals is None else np.asarray(unrestricted_residuals, dtype=float)
    if u.shape != (fit.n,):
        raise InputError(f"residual vector must have shape ({fit.n},), got {u.shape}")
    e = fit.scaled_map * u[None, :]
    return frobenius_norm(e @ e.T)


def gamma_hat(m: ConstraintMatrix | None, restricted: RestrictedFit | None, null_kind: str, j_dim: int) -> int:
    """Chi-square degrees of freedom: active-constraint rank for cones, J for equality nulls."""
    if null_kind == "equality":
        return int(j_dim)
    if null_kind != "inequality":
        raise InputError(f"null_kind must be 'inequality' or 'equality', got {null_kind!r}")
    if restricted is None or restricted.kind != "cone":
        raise InputError("inequality nulls need a cone-restricted fit")
    if m is None or len(restricted.active_set) == 0:
        return 1
    rank = int(np.linalg.matrix_rank(m.rows[restricted.active_set]))
    return max(1, rank)


def eta_hat(alpha: float, grid_size: int, gamma: int) -> float:
    """Bonferroni-adjusted centered chi-square critical value."""
    if grid_size < 1:
        raise InputError(f"grid_size must be >= 1, got {grid_size}")
    q = chisq_quantile(alpha / grid_size, gamma)
    return (q - gamma) / math.sqrt(gamma)


@dataclass(frozen=True)
class _ScanEntry:
    j: int
    k: int
    d_stat: float
    v_stat: float
    s_hat: float
    gamma: int  # chi-square degrees of freedom
    n_active: int
    center: int | None = None  # centering constant of the standardized statistic; defaults to gamma
    d_candidate: float | None = None

    @property
    def centering(self) -> int:
        return self.gamma if self.center is None else self.center


def adaptive_scan(y, x, w, null: NullSpec, config: RunConfig, mu=None, candidate_values=None):
    """Alpha-free part of the test: grid plus per-J statistics.

    candidate_values, when given, are fitted values of a hypothesized function
    at the sample points; each entry then also carries the leave-one-out
    statistic at that candidate (for confidence-set inversion).
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    n = y.shape[0]
    if y.ndim != 1 or x.shape[0] != n or w.shape[0] != n:
        raise InputError("y, x, w must share the number of observations")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
        raise InputError("data contains non-finite values")
    grid = build_grid(x, w, config, mu)
    entries = []
    warnings_list: list[str] = list(grid.warnings)
    for j in grid.j_list:
        try:
            psi_spec, psi, b_specs, b = _design_for(config, j, x, config.k_factor * j, w)
            fit = fit_from_design(y, psi, b, mu=mu, rcond=config.rcond)
            warnings_list.extend(f"J={j}: {msg}" for msg in fit.warnings)
            if null.kind == "shape":
                m = null.constraints(psi_spec)
                rfit = fit_restricted_cone(fit, m)
                gamma = gamma_hat(m, rfit, "inequality", j)
            else:
                model = null.model if null.custom_design is None else null.custom_design
                rfit = fit_restricted_parametric(y, x, w, model, b_specs, mu=mu, rcond=config.rcond)
                gamma = gamma_hat(None, None, "equality", j)
            d_stat = 0.0 if _numerically_zero(rfit.residuals_r, y) else compute_D(rfit.residuals_r, fit)
            v_stat = 0.0 if _numerically_zero(fit.residuals, y) else compute_vhat(fit)
            d_cand = None
            if candidate_values is not None:
                d_cand = compute_D(y - candidate_values, fit)
            entries.append(
                _ScanEntry(
                    j=j,
                    k=fit.k_dim,
                    d_stat=d_stat,
                    v_stat=v_stat,
                    s_hat=grid.shat[j],
                    gamma=gamma,
                    n_active=len(rfit.active_set),
                    d_candidate=d_cand,
                )
            )
        except (InputError, NumericalError) as exc:
            raise type(exc)(f"candidate J={j}: {exc}") from exc
    return grid, entries, warnings_list, n


def _w_statistic(n: int, d_stat: float, v_stat: float, eta: float) -> float:
    if v_stat > 0.0:
        return n * d_stat / (eta * v_stat)
    return math.inf if d_stat > 0.0 else 0.0


def _p_value(n: int, d_stat: float, v_stat: float, gamma: int, center: int) -> float:
    if v_stat > 0.0:
        ratio = n * d_stat / v_stat
        return chisq_sf(math.sqrt(center) * ratio + center, gamma)
    return 0.0 if d_stat > 0.0 else 1.0


def decide(grid: CandidateGrid, entries, n: int, null: NullSpec, alpha: float, config: RunConfig,
           statistic: str = "structural", warnings: Sequence[str] = ()) -> TestReport:
    """Apply the level-alpha decision rule to scanned statistics."""
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must be in (0, 1), got {alpha}")
    size = grid.size
    records = []
    for e in entries:
        center = e.centering
        q = chisq_quantile(alpha / size, e.gamma)
        eta = (q - center) / math.sqrt(center)
        if eta <= 0.0:
            raise InputError(
                f"critical value eta <= 0 at J={e.j} (alpha/{size} too large for gamma={e.gamma}); "
                "use a smaller alpha"
            )
        records.append(
            CandidateRecord(
                j=e.j,
                k=e.k,
                d_stat=e.d_stat,
                v_stat=e.v_stat,
                s_hat=e.s_hat,
                gamma=e.gamma,
                eta=eta,
                w_stat=_w_statistic(n, e.d_stat, e.v_stat, eta),
                p_value=_p_value(n, e.d_stat, e.v_stat, e.gamma, center),
                n_active=e.n_active,
            )
        )
    rejecting = [rec.j for rec in records if rec.w_stat > 1.0]
    reject = len(rejecting) > 0
    if reject:
        j_reported = min(rejecting)  # early stopping
        selected = tuple(rejecting)
    else:
        best = max(records, key=lambda rec: (rec.w_stat, -rec.j))
        j_reported = best.j
        selected = (best.j,)
    return TestReport(
        statistic=statistic,
        null=null.describe() if isinstance(null, NullSpec) else str(null),
        alpha=alpha,
        grid=grid,
        per_j=tuple(records),
        reject=reject,
        j_reported=j_reported,
        j_selected_set=selected,
        p_value=min(rec.p_value for rec in records),
        p_threshold=alpha / size,
        config=config.to_dict(),
        warnings=tuple(warnings),
    )


def adaptive_test(y, x, w, null: NullSpec, alpha: float = 0.05, config: RunConfig | None = None, mu=None) -> TestReport:
    """Run the adaptive restriction test at level alpha."""
    if config is None:
        config = RunConfig(alpha=alpha)
    grid, entries, warn, n = adaptive_scan(y, x, w, null, config, mu)
    return decide(grid, entries, n, null, alpha, config, warnings=warn)


def _candidate_on_sample(candidate, x, config: RunConfig, null: NullSpec):
    """Fitted values of the hypothesized function at the sample, plus a cone feasibility check."""
    x = np.asarray(x, dtype=float)
    if callable(candidate):
        values = np.asarray(candidate(x), dtype=float)
        if null.kind == "shape" and null.shape in _SHAPE_KINDS:
            lo, hi = config.support
            grid_x = np.linspace(lo, hi, 1001)
            f = np.asarray(candidate(grid_x), dtype=float)
            scale = 1e-8 * (1.0 + float(np.max(np.abs(f))))
            diffs = np.diff(f) if null.shape in ("decreasing", "increasing") else np.diff(f, 2)
            sign = 1.0 if null.shape in ("decreasing", "concave") else -1.0
            if np.any(sign * diffs > scale):
                raise InputError(f"candidate function violates the {null.shape} restriction")
    elif isinstance(candidate, tuple) and len(candidate) == 2:
        coeffs, spec = candidate
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (spec.dim,):
            raise InputError(f"candidate coefficients must have shape ({spec.dim},), got {coeffs.shape}")
        if null.kind == "shape":
            m = null.constraints(spec)
            slack = m.rows @ coeffs
            tol = 1e-8 * (1.0 + np.linalg.norm(coeffs) * np.linalg.norm(m.rows, axis=1))
            if np.any(slack > tol):
                raise InputError(f"candidate coefficients violate the {m.kind} cone restriction")
        values = eval_design(spec, x) @ coeffs
    else:
        values = np.asarray(candidate, dtype=float)
        if values.shape != (x.shape[0],):
            raise InputError(
                "candidate must be callable, a (coeffs, BasisSpec) pair, or a vector of fitted values"
            )
    if not np.all(np.isfinite(values)):
        raise InputError("candidate values are non-finite on the sample")
    return values


def cs_contains(candidate, y, x, w, alpha: float = 0.05, config: RunConfig | None = None,
                null: NullSpec | None = None, mu=None):
    """Membership of a hypothesized function in the L2 confidence set.

    Returns (contained, binding_j, report-like dict). The per-J machinery
    (grid, normalizer, active-rank calibration) is the test's own; only the
    residuals inside the leave-one-out statistic are swapped for the
    candidate's. A candidate violating a cone null is an input error.
    """
    if config is None:
        config = RunConfig(alpha=alpha)
    if null is None:
        null = NullSpec(kind="parametric", model="linear")
    values = _candidate_on_sample(candidate, x, config, null)
    grid, entries, _, n = adaptive_scan(y, x, w, null, config, mu, candidate_values=values)
    size = grid.size
    binding = None
    per_j = []
    contained = True
    for e in entries:
        eta = eta_hat(alpha, size, e.gamma)
        if eta <= 0.0:
            raise InputError(f"critical value eta <= 0 at J={e.j}; use a smaller alpha")
        ok = n * e.d_candidate <= eta * e.v_stat
        per_j.append({"J": e.j, "D_candidate": e.d_candidate, "v": e.v_stat, "eta": eta, "contained": ok})
        if not ok and binding is None:
            binding = e.j
            contained = False
    return contained, binding, {"alpha": alpha, "J_list": list(grid.j_list), "per_J": per_j}


def image_space_scan(y, x, w, model, config: RunConfig):
    """Alpha-free part of the instrument-space test: grid over K plus statistics.

    The statistic projects null-restricted residuals on the instrument sieve
    itself; the candidate set scans the instrument dimension K with its own
    empirical stability bound, and the chi-square calibration uses K degrees
    of freedom.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    n = y.shape[0]
    if y.ndim != 1 or x.shape[0] != n or w.shape[0] != n:
        raise InputError("y, x, w must share the number of observations")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
        raise InputError("data contains non-finite values")
    null = NullSpec(kind="parametric", model=model if isinstance(model, str) else None,
                    custom_design=None if isinstance(model, str) else model)
    d_w = 1 if w.ndim == 1 else w.shape[1]
    k_under, k_max_exp, hard_cap = _res_parameters(n)
    basis_min = config.basis_min()

    def b_design(k_target: int):
        specs = config.instrument_specs(k_target, d_w, w if config.knot_rule == "quantile" else None)
        if isinstance(specs, BasisSpec):
            return specs, eval_design(specs, w)
        return specs, tensor_design(specs, w)

    smin_cache: dict[int, tuple[int, float, np.ndarray]] = {}

    def scan_at(k_raw: int):
        if k_raw not in smin_cache:
            specs, b = b_design(k_raw)
            gb = b.T @ b / n
            evals = np.linalg.eigvalsh(0.5 * (gb + gb.T))
            if evals[-1] <= 0:
                raise NumericalError("instrument gram B'B is numerically singular")
            smin = 1.0 / math.sqrt(float(evals[-1]))  # s_min((B'B/n)^{-1/2})
            smin_cache[k_raw] = (b.shape[1], smin, b)
        return smin_cache[k_raw]

    k_max_hat = hard_cap
    for k in range(max(k_under + 1, basis_min), hard_cap + 1):
        realized, smin, _ = scan_at(k)
        noise = 1.5 * zeta(config.psi_spec(max(realized, basis_min)), dim=realized) ** 2 * math.sqrt(
            math.log(realized) / n
        )
        if noise >= smin:
            k_max_hat = k
            break

    raw = [k_under * 2**kk for kk in range(k_max_exp + 1)]
    lifted = sorted({max(k, basis_min) for k in raw})
    k_list = [k for k in lifted if k <= k_max_hat]
    fallback = False
    if not k_list:
        k_list, fallback = [basis_min], True

    entries = []
    shat: dict[int, float] = {}
    warnings_list: list[str] = []
    seen_dims: set[int] = set()
    for k_raw in k_list:
        realized, smin, b = scan_at(k_raw)
        if realized in seen_dims:
            continue
        seen_dims.add(realized)
        if n <= realized:
            raise InputError(f"candidate K={realized}: need n > K, got n={n}")
        model_arg = null.model if null.custom_design is None else null.custom_design
        rfit = fit_restricted_parametric(y, x, w, model_arg, b, rcond=config.rcond)
        r = rfit.residuals_r
        if _numerically_zero(r, y):
            d_stat, v_stat = 0.0, 0.0
        else:
            u_b = orthonormal_range(b, config.rcond)
            proj = u_b.T @ r
            row_norms2 = np.sum(u_b**2, axis=1)
            d_stat = (float(proj @ proj) - float(np.sum(r * r * row_norms2))) / (n - 1)
            hb = sym_inv_sqrt(b.T @ b)
            e_mat = (hb @ b.T) * r[None, :]
            v_stat = frobenius_norm(e_mat @ e_mat.T)
        shat[realized] = smin
        # chi-square df nets out the parameters the restricted fit consumed
        # inside the instrument projection; centering stays at K
        entries.append(
            _ScanEntry(j=realized, k=realized, d_stat=d_stat, v_stat=v_stat, s_hat=smin,
                       gamma=max(1, realized - rfit.df_consumed), n_active=0, center=realized)
        )
    grid = CandidateGrid(
        mode="dyadic",
        j_underbar=k_under,
        j_max_exp=k_max_exp,
        hard_cap=hard_cap,
        j_max_hat=k_max_hat,
        j_list=tuple(e.j for e in entries),
        shat=shat,
        fallback=fallback,
        warnings=tuple(warnings_list),
    )
    return grid, entries, warnings_list, n, null


def image_space_test(y, x, w, model, alpha: float = 0.05, config: RunConfig | None = None) -> TestReport:
    """Run the adaptive instrument-space test of a parametric null at level alpha."""
    if config is None:
        config = RunConfig(alpha=alpha)
    grid, entries, warn, n, null = image_space_scan(y, x, w, model, config)
    return decide(grid, entries, n, null, alpha, config, statistic="image-space", warnings=warn)
