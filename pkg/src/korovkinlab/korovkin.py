"""Defect indices, bound evaluators and convergence-rate estimation.

The quantitative statements under test all have the shape
``||T_n f - f||_p <= K * rhs_core`` with an absolute constant K that is
never given numerically; the harness evaluates rhs_core with constant 1,
fits K empirically over a degree sweep and checks that the fit is stable
in n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .funcspace import (
    DEFAULT_GRID,
    E0,
    E1,
    E2,
    INF,
    NEG_E1,
    Func1D,
    Grid,
    _check_p,
    lp_norm,
    norm_from_samples,
    quadrature_nodes,
    sobolev_norm,
)
from .operators import (
    DEFAULT_CHOQUET_SAMPLES,
    DEFAULT_SUP_SAMPLES,
    OperatorSpec,
    apply,
    operator_moment_profiles,
)
from .smoothness import modulus

THEOREM_IDS = ("thm1", "thm2i", "thm2ii", "thmfinal", "corollary", "sec6_max", "sec6_sup")

KOROVKIN_TEST_FUNCTIONS = (E0, E1, NEG_E1, E2)

_ZERO = 1e-13  # noise floor distinguishing "zero" errors from real ones


class InsufficientDataError(ValueError):
    """Fewer than four usable points for a rate fit."""


@dataclass(frozen=True)
class KorovkinIndices:
    """Defect quantities of one (operator, n, p) combination."""

    lambda_p: float
    mu_n: float
    t_np: float
    s_np: float
    n: int
    p: float


@dataclass(frozen=True)
class BoundPoint:
    """One (theorem, operator, n, function, p) cell: measured error and
    the theorem's bracketed bound expression with constant 1."""

    theorem_id: str
    n: int
    lhs: float
    rhs_core: float

    @property
    def ratio(self) -> float | None:
        if self.rhs_core > 0.0:
            return self.lhs / self.rhs_core
        return None


@dataclass(frozen=True)
class BoundReport:
    """A degree sweep of one theorem cell plus its fitted constant."""

    theorem_id: str
    operator: str
    function: str
    p: float
    points: tuple[BoundPoint, ...]
    fitted_constant: float
    rate_slope: float | None
    hard_failures: tuple[int, ...]


@dataclass(frozen=True)
class StabilityCheck:
    first_quartile_max: float
    last_quartile_max: float
    ok: bool


@dataclass(frozen=True)
class Section6Result:
    """Slack of the two final-remark comparison chains at one degree."""

    n: int
    max_error: float
    pair_max: float
    pair_sum: float
    sup_deviation: float
    sup_omega: float

    @property
    def max_chain_slacks(self) -> tuple[float, float]:
        return (self.pair_max - self.max_error, self.pair_sum - self.pair_max)

    @property
    def max_chain_ok(self) -> bool:
        return min(self.max_chain_slacks) >= -1e-8

    @property
    def sup_slack(self) -> float:
        return self.sup_omega - self.sup_deviation

    @property
    def sup_chain_ok(self) -> bool:
        return self.sup_slack >= -1e-8


@lru_cache(maxsize=512)
def _error_curve(op: OperatorSpec, f: Func1D, grid: Grid, sup_samples: int, choquet_samples: int):
    nodes = quadrature_nodes(grid, f.kinks)
    tvals = apply(op, f, nodes, sup_samples=sup_samples, choquet_samples=choquet_samples)
    diff = f(nodes) - tvals
    diff.flags.writeable = False
    nodes = np.array(nodes)
    nodes.flags.writeable = False
    return nodes, diff


def measure_error(
    op: OperatorSpec,
    f: Func1D,
    p,
    grid: Grid | None = None,
    *,
    sup_samples: int = DEFAULT_SUP_SAMPLES,
    choquet_samples: int = DEFAULT_CHOQUET_SAMPLES,
) -> float:
    """||f - T(f)||_p on the grid (refined at the kinks of f)."""
    grid = DEFAULT_GRID if grid is None else grid
    _check_p(p)
    nodes, diff = _error_curve(op, f, grid, sup_samples, choquet_samples)
    return norm_from_samples(nodes, diff, p)


@lru_cache(maxsize=128)
def _moment_profiles(op: OperatorSpec, grid: Grid, sup_samples: int, choquet_samples: int):
    nodes = grid.nodes
    abs_prof, sec_prof = operator_moment_profiles(
        op, nodes, sup_samples=sup_samples, choquet_samples=choquet_samples
    )
    abs_prof.flags.writeable = False
    sec_prof.flags.writeable = False
    return nodes, abs_prof, sec_prof


def lambda_defect(
    op: OperatorSpec,
    p,
    grid: Grid | None = None,
    *,
    sup_samples: int = DEFAULT_SUP_SAMPLES,
    choquet_samples: int = DEFAULT_CHOQUET_SAMPLES,
) -> float:
    """Largest L_p defect of T on the test functions e0, e1, -e1, e2."""
    grid = DEFAULT_GRID if grid is None else grid
    kwargs = dict(sup_samples=sup_samples, choquet_samples=choquet_samples)
    return max(measure_error(op, f, p, grid, **kwargs) for f in KOROVKIN_TEST_FUNCTIONS)


def compute_indices(
    op: OperatorSpec,
    p,
    grid: Grid | None = None,
    *,
    sup_samples: int = DEFAULT_SUP_SAMPLES,
    choquet_samples: int = DEFAULT_CHOQUET_SAMPLES,
) -> KorovkinIndices:
    """lambda_p, mu_n, t_np and s_np of one (operator, n, p)."""
    grid = DEFAULT_GRID if grid is None else grid
    p = float(p)
    _check_p(p)
    if grid.m < 1024:
        raise ValueError(f"index computation needs grid m >= 1024, got {grid.m}")
    kwargs = dict(sup_samples=sup_samples, choquet_samples=choquet_samples)
    e0_defect = measure_error(op, E0, p, grid, **kwargs)
    lam = lambda_defect(op, p, grid, **kwargs)
    nodes, abs_prof, sec_prof = _moment_profiles(op, grid, sup_samples, choquet_samples)
    mu_n = float(sec_prof.max())
    t_np = math.sqrt(max(e0_defect, norm_from_samples(nodes, abs_prof, p), mu_n))
    s_np = math.sqrt(
        max(e0_defect, norm_from_samples(nodes, np.sqrt(sec_prof), p), mu_n)
    )
    return KorovkinIndices(lambda_p=lam, mu_n=mu_n, t_np=t_np, s_np=s_np, n=op.n, p=p)


def check_compatibility(theorem_id: str, op_kind: str, f: Func1D, p) -> str | None:
    """Reason the (theorem, operator, f, p) combination is invalid, or None."""
    p = float(p)
    if theorem_id not in THEOREM_IDS:
        return f"unknown theorem id {theorem_id!r}"
    if theorem_id == "thm1":
        if len(f.derivatives) < 2:
            return f"thm1 needs two analytic derivatives (W^2_inf), {f.id} has {len(f.derivatives)}"
    elif theorem_id == "thm2i":
        if p != INF:
            return f"thm2i is stated in the sup norm, got p={p}"
        if f.smoothness_class in ("Lp", "L1"):
            return f"thm2i needs a continuous function, {f.id} is {f.smoothness_class}"
    elif theorem_id == "thm2ii":
        if p != 1.0:
            return f"thm2ii is stated for p=1, got p={p}"
    elif theorem_id in ("thmfinal", "corollary"):
        if not 1.0 < p < INF:
            return f"{theorem_id} covers 1 < p < inf, got p={p}"
    elif theorem_id == "sec6_max":
        if op_kind != "max-bernstein":
            return f"sec6_max compares the max-bernstein chain, got {op_kind}"
    elif theorem_id == "sec6_sup":
        if op_kind != "sup-bernstein":
            return f"sec6_sup compares the sup-bernstein deviation, got {op_kind}"
        if p != INF:
            return f"sec6_sup is a sup-norm comparison, got p={p}"
    return None


def _clamped_modulus(f: Func1D, r: int, p, delta: float, grid: Grid) -> float:
    # The admissible set of the difference is empty beyond h = 1/r, so the
    # modulus is constant there; clamping keeps the bound conservative.
    delta = min(delta, 1.0 / r)
    if delta <= 0.0:
        return 0.0
    return modulus(f, r, p, delta, grid)


def theorem_bound(
    theorem_id: str,
    op: OperatorSpec,
    f: Func1D,
    p,
    grid: Grid | None = None,
    *,
    sup_samples: int = DEFAULT_SUP_SAMPLES,
    choquet_samples: int = DEFAULT_CHOQUET_SAMPLES,
) -> BoundPoint:
    """Measured error and constant-1 bound expression for one cell."""
    grid = DEFAULT_GRID if grid is None else grid
    p = float(p)
    _check_p(p)
    reason = check_compatibility(theorem_id, op.kind, f, p)
    if reason is not None:
        raise ValueError(reason)
    kwargs = dict(sup_samples=sup_samples, choquet_samples=choquet_samples)

    if theorem_id in ("sec6_max", "sec6_sup"):
        res = section6_comparisons(op.n, f, p, grid, **kwargs)
        if theorem_id == "sec6_max":
            return BoundPoint(theorem_id, op.n, res.max_error, res.pair_sum)
        return BoundPoint(theorem_id, op.n, res.sup_deviation, res.sup_omega)

    lhs = measure_error(op, f, p, grid, **kwargs)
    if theorem_id == "thm1":
        rhs = sobolev_norm(f, 2, INF, grid) * lambda_defect(op, p, grid, **kwargs)
    elif theorem_id == "thm2i":
        lam = lambda_defect(op, INF, grid, **kwargs)
        rhs = lp_norm(f, INF, grid) * lam + _clamped_modulus(f, 2, INF, math.sqrt(lam), grid)
    elif theorem_id == "thm2ii":
        lam = lambda_defect(op, 1.0, grid, **kwargs)
        rhs = lp_norm(f, 1.0, grid) * lam + _clamped_modulus(f, 3, 1.0, lam ** (1.0 / 3.0), grid)
    else:
        idx = compute_indices(op, p, grid, **kwargs)
        scale = idx.t_np if theorem_id == "thmfinal" else idx.s_np
        rhs = scale**2 * lp_norm(f, p, grid) + _clamped_modulus(f, 2, p, scale, grid)
    return BoundPoint(theorem_id, op.n, lhs, rhs)


def rate_estimate(errors) -> float:
    """Least-squares slope of log(error) against log(n).

    Points with nonpositive error are filtered; fewer than four survivors
    raise InsufficientDataError.
    """
    pts = [(int(n), float(e)) for n, e in errors]
    if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
        raise ValueError("degrees must be strictly increasing")
    pts = [(n, e) for n, e in pts if e > 0.0]
    if len(pts) < 4:
        raise InsufficientDataError(
            f"rate estimation needs at least 4 positive errors, got {len(pts)}"
        )
    ns = np.log([n for n, _ in pts])
    es = np.log([e for _, e in pts])
    return float(np.polyfit(ns, es, 1)[0])


def sweep_bound(
    theorem_id: str,
    kind: str,
    degrees,
    f: Func1D,
    p,
    grid: Grid | None = None,
    **kwargs,
) -> BoundReport:
    """Run one theorem cell over a degree sweep and fit its constant."""
    points = tuple(
        theorem_bound(theorem_id, OperatorSpec(kind, int(n)), f, p, grid, **kwargs)
        for n in degrees
    )
    ratios = [pt.ratio for pt in points if pt.ratio is not None]
    fitted = max(ratios, default=0.0)
    hard = tuple(pt.n for pt in points if pt.lhs > _ZERO and pt.rhs_core <= 0.0)
    try:
        slope = rate_estimate([(pt.n, pt.lhs) for pt in points])
    except (InsufficientDataError, ValueError):
        slope = None
    return BoundReport(
        theorem_id=theorem_id,
        operator=kind,
        function=f.id,
        p=float(p),
        points=points,
        fitted_constant=fitted,
        rate_slope=slope,
        hard_failures=hard,
    )


def stability_check(report: BoundReport, factor: float = 1.25, eps: float = 1e-9) -> StabilityCheck:
    """Last-quartile max ratio must not exceed ``factor`` times the first's.

    Points with identically zero error are excluded: they satisfy any
    constant and say nothing about its stability.  The small additive eps
    masks float noise on the remaining cells.
    """
    ratios = [pt.ratio for pt in report.points if pt.ratio is not None and pt.lhs > _ZERO]
    if not ratios:
        return StabilityCheck(0.0, 0.0, True)
    k = max(1, math.ceil(len(ratios) / 4))
    first = max(ratios[:k])
    last = max(ratios[-k:])
    return StabilityCheck(first, last, last <= factor * first + eps)


def section6_comparisons(
    n: int,
    f: Func1D,
    p,
    grid: Grid | None = None,
    *,
    sup_samples: int = DEFAULT_SUP_SAMPLES,
    choquet_samples: int = DEFAULT_CHOQUET_SAMPLES,
) -> Section6Result:
    """The two final-remark comparison chains, evaluated numerically.

    (1) ||max(B_n,B_{n+1})f - f||_p <= max of the individual errors <= their sum;
    (2) ||T_n f - B_n f||_inf <= omega_1(f; 1/(n+1)) for the sup operator.
    """
    grid = DEFAULT_GRID if grid is None else grid
    p = float(p)
    _check_p(p)
    kwargs = dict(sup_samples=sup_samples, choquet_samples=choquet_samples)

    err_max = measure_error(OperatorSpec("max-bernstein", n), f, p, grid, **kwargs)
    err_n = measure_error(OperatorSpec("bernstein", n), f, p, grid, **kwargs)
    err_n1 = measure_error(OperatorSpec("bernstein", n + 1), f, p, grid, **kwargs)

    nodes = quadrature_nodes(grid, f.kinks)
    sup_vals = apply(OperatorSpec("sup-bernstein", n), f, nodes, **kwargs)
    b_vals = apply(OperatorSpec("bernstein", n), f, nodes, **kwargs)
    deviation = float(np.abs(sup_vals - b_vals).max())
    omega = modulus(f, 1, INF, 1.0 / (n + 1), grid)

    return Section6Result(
        n=n,
        max_error=err_max,
        pair_max=max(err_n, err_n1),
        pair_sum=err_n + err_n1,
        sup_deviation=deviation,
        sup_omega=omega,
    )
