"""Functions on [0,1]: evaluation, grids, quadrature, L_p and Sobolev norms.

Everything downstream (operator families, smoothness moduli, bound checks)
consumes the Func1D/Grid types and the norm machinery defined here.  All
types are immutable and all operations are pure, so concurrent readers
need no coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

INF = math.inf

# Admissible smoothness tags, ordered smoothest to roughest.
SMOOTHNESS_CLASSES = ("Winf2", "Wp2", "C0", "Lp", "L1")

# Finite-difference step: central stencils, one-sided at the boundary.
FD_STEP = 1e-4

_MAX_FD_ORDER = 3

Evaluator = Callable[[np.ndarray], np.ndarray]


class EvaluationError(ValueError):
    """A function produced a non-finite value at a quadrature node."""


def _as_array(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


def _roughest(a: str, b: str) -> str:
    return max(a, b, key=SMOOTHNESS_CLASSES.index)


def _merge_kinks(a, b) -> tuple[float, ...]:
    return tuple(sorted(set(a) | set(b)))


@dataclass(frozen=True)
class Func1D:
    """An evaluable real function on [0,1].

    ``eval_fn`` must accept numpy arrays (vectorised evaluation).
    ``derivatives`` holds analytic evaluators for f', f'', f''' in that
    order; absent orders fall back to finite differences.  ``kinks``
    lists known non-smooth interior points; quadrature inserts them as
    nodes.  Instances are immutable and support ``f + g``, ``f + c``,
    ``c * f``, ``-f`` and ``abs(f)``.
    """

    id: str
    eval_fn: Evaluator
    derivatives: tuple[Evaluator, ...] = ()
    kinks: tuple[float, ...] = ()
    smoothness_class: str = "C0"

    def __post_init__(self):
        object.__setattr__(self, "derivatives", tuple(self.derivatives))
        object.__setattr__(self, "kinks", tuple(float(k) for k in self.kinks))
        if self.smoothness_class not in SMOOTHNESS_CLASSES:
            raise ValueError(
                f"unknown smoothness class {self.smoothness_class!r}; "
                f"expected one of {SMOOTHNESS_CLASSES}"
            )
        if len(self.derivatives) > _MAX_FD_ORDER:
            raise ValueError("at most 3 analytic derivatives are supported")
        ks = self.kinks
        if any(not 0.0 < k < 1.0 for k in ks):
            raise ValueError(f"kinks must lie strictly inside (0,1): {ks}")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError(f"kinks must be strictly increasing: {ks}")

    def __call__(self, x):
        arr = _as_array(x)
        out = np.asarray(self.eval_fn(arr), dtype=float)
        if arr.ndim == 0:
            return float(out.reshape(-1)[0])
        if out.shape != arr.shape:
            out = np.broadcast_to(out, arr.shape).copy()
        return out

    # -- pointwise algebra ------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Func1D):
            f, g = self.eval_fn, other.eval_fn
            nder = min(len(self.derivatives), len(other.derivatives))
            ders = tuple(
                (lambda x, a=da, b=db: np.asarray(a(x), float) + np.asarray(b(x), float))
                for da, db in zip(self.derivatives[:nder], other.derivatives[:nder])
            )
            return Func1D(
                id=f"({self.id}+{other.id})",
                eval_fn=lambda x: np.asarray(f(x), float) + np.asarray(g(x), float),
                derivatives=ders,
                kinks=_merge_kinks(self.kinks, other.kinks),
                smoothness_class=_roughest(self.smoothness_class, other.smoothness_class),
            )
        alpha = float(other)
        f = self.eval_fn
        return Func1D(
            id=f"({self.id}+{alpha:g})",
            eval_fn=lambda x: np.asarray(f(x), float) + alpha,
            derivatives=self.derivatives,
            kinks=self.kinks,
            smoothness_class=self.smoothness_class,
        )

    __radd__ = __add__

    def __mul__(self, c):
        c = float(c)
        f = self.eval_fn
        ders = tuple(
            (lambda x, d=d: c * np.asarray(d(x), float)) for d in self.derivatives
        )
        return Func1D(
            id=f"({c:g}*{self.id})",
            eval_fn=lambda x: c * np.asarray(f(x), float),
            derivatives=ders,
            kinks=self.kinks,
            smoothness_class=self.smoothness_class,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, Func1D) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __abs__(self):
        f = self.eval_fn
        # Sign changes of f are not tracked, so no analytic derivatives.
        return Func1D(
            id=f"|{self.id}|",
            eval_fn=lambda x: np.abs(np.asarray(f(x), float)),
            derivatives=(),
            kinks=self.kinks,
            smoothness_class=self.smoothness_class,
        )


@dataclass(frozen=True)
class Grid:
    """Uniform partition of [0,1] into m subintervals with nodes k/m."""

    m: int = 4096

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError(f"grid needs m >= 2 subintervals, got {self.m}")

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.m + 1) / self.m


DEFAULT_GRID = Grid(4096)


def quadrature_nodes(grid: Grid, extra=(), lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Quadrature nodes on [lo,hi]: the uniform grid plus interior extras."""
    if lo == 0.0 and hi == 1.0:
        base = grid.nodes
    else:
        base = np.linspace(lo, hi, grid.m + 1)
    inner = [float(k) for k in extra if lo < k < hi]
    if not inner:
        return base
    return np.unique(np.concatenate([base, inner]))


def _check_p(p) -> float:
    p = float(p)
    if p != INF and p < 1.0:
        raise ValueError(f"exponent p must satisfy p >= 1 or p = inf, got {p}")
    return p


def norm_from_samples(nodes: np.ndarray, values: np.ndarray, p) -> float:
    """Grid L_p norm: composite trapezoid of |v|^p, max |v| for p = inf."""
    p = _check_p(p)
    a = np.abs(values)
    if p == INF:
        return float(a.max()) if a.size else 0.0
    if nodes.size < 2:
        return 0.0
    return float(np.trapezoid(a**p, nodes) ** (1.0 / p))


def lp_norm(f: Func1D, p, grid: Grid | None = None) -> float:
    """L_p([0,1]) norm of f, with the grid refined at declared kinks.

    Finite p uses the composite trapezoid rule; p = inf takes the maximum
    of |f| over the nodes.
    """
    grid = DEFAULT_GRID if grid is None else grid
    _check_p(p)
    nodes = quadrature_nodes(grid, f.kinks)
    vals = f(nodes)
    finite = np.isfinite(vals)
    if not finite.all():
        bad = nodes[~finite][0]
        raise EvaluationError(f"{f.id} is not finite at node x={bad!r}")
    return norm_from_samples(nodes, vals, p)


def _finite_difference(u: Evaluator, gap: int, x) -> np.ndarray:
    """Order-``gap`` difference quotient of u, one-sided near the boundary."""
    xs = _as_array(np.atleast_1d(x))
    h = FD_STEP
    out = np.empty_like(xs)

    def fill(mask, coeffs, shifts, denom):
        if not mask.any():
            return
        pts = xs[mask]
        acc = np.zeros_like(pts)
        for c, s in zip(coeffs, shifts):
            acc += c * np.asarray(u(pts + s * h), float)
        out[mask] = acc / denom

    if gap == 1:
        left = xs < h
        right = xs > 1.0 - h
        mid = ~(left | right)
        fill(mid, (1.0, -1.0), (1, -1), 2 * h)
        fill(left, (-3.0, 4.0, -1.0), (0, 1, 2), 2 * h)
        fill(right, (3.0, -4.0, 1.0), (0, -1, -2), 2 * h)
    elif gap == 2:
        left = xs < h
        right = xs > 1.0 - h
        mid = ~(left | right)
        fill(mid, (1.0, -2.0, 1.0), (1, 0, -1), h * h)
        fill(left, (2.0, -5.0, 4.0, -1.0), (0, 1, 2, 3), h * h)
        fill(right, (2.0, -5.0, 4.0, -1.0), (0, -1, -2, -3), h * h)
    elif gap == 3:
        left = xs < 2 * h
        right = xs > 1.0 - 2 * h
        mid = ~(left | right)
        h3 = h**3
        fill(mid, (1.0, -2.0, 2.0, -1.0), (2, 1, -1, -2), 2 * h3)
        fill(left, (1.0, -3.0, 3.0, -1.0), (3, 2, 1, 0), h3)
        fill(right, (1.0, -3.0, 3.0, -1.0), (0, -1, -2, -3), h3)
    else:
        raise ValueError(f"unsupported finite-difference order {gap}")
    if np.ndim(x) == 0:
        return float(out[0])
    return out


def derivative_callable(f: Func1D, order: int) -> Evaluator:
    """Evaluator for the order-th derivative of f on [0,1].

    Uses analytic derivatives when declared, otherwise finite differences
    applied to the highest declared derivative.  Orders above 3 require
    analytic derivatives throughout.
    """
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    if order == 0:
        return lambda x: f(_as_array(x))
    if order <= len(f.derivatives):
        g = f.derivatives[order - 1]
        return lambda x: np.asarray(g(_as_array(x)), float)
    if order > _MAX_FD_ORDER:
        raise ValueError(
            f"unsupported derivative order {order}: finite-difference fallback "
            f"stops at order {_MAX_FD_ORDER} and {f.id} declares only "
            f"{len(f.derivatives)} analytic derivatives"
        )
    base_order = len(f.derivatives)
    base = f.eval_fn if base_order == 0 else f.derivatives[base_order - 1]
    gap = order - base_order

    def u(x):
        return np.asarray(base(_as_array(x)), float)

    return lambda x: _finite_difference(u, gap, x)


def sobolev_norm(f: Func1D, r: int, p, grid: Grid | None = None) -> float:
    """max_{j<=r} of the L_p norms of f and its derivatives up to order r."""
    grid = DEFAULT_GRID if grid is None else grid
    _check_p(p)
    if r < 0:
        raise ValueError("Sobolev order r must be >= 0")
    nodes = quadrature_nodes(grid, f.kinks)
    worst = 0.0
    for j in range(r + 1):
        vals = np.asarray(derivative_callable(f, j)(nodes), float)
        finite = np.isfinite(vals)
        if not finite.all():
            bad = nodes[~finite][0]
            raise EvaluationError(
                f"derivative {j} of {f.id} is not finite at node x={bad!r}"
            )
        worst = max(worst, norm_from_samples(nodes, vals, p))
    return worst


# -- built-in test functions ----------------------------------------------


def _const(c: float) -> Evaluator:
    return lambda x: np.full_like(np.asarray(x, float), c)


E0 = Func1D("e0", _const(1.0), derivatives=(_const(0.0),) * 3, smoothness_class="Winf2")
E1 = Func1D(
    "e1",
    lambda x: np.asarray(x, float) * 1.0,
    derivatives=(_const(1.0), _const(0.0), _const(0.0)),
    smoothness_class="Winf2",
)
E2 = Func1D(
    "e2",
    lambda x: np.asarray(x, float) ** 2,
    derivatives=(lambda x: 2.0 * np.asarray(x, float), _const(2.0), _const(0.0)),
    smoothness_class="Winf2",
)
NEG_E1 = Func1D(
    "neg_e1",
    lambda x: -np.asarray(x, float),
    derivatives=(_const(-1.0), _const(0.0), _const(0.0)),
    smoothness_class="Winf2",
)

_EXPX = Func1D(
    "expx",
    np.exp,
    derivatives=(np.exp, np.exp, np.exp),
    smoothness_class="Winf2",
)

# C^1 but not C^2: |x-1/2|^{3/2}; second derivative blows up at the centre.
_POW32 = Func1D(
    "pow32",
    lambda x: np.abs(np.asarray(x, float) - 0.5) ** 1.5,
    derivatives=(
        lambda x: 1.5
        * np.sign(np.asarray(x, float) - 0.5)
        * np.sqrt(np.abs(np.asarray(x, float) - 0.5)),
    ),
    kinks=(0.5,),
    smoothness_class="Wp2",
)

_ABS_HALF = Func1D(
    "abs_half",
    lambda x: np.abs(np.asarray(x, float) - 0.5),
    kinks=(0.5,),
    smoothness_class="C0",
)

# Value at the jump is the upper level, so cell suprema are attained at
# sampled points.
_STEP = Func1D(
    "step",
    lambda x: np.where(np.asarray(x, float) >= 0.6, 1.0, 0.0),
    kinks=(0.6,),
    smoothness_class="Lp",
)


def make_test_suite() -> list[Func1D]:
    """The standard function corpus used across the experiment harness."""
    return [E0, E1, E2, NEG_E1, _EXPX, _POW32, _ABS_HALF, _STEP]


def suite_by_id() -> dict[str, Func1D]:
    return {f.id: f for f in make_test_suite()}
