"""Forward differences, L_p moduli of smoothness and a K-functional
upper-bound estimator.

The modulus integrates the r-th forward difference over the admissible
set [0, 1-rh] (nothing is extrapolated); only the Steklov means extend
the function constantly beyond [0,1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .funcspace import (
    DEFAULT_GRID,
    Func1D,
    Grid,
    _as_array,
    _check_p,
    derivative_callable,
    lp_norm,
    norm_from_samples,
    quadrature_nodes,
)

DEFAULT_H_STEPS = 64
STEKLOV_QUAD_POINTS = 256


@dataclass(frozen=True)
class ModulusQuery:
    """Parameters of omega_{r,p}(f; delta)."""

    r: int
    p: float
    delta: float

    def __post_init__(self):
        if self.r not in (1, 2, 3):
            raise ValueError(f"difference order r must be 1, 2 or 3, got {self.r}")
        _check_p(self.p)
        if not 0.0 < self.delta <= 1.0 / self.r:
            raise ValueError(
                f"step bound delta must satisfy 0 < delta <= 1/r = {1.0 / self.r}, "
                f"got {self.delta}"
            )


def forward_difference(f: Func1D, r: int, h: float, x):
    """r-th forward difference sum_j (-1)^j C(r,j) f(x + (r-j)h)."""
    if r not in (1, 2, 3):
        raise ValueError(f"difference order r must be 1, 2 or 3, got {r}")
    xs = _as_array(x)
    far = xs + r * h
    lo = min(float(np.min(xs)), float(np.min(far)))
    hi = max(float(np.max(xs)), float(np.max(far)))
    if lo < -1e-12 or hi > 1.0 + 1e-12:
        raise ValueError(f"difference stencil leaves the domain: x={x}, x+rh={hi}")
    total = np.zeros(xs.shape)
    for j in range(r + 1):
        pts = np.clip(xs + (r - j) * h, 0.0, 1.0)
        total = total + (-1) ** j * math.comb(r, j) * np.asarray(f(pts), float)
    if np.ndim(x) == 0:
        return float(total)
    return total


def modulus_of_smoothness(
    f: Func1D,
    query: ModulusQuery,
    grid: Grid | None = None,
    *,
    h_steps: int = DEFAULT_H_STEPS,
) -> float:
    """omega_{r,p}(f; delta): max over an h-scan of (0, delta] of the L_p
    norm of the forward difference on [0, 1-rh].

    The scan has ``h_steps`` uniform steps and always includes h = delta;
    shifted kink locations are inserted as quadrature nodes.
    """
    grid = DEFAULT_GRID if grid is None else grid
    if grid.m < 256:
        raise ValueError(f"modulus grid needs m >= 256, got {grid.m}")
    r, p, delta = query.r, query.p, query.delta
    best = 0.0
    for i in range(1, h_steps + 1):
        h = delta * i / h_steps
        b = 1.0 - r * h
        shifted = [k - (r - j) * h for k in f.kinks for j in range(r + 1)]
        nodes = quadrature_nodes(grid, shifted, 0.0, max(b, 0.0))
        vals = forward_difference(f, r, h, nodes)
        best = max(best, norm_from_samples(nodes, np.atleast_1d(vals), p))
    return best


def modulus(f: Func1D, r: int, p, delta: float, grid: Grid | None = None, **kw) -> float:
    """Convenience wrapper building the ModulusQuery."""
    return modulus_of_smoothness(f, ModulusQuery(r, float(p), delta), grid, **kw)


def _box_mean(f: Func1D, centers: np.ndarray, w: float, quad_points: int) -> np.ndarray:
    """Average of the constantly-extended f over windows of width w."""
    offsets = np.linspace(-w / 2.0, w / 2.0, quad_points + 1)
    weights = np.full(quad_points + 1, 1.0 / quad_points)
    weights[0] = weights[-1] = 0.5 / quad_points
    pts = np.clip(centers[None, :] + offsets[:, None], 0.0, 1.0)
    return weights @ f(pts)


def steklov_mean(
    f: Func1D,
    w: float,
    order: int = 1,
    *,
    quad_points: int = STEKLOV_QUAD_POINTS,
) -> Func1D:
    """Iterated moving average of f with window w (f extended constantly).

    order=1 is the plain window average; order=2 iterates it, which makes
    the kernel a triangle of support 2w.  The result carries an analytic
    first derivative from the fundamental theorem of calculus and declares
    no kinks.
    """
    if not 0.0 < w <= 0.25:
        raise ValueError(f"window must satisfy 0 < w <= 1/4, got {w}")
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")

    if order == 1:

        def eval_fn(x):
            return _box_mean(f, np.atleast_1d(_as_array(x)), w, quad_points)

        def d1(x):
            xs = np.atleast_1d(_as_array(x))
            hi = f(np.clip(xs + w / 2.0, 0.0, 1.0))
            lo = f(np.clip(xs - w / 2.0, 0.0, 1.0))
            return (hi - lo) / w

    else:
        # Triangle kernel (w - |v|)/w^2 on [-w, w]; its trapezoid weights
        # are exact because the kernel is piecewise linear with a node at 0.
        npts = 2 * quad_points + 1
        offsets = np.linspace(-w, w, npts)
        kern = (w - np.abs(offsets)) / (w * w)
        trap = np.full(npts, 2.0 * w / (npts - 1))
        trap[0] = trap[-1] = w / (npts - 1)
        weights = trap * kern

        def eval_fn(x):
            xs = np.atleast_1d(_as_array(x))
            pts = np.clip(xs[None, :] + offsets[:, None], 0.0, 1.0)
            return weights @ f(pts)

        def d1(x):
            xs = np.atleast_1d(_as_array(x))
            hi = _box_mean(f, xs + w / 2.0, w, quad_points)
            lo = _box_mean(f, xs - w / 2.0, w, quad_points)
            return (hi - lo) / w

    return Func1D(
        id=f"steklov{order}({f.id};w={w:g})",
        eval_fn=eval_fn,
        derivatives=(d1,),
        kinks=(),
        smoothness_class="Wp2",
    )


def k_functional_upper(
    f: Func1D,
    r: int,
    p,
    t: float,
    grid: Grid | None = None,
) -> float:
    """Upper bound for K_{r,p}(f; t) = inf_g ||f-g||_p + t ||g^(r)||_p.

    Minimises over the candidate family {g = 0, g = f when f is smooth
    enough, Steklov means at a geometric ladder of windows around t^(1/r)}.
    """
    grid = DEFAULT_GRID if grid is None else grid
    if r not in (2, 3):
        raise ValueError(f"K-functional order r must be 2 or 3, got {r}")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    _check_p(p)

    nodes = quadrature_nodes(grid, f.kinks)
    best = lp_norm(f, p, grid)  # g = 0
    if len(f.derivatives) >= r:
        dr = np.asarray(derivative_callable(f, r)(nodes), float)
        best = min(best, t * norm_from_samples(nodes, dr, p))
    base = t ** (1.0 / r)
    for j in range(-2, 3):
        w = base * 2.0**j
        if not 0.0 < w <= 1.0 / (2 * r):
            continue
        g = steklov_mean(f, w, order=r - 1)
        err = norm_from_samples(nodes, f(nodes) - g(nodes), p)
        rough = np.asarray(derivative_callable(g, r)(nodes), float)
        best = min(best, err + t * norm_from_samples(nodes, rough, p))
    return best
