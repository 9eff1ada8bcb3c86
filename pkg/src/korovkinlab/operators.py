"""The four operator families on C([0,1]) and the Choquet cell engine.

Kinds: plain Bernstein, the max of two consecutive Bernstein operators,
the cellwise-supremum Bernstein variant, and the Kantorovich variant that
averages cells with the Choquet integral against the square-root-distorted
Lebesgue measure.  A fifth kind, "identity", is accepted as a diagnostic
fixture.  All operators here are monotone, sublinear, unital and strongly
translatable; the axiom suite checks exactly that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln, xlogy

from .funcspace import E0, Func1D, _as_array

OPERATOR_KINDS = ("bernstein", "max-bernstein", "sup-bernstein", "kantorovich-choquet")
_ALL_KINDS = OPERATOR_KINDS + ("identity",)

DEFAULT_SUP_SAMPLES = 64
DEFAULT_CHOQUET_SAMPLES = 1024

MOMENT_KINDS = ("abs_first", "second")


@dataclass(frozen=True)
class OperatorSpec:
    """A named operator instance: family kind plus polynomial degree n."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in _ALL_KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}; expected one of {_ALL_KINDS}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"operator degree must be a positive integer, got {self.n}")


@dataclass(frozen=True)
class DistortedMeasure:
    """Monotone set function gamma(length) on subintervals of [0,1]."""

    distortion: Callable[[np.ndarray], np.ndarray] = np.sqrt

    def measure(self, a: float, b: float) -> float:
        if not 0.0 <= a <= b <= 1.0:
            raise ValueError(f"interval [{a},{b}] is not inside [0,1]")
        return float(self.distortion(b - a))


SQRT_MEASURE = DistortedMeasure()


def bernstein_basis(n: int, k: int, x):
    """Basis polynomial C(n,k) x^k (1-x)^(n-k), stable up to n ~ 2048.

    Evaluated in the log domain so large degrees neither overflow nor
    lose the tiny tail masses.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"degree n must be a positive integer, got {n}")
    if not isinstance(k, int) or k < 0 or k > n:
        raise ValueError(f"basis index k={k} out of range [0,{n}]")
    xs = _as_array(x)
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise ValueError("x must lie in [0,1]")
    with np.errstate(divide="ignore"):
        logp = (
            gammaln(n + 1)
            - gammaln(k + 1)
            - gammaln(n - k + 1)
            + xlogy(k, xs)
            + xlogy(n - k, 1.0 - xs)
        )
    out = np.exp(logp)
    if np.ndim(x) == 0:
        return float(out)
    return out


def _basis_matrix(n: int, x: np.ndarray) -> np.ndarray:
    """All basis rows at once: shape (n+1, len(x))."""
    ks = np.arange(n + 1)
    logc = gammaln(n + 1) - gammaln(ks + 1) - gammaln(n - ks + 1)
    with np.errstate(divide="ignore"):
        logp = (
            logc[:, None]
            + xlogy(ks[:, None], x[None, :])
            + xlogy((n - ks)[:, None], 1.0 - x[None, :])
        )
    return np.exp(logp)


def _cell_bounds(n: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n + 2)


def _choquet_from_samples(values: np.ndarray, length: float, distortion) -> np.ndarray:
    """Choquet integral of the sampled values over an interval of the
    given length, along the last axis.

    The samples are shifted to be nonnegative, sorted decreasingly and
    weighted with the distortion increments; the shift is undone through
    translation covariance.
    """
    k = values.shape[-1]
    levels = distortion(length * np.arange(k + 1) / k)
    wdiff = np.diff(levels)
    c = values.min(axis=-1, keepdims=True)
    desc = np.sort(values, axis=-1)[..., ::-1]
    total = (desc - c) @ wdiff + c[..., 0] * distortion(length)
    return total


def choquet_integral(
    f: Func1D,
    a: float,
    b: float,
    mu: DistortedMeasure = SQRT_MEASURE,
    samples: int = DEFAULT_CHOQUET_SAMPLES,
) -> float:
    """Choquet integral of f over [a,b] against the distorted measure.

    f is sampled at ``samples`` uniform midpoints; the sorted layer-cake
    sum is exact for the discretised function.
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if samples < 16:
        raise ValueError(f"need at least 16 samples, got {samples}")
    ts = a + (b - a) * (np.arange(samples) + 0.5) / samples
    vals = f(ts)
    return float(_choquet_from_samples(vals, b - a, mu.distortion))


def _apply_bernstein(n: int, f: Func1D, xs: np.ndarray) -> np.ndarray:
    fv = f(np.arange(n + 1) / n)
    return fv @ _basis_matrix(n, xs)


def _sup_cell_values(f: Func1D, n: int, sup_samples: int) -> np.ndarray:
    """Per-cell sampled suprema over the n+1 cells [k/(n+1),(k+1)/(n+1)].

    Samples: ``sup_samples`` interior points per cell, both endpoints,
    and any declared kink of f inside the cell.
    """
    bounds = _cell_bounds(n)
    lo, hi = bounds[:-1], bounds[1:]
    fracs = np.arange(1, sup_samples + 1) / (sup_samples + 1)
    inner = lo[:, None] + (hi - lo)[:, None] * fracs[None, :]
    cellmax = f(inner).max(axis=1)
    fb = f(bounds)
    cellmax = np.maximum(cellmax, np.maximum(fb[:-1], fb[1:]))
    for kink in f.kinks:
        idx = min(int(kink * (n + 1)), n)
        cellmax[idx] = max(cellmax[idx], f(kink))
    return cellmax


def _choquet_cell_means(f: Func1D, n: int, samples: int) -> np.ndarray:
    """Normalised Choquet cell averages for the Kantorovich variant."""
    w = 1.0 / (n + 1)
    bounds = _cell_bounds(n)
    mids = bounds[:-1, None] + w * (np.arange(samples)[None, :] + 0.5) / samples
    vals = f(mids)
    totals = _choquet_from_samples(vals, w, SQRT_MEASURE.distortion)
    return totals / SQRT_MEASURE.distortion(w)


def apply(
    op: OperatorSpec,
    f: Func1D,
    x,
    *,
    sup_samples: int = DEFAULT_SUP_SAMPLES,
    choquet_samples: int = DEFAULT_CHOQUET_SAMPLES,
):
    """Evaluate T(f) at x (scalar or vector of points in [0,1])."""
    xs = np.atleast_1d(_as_array(x))
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise ValueError("x must lie in [0,1]")
    if op.kind == "identity":
        vals = f(xs)
    elif op.kind == "bernstein":
        vals = _apply_bernstein(op.n, f, xs)
    elif op.kind == "max-bernstein":
        vals = np.maximum(_apply_bernstein(op.n, f, xs), _apply_bernstein(op.n + 1, f, xs))
    elif op.kind == "sup-bernstein":
        cellmax = _sup_cell_values(f, op.n, sup_samples)
        vals = cellmax @ _basis_matrix(op.n, xs)
    else:
        means = _choquet_cell_means(f, op.n, choquet_samples)
        vals = means @ _basis_matrix(op.n, xs)
    if np.ndim(x) == 0:
        return float(vals[0])
    return vals


def _chunked(total: int, size: int):
    for start in range(0, total, size):
        yield slice(start, min(start + size, total))


def _bernstein_moments(n: int, xs: np.ndarray, kind: str) -> np.ndarray:
    nodes = np.arange(n + 1) / n
    basis = _basis_matrix(n, xs)
    diff = np.abs(nodes[:, None] - xs[None, :])
    if kind == "second":
        diff = diff**2
    return np.einsum("kx,kx->x", basis, diff)


def operator_moment(
    op: OperatorSpec,
    kind: str,
    x,
    *,
    sup_samples: int = DEFAULT_SUP_SAMPLES,
    choquet_samples: int = DEFAULT_CHOQUET_SAMPLES,
):
    """T applied to t -> |t-x| ("abs_first") or t -> (t-x)^2 ("second"),
    evaluated at the same point x."""
    if kind not in MOMENT_KINDS:
        raise ValueError(f"unknown moment kind {kind!r}; expected one of {MOMENT_KINDS}")
    xs = np.atleast_1d(_as_array(x))
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise ValueError("x must lie in [0,1]")
    n = op.n
    if op.kind == "identity":
        vals = np.zeros_like(xs)
    elif op.kind == "bernstein":
        vals = _bernstein_moments(n, xs, kind)
    elif op.kind == "max-bernstein":
        vals = np.maximum(_bernstein_moments(n, xs, kind), _bernstein_moments(n + 1, xs, kind))
    elif op.kind == "sup-bernstein":
        # |t-x| and (t-x)^2 are convex in t, so the sampled suprema sit at
        # cell endpoints and the sampling is exact.
        bounds = _cell_bounds(n)
        basis = _basis_matrix(n, xs)
        vals = np.empty_like(xs)
        for sl in _chunked(xs.size, 4096):
            d = np.maximum(
                np.abs(bounds[:-1][None, :] - xs[sl][:, None]),
                np.abs(bounds[1:][None, :] - xs[sl][:, None]),
            )
            if kind == "second":
                d = d**2
            vals[sl] = np.einsum("xk,kx->x", d, basis[:, sl])
    else:
        w = 1.0 / (n + 1)
        bounds = _cell_bounds(n)
        mids = bounds[:-1, None] + w * (np.arange(choquet_samples)[None, :] + 0.5) / choquet_samples
        basis = _basis_matrix(n, xs)
        gamma_w = SQRT_MEASURE.distortion(w)
        vals = np.empty_like(xs)
        chunk = max(1, int(16_000_000 / mids.size))
        for sl in _chunked(xs.size, chunk):
            d = np.abs(mids[None, :, :] - xs[sl][:, None, None])
            if kind == "second":
                d = d**2
            totals = _choquet_from_samples(d, w, SQRT_MEASURE.distortion)
            vals[sl] = np.einsum("xk,kx->x", totals / gamma_w, basis[:, sl])
    if np.ndim(x) == 0:
        return float(vals[0])
    return vals


def operator_moment_profiles(
    op: OperatorSpec,
    x,
    *,
    sup_samples: int = DEFAULT_SUP_SAMPLES,
    choquet_samples: int = DEFAULT_CHOQUET_SAMPLES,
) -> tuple[np.ndarray, np.ndarray]:
    """Both moment kinds at once.

    |t-x| and (t-x)^2 are order-isomorphic in t, so the expensive sorted
    Choquet pass (and the sampled cell suprema) can be shared; the result
    matches two operator_moment calls.
    """
    xs = np.atleast_1d(_as_array(x))
    n = op.n
    if op.kind in ("identity", "bernstein", "max-bernstein"):
        kwargs = dict(sup_samples=sup_samples, choquet_samples=choquet_samples)
        return (
            operator_moment(op, "abs_first", xs, **kwargs),
            operator_moment(op, "second", xs, **kwargs),
        )
    basis = _basis_matrix(n, xs)
    bounds = _cell_bounds(n)
    abs_vals = np.empty_like(xs)
    sec_vals = np.empty_like(xs)
    if op.kind == "sup-bernstein":
        for sl in _chunked(xs.size, 4096):
            d = np.maximum(
                np.abs(bounds[:-1][None, :] - xs[sl][:, None]),
                np.abs(bounds[1:][None, :] - xs[sl][:, None]),
            )
            abs_vals[sl] = np.einsum("xk,kx->x", d, basis[:, sl])
            sec_vals[sl] = np.einsum("xk,kx->x", d**2, basis[:, sl])
    else:
        w = 1.0 / (n + 1)
        mids = bounds[:-1, None] + w * (np.arange(choquet_samples)[None, :] + 0.5) / choquet_samples
        gamma_w = SQRT_MEASURE.distortion(w)
        k = choquet_samples
        levels = SQRT_MEASURE.distortion(w * np.arange(k + 1) / k)
        # Ascending sample order pairs with the reversed weight increments.
        wrev = np.diff(levels)[::-1].copy()
        chunk = max(1, int(16_000_000 / mids.size))
        for sl in _chunked(xs.size, chunk):
            d = mids[None, :, :] - xs[sl][:, None, None]
            np.abs(d, out=d)
            d.sort(axis=-1)
            abs_vals[sl] = np.einsum("xk,kx->x", (d @ wrev) / gamma_w, basis[:, sl])
            d *= d
            sec_vals[sl] = np.einsum("xk,kx->x", (d @ wrev) / gamma_w, basis[:, sl])
    if np.ndim(x) == 0:
        return float(abs_vals[0]), float(sec_vals[0])
    return abs_vals, sec_vals


def unit_value(op: OperatorSpec, x, **kwargs):
    """T(e_0) at x; equals 1 for every kind by construction."""
    return apply(op, E0, x, **kwargs)
