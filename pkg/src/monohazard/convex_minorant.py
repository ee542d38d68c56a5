"""Greatest convex minorants of finite point sets, sampled paths and step functions.

All minorants are computed with a single monotone-chain pass over x-sorted
points. The pass is compiled with numba because it sits inside every Monte
Carlo replicate.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .exceptions import MonoHazardError

SLOPE_TIE_RTOL = 1e-14


@njit(cache=True, nogil=True)
def _lower_hull_indices(x, y):
    n = x.shape[0]
    idx = np.empty(n, np.int64)
    k = 0
    for i in range(n):
        while k >= 2:
            o = idx[k - 2]
            m = idx[k - 1]
            s1 = (y[m] - y[o]) / (x[m] - x[o])
            s2 = (y[i] - y[m]) / (x[i] - x[m])
            # pop on a non-convex turn; near-equal slopes count as collinear
            if s2 - s1 <= SLOPE_TIE_RTOL * max(abs(s1), abs(s2)):
                k -= 1
            else:
                break
        idx[k] = i
        k += 1
    return idx[:k]


@njit(cache=True, nogil=True)
def _hull_on_points(x, y, idx):
    """Evaluate the hull with knot indices ``idx`` at every abscissa in ``x``."""
    n = x.shape[0]
    out = np.empty(n)
    if idx.shape[0] == 1:
        out[:] = y[idx[0]]
        return out
    j = 0
    for i in range(n):
        while j < idx.shape[0] - 2 and x[idx[j + 1]] <= x[i]:
            j += 1
        a = idx[j]
        b = idx[j + 1]
        out[i] = y[a] + (y[b] - y[a]) * ((x[i] - x[a]) / (x[b] - x[a]))
    return out


def lower_hull(x, y):
    """Knot indices and hull values of the lower convex hull of ``(x, y)``.

    No validation; ``x`` must be strictly increasing and ``y`` finite. This is
    the hot path used by the simulators.
    """
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    idx = _lower_hull_indices(x, y)
    return idx, _hull_on_points(x, y, idx)


class ConvexPL:
    """Convex piecewise-linear function given by its knots.

    Evaluation is linear interpolation between knots; asking for a value
    outside ``[knots_x[0], knots_x[-1]]`` raises, it never extrapolates.
    """

    __slots__ = ("_x", "_y")

    def __init__(self, knots_x, knots_y):
        x = np.array(knots_x, dtype=float)
        y = np.array(knots_y, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size == 0:
            raise MonoHazardError("knots must be two non-empty 1-d arrays of equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise MonoHazardError("knots must be finite")
        if np.any(np.diff(x) <= 0):
            raise MonoHazardError("knot abscissae must be strictly increasing")
        s = np.diff(y) / np.diff(x)
        if s.size > 1:
            tol = SLOPE_TIE_RTOL * np.maximum(np.abs(s[:-1]), np.abs(s[1:]))
            if np.any(s[1:] - s[:-1] < -tol):
                raise MonoHazardError("knot slopes must be nondecreasing")
        x.flags.writeable = False
        y.flags.writeable = False
        self._x = x
        self._y = y

    @property
    def knots_x(self):
        return self._x

    @property
    def knots_y(self):
        return self._y

    @property
    def knots(self):
        return list(zip(self._x.tolist(), self._y.tolist()))

    @property
    def slopes(self):
        return np.diff(self._y) / np.diff(self._x)

    @property
    def span(self):
        return float(self._x[0]), float(self._x[-1])

    def __len__(self):
        return self._x.size

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.span
        if np.any(t_arr < lo) or np.any(t_arr > hi) or np.any(np.isnan(t_arr)):
            raise MonoHazardError(f"evaluation outside the knot span [{lo}, {hi}]")
        if self._x.size == 1:
            out = np.full(t_arr.shape, self._y[0])
        else:
            out = np.interp(t_arr, self._x, self._y)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return f"ConvexPL(n_knots={self._x.size}, span={self.span})"


def _points_to_arrays(points):
    if isinstance(points, tuple) and len(points) == 2 and np.ndim(points[0]) == 1:
        x, y = points
    else:
        arr = np.asarray(points, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise MonoHazardError("points must be a sequence of (x, y) pairs")
        x, y = arr[:, 0], arr[:, 1]
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def gcm_points(points) -> ConvexPL:
    """Greatest convex minorant of a finite point set.

    Parameters
    ----------
    points : sequence of (x, y) pairs, or a tuple ``(xs, ys)`` of arrays
        Abscissae must be strictly increasing and ordinates finite.

    Returns
    -------
    ConvexPL
        Lower convex hull on ``[x_first, x_last]``. Its knots are a subset of
        the input points; collinear points are dropped.
    """
    x, y = _points_to_arrays(points)
    if x.size == 0:
        raise MonoHazardError("gcm_points needs at least one point")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise MonoHazardError("points must be finite")
    if np.any(np.diff(x) <= 0):
        raise MonoHazardError("abscissae must be strictly increasing (no duplicates)")
    idx = _lower_hull_indices(np.ascontiguousarray(x), np.ascontiguousarray(y))
    return ConvexPL(x[idx], y[idx])


def gcm_sampled_path(xs, ys) -> ConvexPL:
    """Greatest convex minorant of a path sampled on a uniform grid."""
    xs = np.asarray(xs, dtype=float)
    if xs.size < 2:
        raise MonoHazardError("a sampled path needs at least two grid points")
    steps = np.diff(xs)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise MonoHazardError("grid must be uniform and increasing")
    return gcm_points((xs, ys))


class StepFunction:
    """Right-continuous nondecreasing step function on ``[0, inf)``.

    Parameters
    ----------
    jump_points : array-like
        Strictly increasing abscissae of the jumps.
    values : array-like
        Value attained at and to the right of each jump. ``+inf`` is allowed
        and marks the region where the underlying distribution function
        has reached one.
    initial_value : float
        Value on ``[0, jump_points[0])``.
    """

    __slots__ = ("_t", "_v", "_v0")

    def __init__(self, jump_points, values, initial_value=0.0):
        t = np.array(jump_points, dtype=float)
        v = np.array(values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise MonoHazardError("jump_points and values must be 1-d arrays of equal length")
        if np.any(np.diff(t) <= 0) or not np.all(np.isfinite(t)):
            raise MonoHazardError("jump points must be finite and strictly increasing")
        if np.any(np.isnan(v)) or math.isnan(initial_value):
            raise MonoHazardError("values must not be NaN")
        full = np.concatenate([[initial_value], v])
        if np.any(full[1:] < full[:-1]):
            raise MonoHazardError("step function values must be nondecreasing")
        t.flags.writeable = False
        v.flags.writeable = False
        self._t = t
        self._v = v
        self._v0 = float(initial_value)

    @property
    def jump_points(self):
        return self._t

    @property
    def values(self):
        return self._v

    @property
    def initial_value(self):
        return self._v0

    def _lookup(self, t, side):
        t_arr = np.asarray(t, dtype=float)
        k = np.searchsorted(self._t, t_arr, side=side)
        full = np.concatenate([[self._v0], self._v])
        out = full[k]
        return float(out) if out.ndim == 0 else out

    def __call__(self, t):
        return self._lookup(t, "right")

    def left_limit(self, t):
        """Value of ``f(t-)``: the value on the segment just left of ``t``."""
        return self._lookup(t, "left")

    def is_infinite(self, t):
        return np.isinf(self(t))

    def __repr__(self):
        return f"StepFunction(n_jumps={self._t.size})"


def step_constraints(f: StepFunction, a: float):
    """Constraint points whose hull is the convex minorant of ``f`` on ``[0, a]``.

    A continuous minorant of a cadlag step function is bound by the left limit
    at each jump, so the constraints are ``(0, f(0-))``, ``(t, f(t-))`` for
    jumps ``t`` in ``(0, a]`` and ``(a, f(a))`` unless ``a`` is itself a jump.
    Points with infinite ordinate are dropped.
    """
    t = f.jump_points
    k = int(np.searchsorted(t, a, side="right"))
    inner = t[:k]
    inner = inner[inner > 0]
    left = f.left_limit(inner) if inner.size else np.empty(0)
    xs = [np.array([0.0]), inner]
    ys = [np.array([f.initial_value]), np.atleast_1d(left)]
    if inner.size == 0 or inner[-1] < a:
        xs.append(np.array([a]))
        ys.append(np.array([f(a)]))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    keep = np.isfinite(y)
    return x[keep], y[keep]


def gcm_of_step(f: StepFunction, a: float) -> ConvexPL:
    """Greatest convex minorant of a step function on ``[0, a]``.

    If ``f`` becomes infinite inside the interval the minorant's span ends at
    the last finite constraint point.
    """
    if not a > 0 or not math.isfinite(a):
        raise MonoHazardError(f"interval end a must be positive and finite, got {a!r}")
    if math.isinf(f.initial_value):
        raise MonoHazardError("step function is infinite on all of (0, a]")
    x, y = step_constraints(f, a)
    return gcm_points((x, y))
