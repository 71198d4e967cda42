"""Dense RK4 stepping kernels for the brute-force oracle.

Two interchangeable backends fill the same uniform sample grid:

  * ``numba``: an @njit scalar loop over steps (default when importable),
  * ``numpy``: a vectorized fallback exploiting that between feedback events
    the RK4 update is the affine map x -> A*x + (1-A)*F with constant A,
    so whole runs collapse to a geometric recurrence.

Selection: environment variable ``RELAYDDE_BACKEND`` = ``numba`` | ``numpy``
(unset/auto picks numba when available). Both backends take the step's
piecewise-constant forcing as explicit run boundaries, so they share all
event bookkeeping done by the driver in oracle.py.

The per-step affine form is the classical RK4 update for x' = -x + F with F
frozen on the sub-step: A(h) = 1 - h + h^2/2 - h^3/6 + h^4/24.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    _HAVE_NUMBA = False


def _select_backend() -> str:
    env = os.environ.get("RELAYDDE_BACKEND", "auto").strip().lower()
    if env in ("", "auto"):
        return "numba" if _HAVE_NUMBA else "numpy"
    if env == "numba":
        if not _HAVE_NUMBA:
            raise ImportError("RELAYDDE_BACKEND=numba but numba is not importable")
        return "numba"
    if env == "numpy":
        return "numpy"
    raise ValueError(f"RELAYDDE_BACKEND must be numba|numpy|auto, got {env!r}")


BACKEND = _select_backend()


def _rk4_a(h: float) -> float:
    return 1.0 + h * (-1.0 + h * (0.5 + h * (-1.0 / 6.0 + h / 24.0)))


def _chunk_numpy(xs: np.ndarray, j0: int, j1: int, t0: float, h: float,
                 bounds: np.ndarray, levels: np.ndarray,
                 bvals: np.ndarray) -> None:
    """Fill xs[j0+1 .. j1] given run boundaries; record values at boundaries.

    Within a run the forcing F is constant, so m whole steps collapse to
    x_m = F + (x_0 - F) * A^m; only the partial steps at run edges need
    scalar work.
    """
    x = float(xs[j0])
    bvals[0] = x
    a_full = _rk4_a(h)
    eps = 1e-9 * h
    for r in range(levels.size):
        lo, hi, f = float(bounds[r]), float(bounds[r + 1]), float(levels[r])
        first = int(np.ceil((lo - t0) / h - 1e-9))          # first grid idx > lo
        if t0 + first * h <= lo + eps:
            first += 1
        last = int(np.floor((hi - t0) / h + 1e-9))          # last grid idx <= hi
        t_cur = lo
        if first <= last and first <= j1:
            last = min(last, j1)
            dt = (t0 + first * h) - t_cur
            if dt > eps:
                x = f + (x - f) * _rk4_a(dt)
            xs[first] = x
            m = last - first
            if m > 0:
                vals = f + (x - f) * np.power(a_full, np.arange(1, m + 1))
                xs[first + 1:last + 1] = vals
                x = float(vals[-1])
            t_cur = t0 + last * h
        dt = hi - t_cur
        if dt > eps:
            x = f + (x - f) * _rk4_a(dt)
        bvals[r + 1] = x


def _chunk_loop(xs, j0, j1, t0, h, bounds, levels, bvals):
    """Scalar RK4 loop over steps, splitting sub-steps at run boundaries."""
    x = xs[j0]
    bvals[0] = x
    r = 0
    eps = 1e-9 * h
    for j in range(j0, j1):
        t_cur = t0 + j * h
        s_end = t0 + (j + 1) * h
        while r + 1 < bounds.size and bounds[r + 1] <= s_end - eps:
            dt = bounds[r + 1] - t_cur
            if dt > eps:
                f = levels[r]
                k1 = f - x
                k2 = f - (x + 0.5 * dt * k1)
                k3 = f - (x + 0.5 * dt * k2)
                k4 = f - (x + dt * k3)
                x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t_cur = bounds[r + 1]
            r += 1
            bvals[r] = x
        dt = s_end - t_cur
        if dt > eps:
            f = levels[r]
            k1 = f - x
            k2 = f - (x + 0.5 * dt * k1)
            k3 = f - (x + 0.5 * dt * k2)
            k4 = f - (x + dt * k3)
            x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        xs[j + 1] = x
    while r + 1 < bounds.size:
        # boundaries coinciding with the chunk end
        bvals[r + 1] = x
        r += 1


if _HAVE_NUMBA:
    _chunk_numba = numba.njit(cache=True)(_chunk_loop)
else:  # pragma: no cover
    _chunk_numba = None


def chunk_fill(backend: str, xs, j0, j1, t0, h, bounds, levels, bvals) -> None:
    """Dispatch one chunk to the requested backend."""
    if backend == "numba":
        _chunk_numba(xs, j0, j1, t0, h, bounds, levels, bvals)
    else:
        _chunk_numpy(xs, j0, j1, t0, h, bounds, levels, bvals)
