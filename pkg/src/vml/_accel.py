"""Hot grid kernels with an optional numba path.

Every kernel exists twice: a vectorised numpy version and an ``@njit``
version.  The numba versions are used when numba imports and the
environment variable ``VML_NUMBA`` is not set to a false value
(``0``, ``false``, ``no``, ``off``).  ``VML_THREADS`` caps the thread count
of the numba kernels and of the FFT workers; ``0`` or unset means auto.

The two paths are interchangeable to round-off and the test-suite checks
them against each other.
"""
from __future__ import annotations

import os

import numpy as np

_FALSE = ("0", "false", "no", "off")


def _env_threads() -> int:
    raw = os.environ.get("VML_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"VML_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ValueError(f"VML_THREADS must be >= 0, got {n}")
    return n


THREADS = _env_threads()
FFT_WORKERS = THREADS if THREADS > 0 else -1

try:
    import numba
    from numba import njit, prange

    # prefer OpenMP; the bundled TBB is too old and only produces a warning
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("VML_NUMBA", "1").strip().lower() not in _FALSE

if HAVE_NUMBA and THREADS > 0:
    numba.set_num_threads(min(THREADS, numba.config.NUMBA_NUM_THREADS))


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- numpy path


def stencil_axis1_numpy(x, interior, left, right, inv_h):
    """Apply a 1D difference operator along the last axis.

    ``interior`` holds the centred weights (length 2r+1); ``left`` and
    ``right`` are the r x w closure blocks acting on the first / last w
    columns.
    """
    n = x.shape[1]
    r = (interior.size - 1) // 2
    w = left.shape[1]
    out = np.empty_like(x)
    acc = interior[0] * x[:, 0 : n - 2 * r]
    for k in range(1, interior.size):
        if interior[k] != 0.0:
            acc = acc + interior[k] * x[:, k : n - 2 * r + k]
    out[:, r : n - r] = acc
    out[:, :r] = x[:, :w] @ left.T
    out[:, n - r :] = x[:, n - w :] @ right.T
    out *= inv_h
    return out


def advect_numpy(u, a, v, b):
    """u*a + v*b for 2D arrays (u, v may be broadcast views)."""
    return u * a + v * b


def cross_numpy(a1, b1, a2, b2):
    """a1*b1 - a2*b2, the canonical-bracket combination."""
    return a1 * b1 - a2 * b2


def axpy_numpy(y, k, c):
    return y + c * k


def rk4_combine_numpy(y, k1, k2, k3, k4, dt):
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(parallel=True, cache=True)
    def stencil_axis1_numba(x, interior, left, right, inv_h):
        nq, n = x.shape
        r = (interior.size - 1) // 2
        w = left.shape[1]
        m = interior.size
        out = np.empty_like(x)
        for i in prange(nq):
            for j in range(r, n - r):
                s = 0.0
                for k in range(m):
                    s += interior[k] * x[i, j - r + k]
                out[i, j] = s * inv_h
            for j in range(r):
                s = 0.0
                t = 0.0
                for k in range(w):
                    s += left[j, k] * x[i, k]
                    t += right[j, k] * x[i, n - w + k]
                out[i, j] = s * inv_h
                out[i, n - r + j] = t * inv_h
        return out

    @njit(parallel=True, cache=True)
    def advect_numba(u, a, v, b):
        nq, n = a.shape
        out = np.empty((nq, n))
        for i in prange(nq):
            for j in range(n):
                out[i, j] = u[i, j] * a[i, j] + v[i, j] * b[i, j]
        return out

    @njit(parallel=True, cache=True)
    def cross_numba(a1, b1, a2, b2):
        nq, n = a1.shape
        out = np.empty((nq, n))
        for i in prange(nq):
            for j in range(n):
                out[i, j] = a1[i, j] * b1[i, j] - a2[i, j] * b2[i, j]
        return out

    @njit(parallel=True, cache=True)
    def axpy_numba(y, k, c):
        nq, n = y.shape
        out = np.empty((nq, n))
        for i in prange(nq):
            for j in range(n):
                out[i, j] = y[i, j] + c * k[i, j]
        return out

    @njit(parallel=True, cache=True)
    def rk4_combine_numba(y, k1, k2, k3, k4, dt):
        nq, n = y.shape
        out = np.empty((nq, n))
        c = dt / 6.0
        for i in prange(nq):
            for j in range(n):
                out[i, j] = y[i, j] + c * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        return out

else:  # pragma: no cover
    stencil_axis1_numba = stencil_axis1_numpy
    advect_numba = advect_numpy
    cross_numba = cross_numpy
    axpy_numba = axpy_numpy
    rk4_combine_numba = rk4_combine_numpy


def _as2d(x, shape):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != shape:
        x = np.broadcast_to(x, shape)
    return x


if USE_NUMBA:

    def stencil_axis1(x, interior, left, right, inv_h):
        return stencil_axis1_numba(np.ascontiguousarray(x), interior, left, right, inv_h)

    def advect(u, a, v, b):
        return advect_numba(_as2d(u, a.shape), a, _as2d(v, a.shape), b)

    def cross(a1, b1, a2, b2):
        return cross_numba(a1, b1, a2, b2)

    def axpy(y, k, c):
        return axpy_numba(y, k, float(c))

    def rk4_combine(y, k1, k2, k3, k4, dt):
        return rk4_combine_numba(y, k1, k2, k3, k4, float(dt))

else:
    stencil_axis1 = stencil_axis1_numpy
    advect = advect_numpy
    cross = cross_numpy
    axpy = axpy_numpy
    rk4_combine = rk4_combine_numpy
