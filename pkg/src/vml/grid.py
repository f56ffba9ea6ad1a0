"""Phase-space grid, derivative operators and quadrature.

Arrays on the phase-space grid have shape ``(n_q, n_p)``: rows are q
indices, columns are p indices.  Functions of q alone are 1D arrays of
length ``n_q``.

q is periodic on ``[0, l_q)`` and differentiated with FFTs.  p lives on
``[-p_max, p_max)`` and is differentiated either spectrally (treating the
p-interval as periodic, only sensible for fields that decay in p) or with
centred finite differences of order 4 or 6 closed by one-sided stencils of
the same order at both ends.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
import scipy.fft as sfft

from . import _accel

P_SCHEMES = ("spectral", "fd4", "fd6")


def fd_weights(offsets, deriv=1):
    """Exact finite-difference weights for ``d^deriv/dx^deriv`` at 0.

    Fornberg's recursion carried out in rational arithmetic; ``offsets`` are
    integer stencil positions in units of the grid spacing.
    """
    xs = [Fraction(o) for o in offsets]
    n = len(xs)
    c = [[Fraction(0)] * (deriv + 1) for _ in range(n)]
    c[0][0] = Fraction(1)
    c1 = Fraction(1)
    c4 = xs[0]
    for i in range(1, n):
        mn = min(i, deriv)
        c2 = Fraction(1)
        c5 = c4
        c4 = xs[i]
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2
            for k in range(mn, 0, -1):
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3
            c[j][0] = c4 * c[j][0] / c3
        c1 = c2
    return [row[deriv] for row in c]


@lru_cache(maxsize=None)
def fd_tables(order: int):
    """(interior, left, right) weight arrays for a first-derivative scheme.

    ``left[j]`` gives the weights of row j acting on columns ``0..w-1``;
    ``right[j]`` those of row ``n-r+j`` acting on the last w columns.
    """
    if order not in (4, 6):
        raise ValueError(f"unsupported finite-difference order {order}")
    r = order // 2
    w = order + 1
    interior = np.array([float(x) for x in fd_weights(range(-r, r + 1))])
    left = np.zeros((r, w))
    right = np.zeros((r, w))
    for j in range(r):
        left[j] = [float(x) for x in fd_weights([k - j for k in range(w)])]
        # mirror image: row n-r+j sees columns n-w..n-1
        jj = w - r + j
        right[j] = [float(x) for x in fd_weights([k - jj for k in range(w)])]
    return interior, left, right


@dataclass(frozen=True)
class GridSpec:
    n_q: int
    n_p: int
    l_q: float
    p_max: float
    p_deriv_order: str = "fd4"
    dealias: bool = False

    def __post_init__(self):
        for name in ("n_q", "n_p"):
            n = getattr(self, name)
            if int(n) != n or n <= 0:
                raise ValueError(f"{name} must be a positive integer, got {n!r}")
            if n % 2:
                raise ValueError(f"{name} must be even, got {n}")
        if not (np.isfinite(self.l_q) and self.l_q > 0):
            raise ValueError(f"l_q must be positive, got {self.l_q!r}")
        if not (np.isfinite(self.p_max) and self.p_max > 0):
            raise ValueError(f"p_max must be positive, got {self.p_max!r}")
        if self.p_deriv_order not in P_SCHEMES:
            raise ValueError(f"p_deriv_order must be one of {P_SCHEMES}, got {self.p_deriv_order!r}")
        if self.p_deriv_order != "spectral" and self.n_p < 2 * int(self.p_deriv_order[2:]) + 2:
            raise ValueError(f"n_p={self.n_p} too small for {self.p_deriv_order}")

    @property
    def dq(self) -> float:
        return self.l_q / self.n_q

    @property
    def dp(self) -> float:
        return 2.0 * self.p_max / self.n_p

    def build(self) -> "Grid":
        return Grid(self)


class Grid:
    """Operators and quadrature on a :class:`GridSpec`.

    All methods are pure: they never modify their arguments.
    """

    def __init__(self, spec: GridSpec):
        self.spec = spec
        self.n_q, self.n_p = spec.n_q, spec.n_p
        self.l_q, self.p_max = float(spec.l_q), float(spec.p_max)
        self.scheme = spec.p_deriv_order
        self.dealias = spec.dealias
        self.dq, self.dp = spec.dq, spec.dp
        self.shape = (self.n_q, self.n_p)

        self.q = np.arange(self.n_q) * self.dq
        self.p = -self.p_max + np.arange(self.n_p) * self.dp
        self.Q = self.q[:, None]
        self.P = self.p[None, :]

        # rfft wavenumbers along q; the Nyquist mode is dropped from odd
        # derivatives so that ddq is real and exactly skew-symmetric.
        m = np.arange(self.n_q // 2 + 1)
        self.kq = 2.0 * np.pi * m / self.l_q
        self._ikq = 1j * self.kq
        self._ikq[-1] = 0.0
        self._k2q = -self.kq**2
        self._mask_q = np.ones(m.size)
        self._mask_q[m > self.n_q // 3] = 0.0

        if self.scheme == "spectral":
            mp = np.arange(self.n_p // 2 + 1)
            kp = 2.0 * np.pi * mp / (2.0 * self.p_max)
            self._ikp = 1j * kp
            self._ikp[-1] = 0.0
        else:
            self._fd = fd_tables(int(self.scheme[2:]))

    def __repr__(self):
        return f"Grid({self.spec!r})"

    # -------------------------------------------------------------- fields

    def zeros(self):
        return np.zeros(self.shape)

    def check(self, x, name="field"):
        x = np.asarray(x, dtype=np.float64)
        if x.shape not in (self.shape, (self.n_q,)):
            raise ValueError(f"{name} has shape {x.shape}, grid expects {self.shape} or ({self.n_q},)")
        return x

    # -------------------------------------------------------- derivatives

    def _q_spectral(self, x, mult):
        xh = sfft.rfft(x, axis=0, workers=_accel.FFT_WORKERS)
        if x.ndim == 2:
            xh *= mult[:, None]
        else:
            xh *= mult
        return sfft.irfft(xh, n=self.n_q, axis=0, workers=_accel.FFT_WORKERS)

    def ddq(self, x):
        """Spectral derivative along q for phase or configuration fields."""
        return self._q_spectral(np.asarray(x, dtype=np.float64), self._ikq)

    def d2dq(self, x):
        """Spectral second derivative along q (keeps the Nyquist mode)."""
        return self._q_spectral(np.asarray(x, dtype=np.float64), self._k2q)

    def dealias_q(self, x):
        """2/3-rule truncation along q; identity unless the grid opts in."""
        if not self.dealias:
            return x
        return self._q_spectral(np.asarray(x, dtype=np.float64), self._mask_q)

    def ddp(self, x):
        """Derivative along p with the configured scheme."""
        x = np.asarray(x, dtype=np.float64)
        if self.scheme == "spectral":
            xh = sfft.rfft(x, axis=1, workers=_accel.FFT_WORKERS)
            xh *= self._ikp[None, :]
            return sfft.irfft(xh, n=self.n_p, axis=1, workers=_accel.FFT_WORKERS)
        interior, left, right = self._fd
        return _accel.stencil_axis1(x, interior, left, right, 1.0 / self.dp)

    @cached_property
    def dp_matrix(self):
        """Dense n_p x n_p matrix of ddp acting on one row."""
        return self.ddp(np.eye(self.n_p)).T.copy()

    @cached_property
    def _flux_blocks(self):
        # M = W D + D^T W is zero except in the boundary corners for the
        # finite-difference schemes (and identically zero for spectral).
        D = self.dp_matrix
        M = self.dp * (D + D.T)
        if self.scheme == "spectral":
            return 0, np.zeros((0, 0)), np.zeros((0, 0))
        s = self._fd[1].shape[1]
        inner = M[s:-s, :].copy()
        inner[:, :s] = 0.0
        inner[:, -s:] = 0.0
        scale = np.abs(M).max()
        if np.abs(inner).max() > 1e-12 * scale or np.abs(M[:s, s:-s]).max() > 1e-12 * scale:
            raise AssertionError("difference operator is not antisymmetric in the interior")
        return s, M[:s, :s].copy(), M[-s:, -s:].copy()

    def boundary_flux(self, y, x):
        """Discrete p-boundary term of integration by parts.

        Returns ``integrate_qp(y*ddp(x) + x*ddp(y))`` evaluated from the
        corner blocks of the operator only, i.e. the discrete analogue of
        ``integral over q of [x*y] at p = +-p_max``.
        """
        y = np.broadcast_to(np.asarray(y, dtype=np.float64), self.shape)
        x = np.broadcast_to(np.asarray(x, dtype=np.float64), self.shape)
        s, lo, hi = self._flux_blocks
        if s == 0:
            return 0.0
        total = np.einsum("ij,jk,ik->", y[:, :s], lo, x[:, :s])
        total += np.einsum("ij,jk,ik->", y[:, -s:], hi, x[:, -s:])
        return float(total * self.dq)

    # ---------------------------------------------------------- quadrature

    def integrate_qp(self, x) -> float:
        return float(np.sum(x) * self.dq * self.dp)

    def integrate_p(self, x):
        return np.sum(x, axis=1) * self.dp

    def integrate_q(self, x) -> float:
        return float(np.sum(x) * self.dq)

    def inner(self, a, b) -> float:
        return self.integrate_qp(np.asarray(a) * np.asarray(b))

    # ---------------------------------------------------------- utilities

    def broadcast_q(self, c):
        """Lift a function of q to the phase-space grid."""
        return np.broadcast_to(np.asarray(c, dtype=np.float64)[:, None], self.shape).copy()

    def with_scheme(self, scheme: str) -> "Grid":
        spec = GridSpec(self.n_q, self.n_p, self.l_q, self.p_max, scheme, self.dealias)
        return Grid(spec)


def make_grid(n_q, n_p, l_q, p_max, p_deriv_order="fd4", dealias=False) -> Grid:
    return Grid(GridSpec(n_q, n_p, l_q, p_max, p_deriv_order, dealias))
