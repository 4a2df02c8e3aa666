"""Discrete momentum-power operators (-i d/dx)^n on the ring.

Two families are provided, both translation-invariant circulant matrices so
they commute exactly with the cell shift:

* ``spectral`` -- diagonal in the discrete Fourier basis with multiplier
  k_q^n on the allowed wavenumbers k_q = 2*pi*q/L.  For odd n the Nyquist
  mode (q = -G/2 on even grids) has no Hermitian counterpart and its
  multiplier is set to zero.
* ``fd{p}`` with p in {2, 4, 6, 8} -- central finite differences of accuracy
  order p.  Stencil weights come from Fornberg's recursion (B. Fornberg,
  Math. Comp. 51, 1988), wrapped periodically.
"""

from __future__ import annotations

import re

import numpy as np
import scipy.linalg

from .grid import RingGrid

_FD_SCHEME = re.compile(r"^fd([1-9][0-9]*)$")


def fornberg_weights(order: int, offsets: np.ndarray) -> np.ndarray:
    """Weights of the ``order``-th derivative on integer sample ``offsets``.

    Implements the standard one-point-at-a-time recursion; the returned
    weights w satisfy f^(order)(0) ~ sum_i w_i f(offsets_i * h) / h^order.
    """
    offsets = np.asarray(offsets, dtype=float)
    npts = offsets.size
    if order >= npts:
        raise ValueError(f"need more than {order} points for derivative order {order}")
    d = np.zeros((order + 1, npts, npts))
    d[0, 0, 0] = 1.0
    c1 = 1.0
    for i in range(1, npts):
        c2 = 1.0
        for j in range(i):
            c3 = offsets[i] - offsets[j]
            c2 *= c3
            for k in range(min(i, order) + 1):
                d[k, i, j] = (offsets[i] * d[k, i - 1, j] - k * d[k - 1, i - 1, j]) / c3
        for k in range(min(i, order) + 1):
            d[k, i, i] = c1 / c2 * (k * d[k - 1, i - 1, i - 1] - offsets[i - 1] * d[k, i - 1, i - 1])
        c1 = c2
    return d[order, npts - 1, :]


def _parse_scheme(scheme: str) -> int | None:
    """Return the finite-difference accuracy order, or None for 'spectral'."""
    if scheme == "spectral":
        return None
    m = _FD_SCHEME.match(scheme)
    if m:
        p = int(m.group(1))
        if p in (2, 4, 6, 8):
            return p
    raise ValueError(
        f"unknown derivative scheme {scheme!r}; expected 'spectral' or 'fd2', 'fd4', 'fd6', 'fd8'"
    )


def _spectral_matrix(grid: RingGrid, n: int) -> np.ndarray:
    g = grid.total_points
    k = 2.0 * np.pi * np.fft.fftfreq(g, d=grid.spacing)
    mult = k**n
    if n % 2 == 1 and g % 2 == 0:
        mult[g // 2] = 0.0
    col = np.fft.ifft(mult)
    if n % 2 == 0:
        # Even multiplier: the kernel is real and symmetric.
        col = col.real.astype(complex)
    # Hermiticity of a circulant reads col[d] == conj(col[G-d]); the ifft
    # satisfies it to roundoff, this makes it exact.
    col = 0.5 * (col + np.conj(np.roll(col[::-1], 1)))
    return scipy.linalg.circulant(col)


def _finite_difference_matrix(grid: RingGrid, n: int, accuracy: int) -> np.ndarray:
    g = grid.total_points
    # Minimal centered stencil achieving the requested accuracy order.
    npts = 2 * ((n + 1) // 2) - 1 + accuracy
    if npts > g:
        raise ValueError(f"stencil of {npts} points does not fit on a grid of {g} samples")
    half = npts // 2
    offsets = np.arange(-half, half + 1)
    weights = fornberg_weights(n, offsets) / grid.spacing**n
    col = np.zeros(g)
    for off, w in zip(offsets, weights):
        col[(-off) % g] += w
    full = (-1j) ** n * col
    # The Fornberg recursion does not return bitwise-mirrored weights, so the
    # circulant column is symmetrized exactly, as in the spectral scheme.
    full = 0.5 * (full + np.conj(np.roll(full[::-1], 1)))
    return scipy.linalg.circulant(full)


def momentum_power_matrix(grid: RingGrid, n: int, scheme: str = "spectral") -> np.ndarray:
    """Dense G x G matrix of (-i d/dx)^n acting on grid samples.

    Parameters
    ----------
    grid : RingGrid
    n : int
        Derivative power, 0 <= n <= 8.  n = 0 gives the identity.
    scheme : str
        'spectral' or 'fd{p}' with accuracy order p in {2, 4, 6, 8}.

    The result is circulant, hence commutes exactly with translation by any
    number of samples, and is Hermitian for every n and scheme.
    """
    if not isinstance(n, (int, np.integer)) or not 0 <= n <= 8:
        raise ValueError(f"derivative power must be an integer in [0, 8], got {n!r}")
    accuracy = _parse_scheme(scheme)
    if n == 0:
        return np.eye(grid.total_points, dtype=complex)
    if accuracy is None:
        mat = _spectral_matrix(grid, n)
    else:
        mat = _finite_difference_matrix(grid, n, accuracy)
    return np.asarray(mat, dtype=complex)
