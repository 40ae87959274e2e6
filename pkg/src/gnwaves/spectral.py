"""Periodic collocation grid and diagonal Fourier-multiplier calculus.

Fields are plain 1-D float arrays sampled on a :class:`Grid`; every operation
takes the grid explicitly. Transforms use the real-to-complex FFT, so symbols
are evaluated on the nonnegative wavenumber ladder ``grid.k`` and must be
even, real functions of k for the output to stay real.

Conventions:

* ``apply_symbol`` multiplies every mode, Nyquist included, by s(k).
* ``ddx`` zeroes the Nyquist mode; the odd symbol ik has no real
  representative there, and keeping it would leak a spurious imaginary part.
* ``inner`` is the rectangle rule (L/n) * sum(f*g), which is exact for
  band-limited products resolvable on the grid.

No dealiasing happens here; callers that want the 2/3 rule apply
``dealias_mask`` as an ordinary symbol.
"""

import numpy as np

from .errors import CorruptFieldError, ValidationError

__all__ = [
    "Grid",
    "apply_symbol",
    "ddx",
    "inner",
    "mode_amplitudes",
    "dealias_mask",
]


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


class Grid:
    """Uniform periodic grid on [-half_length, half_length).

    Nodes are x_j = -L/2 + j*L/n and the wavenumber ladder is k_m = 2*pi*m/L
    for m = 0..n/2 (real-transform storage; the last entry is the Nyquist
    wavenumber pi*n/L).
    """

    __slots__ = ("n", "half_length", "length", "dx", "x", "k", "nyquist")

    def __init__(self, n, half_length):
        if not isinstance(n, (int, np.integer)) or not _is_power_of_two(int(n)) or n < 8:
            raise ValidationError("n", f"grid size must be a power of two >= 8, got {n!r}")
        if not half_length > 0:
            raise ValidationError("half_length", f"must be positive, got {half_length!r}")
        self.n = int(n)
        self.half_length = float(half_length)
        self.length = 2.0 * self.half_length
        self.dx = self.length / self.n
        self.x = -self.half_length + self.dx * np.arange(self.n)
        self.k = (2.0 * np.pi / self.length) * np.arange(self.n // 2 + 1)
        self.nyquist = float(self.k[-1])

    def __repr__(self):
        return f"Grid(n={self.n}, half_length={self.half_length})"

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.n == other.n
            and self.half_length == other.half_length
        )

    def __hash__(self):
        return hash((self.n, self.half_length))


def _check_field(grid, f, name="field"):
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.n,):
        raise ValidationError(name, f"expected shape ({grid.n},), got {f.shape}")
    if not np.all(np.isfinite(f)):
        raise CorruptFieldError(f"{name} contains non-finite values")
    return f


def apply_symbol(grid, f, symbol):
    """Apply the Fourier multiplier with symbol s: f -> irfft(s(k) * rfft(f)).

    ``symbol`` is either a callable evaluated on ``grid.k`` or a precomputed
    real array of length n//2 + 1. The symbol must be real (even extension in
    k is implied by the real-transform storage).
    """
    f = _check_field(grid, f)
    s = symbol(grid.k) if callable(symbol) else np.asarray(symbol, dtype=float)
    if s.shape != grid.k.shape:
        raise ValidationError("symbol", f"expected shape {grid.k.shape}, got {s.shape}")
    return np.fft.irfft(s * np.fft.rfft(f), grid.n)


def ddx(grid, f):
    """Spectral derivative; the Nyquist mode of the result is zeroed."""
    f = _check_field(grid, f)
    fh = np.fft.rfft(f)
    fh *= 1j * grid.k
    fh[-1] = 0.0
    return np.fft.irfft(fh, grid.n)


def inner(grid, f, g):
    """Rectangle-rule approximation of the integral of f*g over one period."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != (grid.n,) or g.shape != (grid.n,):
        raise ValidationError("field", "inner() requires both fields on the same grid")
    return grid.dx * float(f @ g)


def mode_amplitudes(grid, f):
    """|f_hat(k)| on the nonnegative ladder, normalized so that a
    unit-amplitude single mode has amplitude 1/2."""
    f = _check_field(grid, f)
    return np.abs(np.fft.rfft(f)) / grid.n


def dealias_mask(grid):
    """2/3-rule symbol: 1 on modes |m| <= n/3, 0 above."""
    m = np.arange(grid.n // 2 + 1)
    return (m <= grid.n // 3).astype(float)
