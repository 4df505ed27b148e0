"""Periodic spectral grids, transforms, weighted Sobolev norms, and the
nonnegative-frequency (Hardy) projection.

Conventions.  On a period-``L`` domain the transform pair is

    u_hat(xi) = integral_0^L u(x) exp(-i xi x) dx,
    u(x)      = (1/L) * sum_xi u_hat(xi) exp(i xi x),

with xi running over the lattice (2*pi/L)*k, k = -N/2 .. N/2-1.  For L = 1
this is the standard circle convention with xi in 2*pi*Z, and Parseval reads
||u||_L2^2 = (1/L) * sum |u_hat|^2.  The lattice is symmetric about 0 except
for the single unpaired Nyquist mode at k = -N/2; real fields carry a real
coefficient there, and multipliers with no real part at that frequency zero
it out.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ContractError

_HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform periodic grid with N sample points on [0, L)."""

    length: float
    n_points: int

    def __post_init__(self):
        if not np.isfinite(self.length) or self.length <= 0:
            raise ContractError("grid length must be positive and finite")
        if self.n_points < 8 or self.n_points % 2 != 0:
            raise ContractError("n_points must be an even integer >= 8")

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Angular frequencies in FFT order: (2*pi/L)*[0, 1, .., -N/2, .., -1]."""
        xi = 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.length / self.n_points)
        xi.setflags(write=False)
        return xi

    @cached_property
    def nodes(self) -> np.ndarray:
        x = np.arange(self.n_points) * (self.length / self.n_points)
        x.setflags(write=False)
        return x

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @property
    def fundamental(self) -> float:
        """Smallest positive lattice frequency 2*pi/L."""
        return 2.0 * np.pi / self.length

    @property
    def max_frequency(self) -> float:
        """Largest paired positive frequency, (2*pi/L)*(N/2 - 1)."""
        return self.fundamental * (self.n_points // 2 - 1)

    @property
    def nyquist_index(self) -> int:
        return self.n_points // 2

    @cached_property
    def _conjugate_index(self) -> np.ndarray:
        idx = (-np.arange(self.n_points)) % self.n_points
        idx.setflags(write=False)
        return idx


def _check_hermitian(coeffs: np.ndarray, grid: SpectralGrid, what: str) -> np.ndarray:
    mirrored = np.conj(coeffs[grid._conjugate_index])
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    gap = float(np.max(np.abs(coeffs - mirrored)))
    if gap > _HERMITIAN_RTOL * scale:
        raise ContractError(
            "%s breaks Hermitian symmetry (gap %.3e, scale %.3e)" % (what, gap, scale)
        )
    # exact symmetrization keeps downstream synthesis real to the last bit
    return 0.5 * (coeffs + mirrored)


@dataclass(frozen=True)
class RealField:
    """Real-valued field stored by its Fourier coefficients (FFT order).

    The constructor validates Hermitian symmetry and then symmetrizes
    exactly, so ``samples()`` is real up to rounding in the FFT itself.
    Instances are immutable; operations return new fields.
    """

    grid: SpectralGrid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (self.grid.n_points,):
            raise ContractError("coefficient array must have shape (n_points,)")
        if not np.all(np.isfinite(coeffs)):
            raise ContractError("coefficients must be finite")
        coeffs = _check_hermitian(coeffs, self.grid, "coefficient array")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    # -- synthesis ---------------------------------------------------------

    def samples(self) -> np.ndarray:
        u = np.fft.ifft(self.coeffs) * (self.grid.n_points / self.grid.length)
        return u.real

    def mean(self) -> float:
        return float(self.coeffs[0].real) / self.grid.length

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2) / self.grid.length))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples())))

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "RealField") -> "RealField":
        self._require_same_grid(other)
        return RealField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "RealField") -> "RealField":
        self._require_same_grid(other)
        return RealField(self.grid, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "RealField":
        return RealField(self.grid, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def _require_same_grid(self, other: "RealField"):
        if other.grid != self.grid:
            raise ContractError("fields live on different grids")

    # -- geometry ----------------------------------------------------------

    def shifted(self, h: float) -> "RealField":
        """Translate by h: x -> u(x - h), exact in coefficient space.

        The unpaired Nyquist mode represents cos(xi_N x); its translate keeps
        only the cosine part (the sine component vanishes on the lattice), so
        that slot is scaled by cos(xi_N h) and stays real.
        """
        phase = np.exp(-1j * self.grid.frequencies * h)
        coeffs = self.coeffs * phase
        ny = self.grid.nyquist_index
        coeffs[ny] = self.coeffs[ny].real * np.cos(self.grid.frequencies[ny] * h)
        return RealField(self.grid, coeffs)

    def embedded(self, n_points: int) -> "RealField":
        """Zero-pad onto a finer grid of the same length.

        The unpaired Nyquist coefficient is split half-and-half between the
        +N/2 and -N/2 slots of the finer lattice, which preserves both the
        function values and Hermitian symmetry.
        """
        n_old = self.grid.n_points
        if n_points < n_old or n_points % 2 != 0:
            raise ContractError("embedding target must be an even n_points >= source")
        if n_points == n_old:
            return self
        out = np.zeros(n_points, dtype=np.complex128)
        half = n_old // 2
        out[:half] = self.coeffs[:half]
        out[n_points - half + 1:] = self.coeffs[half + 1:]
        nyq = self.coeffs[half]
        out[half] = 0.5 * nyq
        out[n_points - half] = 0.5 * nyq
        return RealField(SpectralGrid(self.grid.length, n_points), out)


def forward_transform(samples: np.ndarray, grid: SpectralGrid) -> RealField:
    """Collocation transform of real samples into a RealField."""
    samples = np.asarray(samples)
    if samples.shape != (grid.n_points,):
        raise ContractError("sample array must have shape (n_points,)")
    if np.iscomplexobj(samples):
        raise ContractError("samples must be real")
    if not np.all(np.isfinite(samples)):
        raise ContractError("samples must be finite")
    coeffs = (grid.length / grid.n_points) * np.fft.fft(samples.astype(float))
    return RealField(grid, coeffs)


def synthesize(grid: SpectralGrid, coeffs: np.ndarray) -> np.ndarray:
    """Complex-valued synthesis u(x_j) = (1/L) sum u_hat(xi) exp(i xi x_j)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape != (grid.n_points,):
        raise ContractError("coefficient array must have shape (n_points,)")
    return np.fft.ifft(coeffs) * (grid.n_points / grid.length)


@dataclass(frozen=True)
class SobolevIndex:
    """Regularity s with an inflation parameter kappa >= 1.

    The weight is <xi>_kappa = sqrt(kappa^2 + xi^2); kappa = 1 recovers the
    plain Sobolev bracket.
    """

    s: float
    kappa: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.s):
            raise ContractError("s must be finite")
        if not np.isfinite(self.kappa) or self.kappa < 1.0:
            raise ContractError("kappa must satisfy kappa >= 1")

    def bracket(self, xi: np.ndarray) -> np.ndarray:
        return np.sqrt(self.kappa ** 2 + np.asarray(xi) ** 2)


def sobolev_norm(field: RealField, index: SobolevIndex) -> float:
    """Weighted norm (1/L * sum <xi>_kappa^(2s) |u_hat|^2)^(1/2)."""
    w = index.bracket(field.grid.frequencies) ** (2.0 * index.s)
    total = np.sum(w * np.abs(field.coeffs) ** 2) / field.grid.length
    return float(np.sqrt(total))


def hardy_project(field: RealField) -> np.ndarray:
    """Coefficients on the nonnegative half-lattice xi = 0, xi_1, ...

    The zero mode is kept; the unpaired Nyquist mode (negative by
    convention) is dropped.  Frequencies ascend with the index, matching
    ``hardy_frequencies``.
    """
    return field.coeffs[: field.grid.n_points // 2].copy()


def hardy_frequencies(grid: SpectralGrid) -> np.ndarray:
    return grid.frequencies[: grid.n_points // 2].copy()


def hardy_norm(coeffs: np.ndarray, frequencies: np.ndarray, length: float,
               index: SobolevIndex) -> float:
    """Sobolev norm of a one-sided coefficient vector (complex function)."""
    w = index.bracket(frequencies) ** (2.0 * index.s)
    return float(np.sqrt(np.sum(w * np.abs(coeffs) ** 2) / length))


def hardy_embed(grid: SpectralGrid, coeffs: np.ndarray) -> np.ndarray:
    """Place a one-sided coefficient vector into a full FFT-order array."""
    half = grid.n_points // 2
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape[0] > half:
        raise ContractError("one-sided vector longer than the Hardy lattice")
    out = np.zeros(grid.n_points, dtype=np.complex128)
    out[: coeffs.shape[0]] = coeffs
    return out


def multiplier_apply(field: RealField, symbol, real_output: bool = True):
    """Apply a Fourier multiplier given as a callable xi -> value or an array.

    With ``real_output`` the symbol must be Hermitian (sym(-xi) =
    conj(sym(xi))) on the paired lattice; the unpaired Nyquist mode gets the
    real part of the symbol, which zeroes it for odd (sign-discontinuous)
    symbols.  With ``real_output=False`` the raw coefficient array of the
    complex-valued image is returned instead of a RealField.
    """
    grid = field.grid
    values = symbol(grid.frequencies) if callable(symbol) else np.asarray(symbol)
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != (grid.n_points,):
        raise ContractError("symbol array must have shape (n_points,)")
    if not np.all(np.isfinite(values)):
        raise ContractError("symbol values must be finite")
    if not real_output:
        return field.coeffs * values
    mirrored = np.conj(values[grid._conjugate_index])
    gap = np.abs(values - mirrored)
    gap[grid.nyquist_index] = 0.0  # unpaired; handled below
    scale = max(1.0, float(np.max(np.abs(values))))
    if float(np.max(gap)) > _HERMITIAN_RTOL * scale:
        raise ContractError("non-Hermitian symbol with real-output flag set")
    out = field.coeffs * values
    nyq = grid.nyquist_index
    out[nyq] = field.coeffs[nyq] * values[nyq].real
    return RealField(grid, out)
