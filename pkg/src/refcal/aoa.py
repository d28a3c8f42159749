"""Per-delay-tap angle-of-arrival estimation with subspace spectral search.

At millimeter-wave, multipath is sparse enough that each strong delay tap
carries a single arrival, so the antenna snapshots at one tap form a
rank-one-plus-noise matrix and a one-source MUSIC search per tap suffices.
A per-symbol phase common to all antennas scales whole snapshot columns and
cannot change the covariance eigenvector span, so the search is immune to
the residual synchronization errors still present at this stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cir import RegionOfInterest
from .signal_model import steering_vector
from .types import ArrayGeometry, CirTensor
from .validation import check_angle_grid


@dataclass
class TapSnapshots:
    """Antenna-by-symbol complex amplitudes extracted at one delay bin."""

    tap_bin: int
    snapshots: np.ndarray

    def __post_init__(self):
        self.snapshots = np.asarray(self.snapshots)
        if self.snapshots.ndim != 2:
            raise ValueError("snapshots must be a (antennas, symbols) matrix")
        if not np.all(np.isfinite(self.snapshots)):
            raise ValueError("snapshots contain non-finite entries")


@dataclass
class AoaEstimate:
    """Spectral-search result at one delay tap."""

    tap_bin: int
    aoa: float
    spectrum: np.ndarray
    peak_value: float


def extract_tap_snapshots(cir: CirTensor, tap_bin: int) -> TapSnapshots:
    """Slice the (P, M) complex amplitudes of one delay bin out of a CIR tensor."""
    if not 0 <= tap_bin < cir.oversample:
        raise ValueError(f"tap bin {tap_bin} outside [0, {cir.oversample})")
    return TapSnapshots(tap_bin=tap_bin, snapshots=cir.data[:, :, tap_bin].copy())


def default_angle_grid(step_deg: float = 0.5) -> np.ndarray:
    """Uniform search grid over [-90, 90] degrees, in radians."""
    count = int(round(180.0 / step_deg)) + 1
    return np.deg2rad(np.linspace(-90.0, 90.0, count))


def music_spectrum(snap: TapSnapshots, geom: ArrayGeometry, angle_grid: np.ndarray,
                   num_sources: int = 1) -> AoaEstimate:
    """Noise-subspace spectral search over the angle grid.

    Builds the sample covariance over symbol snapshots, takes the eigenvectors
    of the P - num_sources smallest eigenvalues as the noise subspace E_n, and
    scores spectrum(phi) = 1 / ||E_n^H a(phi)||^2. Exact ties in the peak search
    resolve toward the smaller |angle|.
    """
    num_antennas, num_snapshots = snap.snapshots.shape
    if num_antennas != geom.num_antennas:
        raise ValueError("snapshot rows must match the array size")
    if not 1 <= num_sources < num_antennas:
        raise ValueError("num_sources must satisfy 1 <= num_sources < num_antennas")
    if num_snapshots < 2:
        raise ValueError("need at least 2 symbol snapshots")
    grid = check_angle_grid(angle_grid)

    x = snap.snapshots
    cov = (x @ x.conj().T) / num_snapshots
    eigvals, eigvecs = np.linalg.eigh(cov)               # ascending
    rank = int(np.sum(eigvals > max(eigvals[-1], 0.0) * num_antennas * np.finfo(float).eps))
    if num_sources > rank:
        raise ValueError(
            f"covariance rank {rank} cannot support {num_sources} source(s); "
            "increase the number of symbol snapshots")
    noise_basis = eigvecs[:, : num_antennas - num_sources]

    steering = np.exp(2j * np.pi * np.outer(np.arange(num_antennas),
                                            (geom.spacing / geom.wavelength) * np.sin(grid)))
    projected = noise_basis.conj().T @ steering           # (P - K, G)
    denom = np.sum(np.abs(projected) ** 2, axis=0)
    spectrum = 1.0 / np.maximum(denom, np.finfo(float).tiny)

    peak = spectrum.max()
    candidates = np.flatnonzero(spectrum == peak)
    best = candidates[np.argmin(np.abs(grid[candidates]))]
    return AoaEstimate(tap_bin=snap.tap_bin, aoa=float(grid[best]),
                       spectrum=spectrum, peak_value=float(peak))


def estimate_taps_aoa(cir: CirTensor, roi: RegionOfInterest, geom: ArrayGeometry,
                      angle_grid: np.ndarray) -> list[AoaEstimate]:
    """One single-source angle estimate per ROI peak bin."""
    if not roi.peak_bins:
        raise ValueError("region of interest has no peaks")
    return [music_spectrum(extract_tap_snapshots(cir, u), geom, angle_grid, num_sources=1)
            for u in roi.peak_bins]
