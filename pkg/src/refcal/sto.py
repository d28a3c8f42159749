"""Relative sampling-offset estimation by circular CIR matching, and its removal.

Different receive chains sample with different time offsets, so the same
physical path lands on different delay bins per antenna. Sliding each
antenna's CIR circularly against a fixed reference antenna and maximizing the
amplitude-product overlap inside the region of interest recovers the offset
difference in whole bins; a per-subcarrier phase ramp then removes it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cir import RegionOfInterest
from .types import CirTensor, CsiTensor, OfdmGrid
from .validation import check_csi_dims, check_kind

REFERENCE_ANTENNA = 0


@dataclass
class ShiftEstimate:
    """Per-antenna sampling-offset difference, in delay bins of a U-point CIR.

    ``shifts_bins[p] * bin_duration`` is the offset of antenna p relative to
    the reference antenna (index 0), stored modulo U so entries lie in [0, U).
    """

    shifts_bins: np.ndarray
    relevance_scores: np.ndarray
    ifft_size: int

    def __post_init__(self):
        self.shifts_bins = np.asarray(self.shifts_bins, dtype=int)
        self.relevance_scores = np.asarray(self.relevance_scores, dtype=float)
        if self.shifts_bins[REFERENCE_ANTENNA] != 0:
            raise ValueError("the reference antenna must have zero shift")
        if np.any(self.shifts_bins < 0) or np.any(self.shifts_bins >= self.ifft_size):
            raise ValueError("shifts must lie in [0, U)")


def relevance(cir_ref: np.ndarray, cir_p: np.ndarray, roi: RegionOfInterest,
              shift: int) -> float:
    """Amplitude-product overlap of two CIR vectors at a circular slide.

    Returns sum over the ROI member bins u of |cir_ref[u]| * |cir_p[(u+shift) mod U]|.
    """
    cir_ref = np.asarray(cir_ref)
    cir_p = np.asarray(cir_p)
    size = cir_ref.shape[0]
    if not 0 <= shift < size:
        raise ValueError(f"shift must lie in [0, {size}), got {shift}")
    if not roi.member_bins:
        raise ValueError("region of interest is empty")
    bins = np.fromiter(sorted(roi.member_bins), dtype=int)
    return float(np.sum(np.abs(cir_ref[bins]) * np.abs(cir_p[(bins + shift) % size])))


def estimate_relative_sto(cir: CirTensor, roi: RegionOfInterest) -> ShiftEstimate:
    """Exhaustively search all U circular slides per antenna for the best CIR match.

    Matching uses the symbol-averaged magnitude CIR (robust to the common
    per-symbol phase and to Doppler within a frame). The slide that aligns
    antenna p onto the reference equals the negated sampling-offset difference,
    so the stored shift is the negation, kept in [0, U).
    """
    if cir.num_antennas < 2:
        raise ValueError("need at least 2 antennas to align")
    if not roi.member_bins:
        raise ValueError("region of interest is empty")
    size = cir.oversample
    avg_mag = np.mean(np.abs(cir.data), axis=1)            # (P, U)
    for p in range(cir.num_antennas):
        if not np.any(avg_mag[p]):
            raise ValueError(f"antenna {p} has an all-zero CIR; cannot align")

    bins = np.fromiter(sorted(roi.member_bins), dtype=int)
    ref_weights = avg_mag[REFERENCE_ANTENNA, bins]
    # index table: row s gives the ROI bins slid by s
    slid = (bins[None, :] + np.arange(size)[:, None]) % size

    shifts = np.zeros(cir.num_antennas, dtype=int)
    scores = np.zeros(cir.num_antennas, dtype=float)
    for p in range(cir.num_antennas):
        rel = avg_mag[p][slid] @ ref_weights
        best = int(np.argmax(rel))
        scores[p] = float(rel[best])
        shifts[p] = (-best) % size if p != REFERENCE_ANTENNA else 0
    return ShiftEstimate(shifts_bins=shifts, relevance_scores=scores, ifft_size=size)


def compensate_relative_sto(csi: CsiTensor, est: ShiftEstimate, grid: OfdmGrid) -> CsiTensor:
    """Remove per-antenna offset differences with a phase ramp over subcarriers.

    After compensation every antenna carries the same residual offset (the
    reference antenna's), which the reference-path calibration removes later.
    Entrywise magnitudes are unchanged.
    """
    check_kind(csi, "raw", "compensate_relative_sto")
    check_csi_dims(csi, grid=grid)
    if est.shifts_bins.shape[0] != csi.num_antennas:
        raise ValueError("shift vector length must equal the antenna count")
    n = np.arange(csi.num_subcarriers)
    ramp = np.exp(-2j * np.pi * np.outer(est.shifts_bins, n) / est.ifft_size)  # (P, N)
    return CsiTensor(data=csi.data * ramp[:, None, :], kind="aligned")
