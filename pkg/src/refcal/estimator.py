"""Scikit-learn style wrapper so the calibration composes with the wider ecosystem."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .aoa import default_angle_grid
from .calibration import (
    ReferenceInfo,
    calibrate_csi,
    divide_calibrate,
    extract_reference_response,
    reconstruct_steering,
)
from .cir import compute_cir
from .sto import compensate_relative_sto
from .types import ArrayGeometry, CsiTensor, OfdmGrid
from .validation import as_csi, check_csi_dims


class ReferencePathCalibrator(BaseEstimator, TransformerMixin):
    """Removes per-antenna sampling offsets and per-symbol phase from raw CSI.

    ``fit`` learns the frame-stable quantities from one raw CSI tensor: the
    per-antenna bin shifts and the reference tap (sampling offsets and the
    reference geometry do not change between frames). ``transform`` applies
    them to a raw tensor and re-extracts that tensor's own per-symbol
    reference response, so the per-symbol phase cancellation is exact for the
    frame being transformed.

    Parameters
    ----------
    grid : OfdmGrid
        Reference-signal grid the CSI was extracted on.
    array : ArrayGeometry
        Uniform linear receive array.
    reference : ReferenceInfo
        Known range/angle of the reference path and the match tolerance.
    ifft_size : int
        Delay-domain oversampling (power of two, >= subcarrier count).
    num_peaks : int
        How many CIR peaks to consider when searching for the reference.
    angle_grid_step_deg : float
        Spectral search resolution for per-tap angle estimation.
    min_reference_power_db : float
        Required margin of the reference tap over the median CIR level.
    reference_cv_warning : float
        Symbol-to-symbol magnitude variation that triggers a stability warning.

    Attributes
    ----------
    shifts_ : ShiftEstimate
        Per-antenna relative sampling offsets, in delay bins.
    reference_ : ReferenceMatch
        Tap bin and matched angle of the reference path.
    tap_aoas_ : list of AoaEstimate
        Angle estimates for every inspected peak.
    roi_ : RegionOfInterest
        Peak region of the aligned delay profile.
    """

    def __init__(self, grid: OfdmGrid, array: ArrayGeometry, reference: ReferenceInfo,
                 ifft_size: int = 1024, num_peaks: int = 2,
                 angle_grid_step_deg: float = 0.5, min_reference_power_db: float = 10.0,
                 reference_cv_warning: float = 0.1):
        self.grid = grid
        self.array = array
        self.reference = reference
        self.ifft_size = ifft_size
        self.num_peaks = num_peaks
        self.angle_grid_step_deg = angle_grid_step_deg
        self.min_reference_power_db = min_reference_power_db
        self.reference_cv_warning = reference_cv_warning

    def fit(self, X, y=None):
        """Estimate antenna shifts and locate the reference tap from one raw frame."""
        csi = check_csi_dims(as_csi(X, kind="raw"), grid=self.grid, geom=self.array)
        result = calibrate_csi(
            csi, self.grid, self.array, self.reference,
            ifft_size=self.ifft_size, num_peaks=self.num_peaks,
            angle_grid=default_angle_grid(self.angle_grid_step_deg),
            min_reference_power_db=self.min_reference_power_db,
            reference_cv_warning=self.reference_cv_warning)
        self.shifts_ = result.shifts
        self.roi_ = result.roi
        self.tap_aoas_ = result.tap_aoas
        self.reference_ = result.reference
        self.warnings_ = result.warnings
        return self

    def transform(self, X):
        """Calibrate a raw CSI tensor; returns the same container type as the input."""
        if not hasattr(self, "reference_"):
            raise NotFittedError("ReferencePathCalibrator must be fitted before transform")
        csi = check_csi_dims(as_csi(X, kind="raw"), grid=self.grid, geom=self.array)
        aligned = compensate_relative_sto(csi, self.shifts_, self.grid)
        cir = compute_cir(aligned, self.ifft_size, self.grid)
        refresp = extract_reference_response(
            cir, self.reference_.tap_bin,
            min_power_ratio_db=self.min_reference_power_db,
            magnitude_cv_warning=self.reference_cv_warning)
        divided = divide_calibrate(aligned, refresp, self.reference,
                                   self.reference_.tap_bin, cir.bin_duration, self.grid)
        calibrated = reconstruct_steering(divided, self.reference.known_aoa, self.array)
        if isinstance(X, CsiTensor):
            return calibrated
        return calibrated.data
