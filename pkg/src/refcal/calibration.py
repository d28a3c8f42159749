"""Reference-path identification and system-error removal.

A static path of known geometry (the direct Tx-Rx path, or a bounce off a
deployed reflector when that path is blocked) experiences the same per-symbol
phase and residual sampling offset as every other path. Dividing the aligned
CSI by the unit-normalized per-symbol response at the reference tap cancels
the per-symbol phase exactly; a ramp built from the known reference delay
minus the measured tap position restores absolute timing; re-multiplying the
reference steering vector undoes what the division did to the array phases.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .aoa import AoaEstimate, default_angle_grid, estimate_taps_aoa
from .cir import RegionOfInterest, compute_cir, find_region_of_interest, magnitude_profile
from .errors import ReferenceNotFoundError, ReferenceStabilityWarning, WeakReferenceError
from .signal_model import arrival_angle, bistatic_range, steering_vector
from .sto import REFERENCE_ANTENNA, ShiftEstimate, compensate_relative_sto, estimate_relative_sto
from .types import SPEED_OF_LIGHT, ArrayGeometry, CirTensor, CsiTensor, OfdmGrid, SceneGeometry
from .validation import check_csi_dims, check_kind


@dataclass(frozen=True)
class ReferenceInfo:
    """Known geometry of the reference path: total range (m), arrival angle (rad)."""

    known_range: float
    known_aoa: float
    aoa_match_tolerance: float = np.deg2rad(3.0)

    def __post_init__(self):
        if self.known_range <= 0:
            raise ValueError("reference range must be positive")
        if self.aoa_match_tolerance <= 0:
            raise ValueError("AoA match tolerance must be positive")

    @property
    def known_delay(self) -> float:
        return self.known_range / SPEED_OF_LIGHT


@dataclass(frozen=True)
class ReferenceMatch:
    """The delay tap identified as the reference path."""

    tap_bin: int
    matched_aoa: float
    residual: float


def reference_info_from_scene(scene: SceneGeometry, *,
                              aoa_match_tolerance: float = np.deg2rad(3.0)) -> ReferenceInfo:
    """Derive the known reference range/angle from scene geometry.

    Uses the direct path when present, otherwise the reflector bounce.
    """
    if not scene.los_blocked:
        point = scene.tx_position
        rng = float(np.linalg.norm(scene.rx_position - scene.tx_position))
    else:
        point = scene.reference_reflector_position
        rng = bistatic_range(scene.tx_position, point, scene.rx_position)
    return ReferenceInfo(known_range=rng, known_aoa=arrival_angle(scene, point),
                         aoa_match_tolerance=aoa_match_tolerance)


def identify_reference(taps: list[AoaEstimate], ref: ReferenceInfo) -> ReferenceMatch:
    """Pick the tap whose estimated angle best matches the known reference angle.

    Only taps within the configured tolerance qualify; equal residuals resolve
    to the earliest tap (a direct path arrives before any bounce).
    """
    if not taps:
        raise ValueError("no tap estimates to match against")
    qualified = [(abs(t.aoa - ref.known_aoa), t.tap_bin, t) for t in taps
                 if abs(t.aoa - ref.known_aoa) <= ref.aoa_match_tolerance]
    if not qualified:
        best = min(abs(t.aoa - ref.known_aoa) for t in taps)
        raise ReferenceNotFoundError(
            f"no tap within {np.rad2deg(ref.aoa_match_tolerance):.2f} deg of the reference "
            f"angle {np.rad2deg(ref.known_aoa):.2f} deg (closest residual "
            f"{np.rad2deg(best):.2f} deg); the reference path may be blocked")
    residual, _, tap = min(qualified, key=lambda q: (q[0], q[1]))
    return ReferenceMatch(tap_bin=tap.tap_bin, matched_aoa=tap.aoa, residual=residual)


def extract_reference_response(cir: CirTensor, tap_bin: int, *,
                               min_power_ratio_db: float = 10.0,
                               magnitude_cv_warning: float = 0.1) -> np.ndarray:
    """Per-antenna, per-symbol complex response at the reference tap.

    For a static reference this is (common per-symbol phase) x (steering) x (gain),
    with magnitudes constant over symbols up to noise. Raises when the tap does
    not clear the median profile level by ``min_power_ratio_db``; warns when the
    tap magnitude varies over symbols (a dynamic path may overlap it).
    """
    if not 0 <= tap_bin < cir.oversample:
        raise ValueError(f"tap bin {tap_bin} outside [0, {cir.oversample})")
    response = cir.data[:, :, tap_bin].copy()            # (P, M)

    profile = magnitude_profile(cir)
    floor = float(np.median(profile))
    tap_power = float(np.mean(np.abs(response) ** 2))
    if floor > 0 and tap_power < floor * 10.0 ** (min_power_ratio_db / 10.0):
        margin = 10.0 * np.log10(tap_power / floor) if tap_power > 0 else -np.inf
        raise WeakReferenceError(
            f"reference tap {tap_bin} is only {margin:.1f} dB above the median CIR level "
            f"(need {min_power_ratio_db:.1f} dB)")

    mags = np.abs(response)
    means = mags.mean(axis=1)
    if np.any(means == 0):
        raise WeakReferenceError(f"reference tap {tap_bin} vanishes on some antenna")
    cv = float(np.max(mags.std(axis=1) / means))
    if cv > magnitude_cv_warning:
        warnings.warn(
            f"reference tap magnitude varies over symbols (cv={cv:.3f}); "
            "a moving path may overlap the reference tap",
            ReferenceStabilityWarning, stacklevel=2)
    return response


def divide_calibrate(csi: CsiTensor, reference_response: np.ndarray, ref: ReferenceInfo,
                     tap_bin: int, bin_duration: float, grid: OfdmGrid) -> CsiTensor:
    """Cancel the per-symbol phase and restore absolute timing by reference division.

    Multiplies by exp(-j 2 pi n df (tau_ref - u_r delta)) and divides by the
    unit-normalized reference response. Dividing by the *normalized* response
    keeps each path's absolute gain; only phases are corrected.
    """
    check_kind(csi, "aligned", "divide_calibrate")
    check_csi_dims(csi, grid=grid)
    reference_response = np.asarray(reference_response)
    if reference_response.shape != (csi.num_antennas, csi.num_symbols):
        raise ValueError("reference response must be (antennas, symbols)")
    if np.any(reference_response == 0):
        p, m = np.argwhere(reference_response == 0)[0]
        raise ZeroDivisionError(
            f"reference response vanishes at antenna {p}, symbol {m}; reference dropout")

    n = np.arange(csi.num_subcarriers)
    timing = np.exp(-2j * np.pi * n * grid.subcarrier_spacing
                    * (ref.known_delay - tap_bin * bin_duration))
    unit_ref = reference_response / np.abs(reference_response)
    data = csi.data * timing[None, None, :] / unit_ref[:, :, None]
    return CsiTensor(data=data, kind="aligned")


def reconstruct_steering(csi_div: CsiTensor, ref_aoa: float, geom: ArrayGeometry) -> CsiTensor:
    """Re-multiply the reference steering vector that the division removed."""
    check_csi_dims(csi_div, geom=geom)
    a_ref = steering_vector(ref_aoa, geom)
    return CsiTensor(data=csi_div.data * a_ref[:, None, None], kind="calibrated")


@dataclass
class CalibrationResult:
    """Calibrated CSI plus the intermediate estimates the pipeline produced."""

    csi_calibrated: CsiTensor
    cir_aligned: CirTensor
    shifts: ShiftEstimate
    roi: RegionOfInterest
    tap_aoas: list[AoaEstimate]
    reference: ReferenceMatch
    warnings: list[str] = field(default_factory=list)


def calibrate_csi(csi_raw: CsiTensor | np.ndarray, grid: OfdmGrid, geom: ArrayGeometry,
                  reference: ReferenceInfo, *, ifft_size: int = 1024, num_peaks: int = 2,
                  angle_grid: np.ndarray | None = None,
                  min_reference_power_db: float = 10.0,
                  reference_cv_warning: float = 0.1) -> CalibrationResult:
    """Full calibration chain: align antennas, find the reference, divide, reconstruct.

    Steps: delay-domain transform of the raw CSI; region of interest on the
    reference antenna; circular-match alignment of the remaining antennas;
    fresh delay transform; per-tap angle estimation over the strongest peaks;
    angle match against the known reference; division calibration and steering
    reconstruction.
    """
    if not isinstance(csi_raw, CsiTensor):
        csi_raw = CsiTensor(data=np.asarray(csi_raw), kind="raw")
    check_csi_dims(csi_raw, grid=grid, geom=geom)
    if angle_grid is None:
        angle_grid = default_angle_grid()

    cir_raw = compute_cir(csi_raw, ifft_size, grid)
    ref_ant_profile = np.mean(np.abs(cir_raw.data[REFERENCE_ANTENNA]) ** 2, axis=0)
    roi_align = find_region_of_interest(ref_ant_profile, num_peaks=num_peaks)
    shifts = estimate_relative_sto(cir_raw, roi_align)
    csi_aligned = compensate_relative_sto(csi_raw, shifts, grid)

    cir_aligned = compute_cir(csi_aligned, ifft_size, grid)
    roi = find_region_of_interest(magnitude_profile(cir_aligned), num_peaks=num_peaks)
    tap_aoas = estimate_taps_aoa(cir_aligned, roi, geom, angle_grid)
    match = identify_reference(tap_aoas, reference)

    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ReferenceStabilityWarning)
        refresp = extract_reference_response(
            cir_aligned, match.tap_bin,
            min_power_ratio_db=min_reference_power_db,
            magnitude_cv_warning=reference_cv_warning)
    notes.extend(str(w.message) for w in caught)

    csi_div = divide_calibrate(csi_aligned, refresp, reference, match.tap_bin,
                               cir_aligned.bin_duration, grid)
    csi_cal = reconstruct_steering(csi_div, reference.known_aoa, geom)
    return CalibrationResult(csi_calibrated=csi_cal, cir_aligned=cir_aligned,
                             shifts=shifts, roi=roi, tap_aoas=tap_aoas,
                             reference=match, warnings=notes)
