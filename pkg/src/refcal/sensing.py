"""Range, Doppler, and position extraction from calibrated CSI, plus error metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cir import magnitude_profile
from .errors import GeometryError
from .types import SPEED_OF_LIGHT, CirTensor, OfdmGrid, PathSpec, SceneGeometry


@dataclass
class RangeEstimate:
    """Sub-bin refined delay and the corresponding bistatic range."""

    tap_bin: int
    refined_delay: float
    bistatic_range: float
    refined: bool = True


@dataclass
class DopplerMap:
    """Delay-Doppler power map: rows are delay bins, columns Doppler bins."""

    matrix: np.ndarray
    doppler_axis_hz: np.ndarray
    doppler_resolution: float
    bin_duration: float


@dataclass(frozen=True)
class Position2D:
    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def estimate_delay(cir: CirTensor, tap_bin: int) -> RangeEstimate:
    """Refine a peak bin to sub-bin delay with a three-point log-power parabola.

    Neighbors are circular. If the three log-power points are not a finite
    concave triple the estimate falls back to the bin center, flagged via
    ``refined=False``.
    """
    if not 0 <= tap_bin < cir.oversample:
        raise ValueError(f"tap bin {tap_bin} outside [0, {cir.oversample})")
    profile = magnitude_profile(cir)
    size = profile.shape[0]
    left, mid, right = (profile[(tap_bin - 1) % size], profile[tap_bin],
                        profile[(tap_bin + 1) % size])

    frac = 0.0
    refined = False
    if left > 0 and mid > 0 and right > 0:
        y_l, y_m, y_r = math.log(left), math.log(mid), math.log(right)
        curvature = y_l - 2.0 * y_m + y_r
        if curvature < 0:
            frac = 0.5 * (y_l - y_r) / curvature
            frac = float(np.clip(frac, -0.5, 0.5))
            refined = True

    delay = (tap_bin + frac) * cir.bin_duration
    return RangeEstimate(tap_bin=tap_bin, refined_delay=delay,
                         bistatic_range=SPEED_OF_LIGHT * delay, refined=refined)


def doppler_map(cir: CirTensor, grid: OfdmGrid, window_frames: int = 1, *,
                window: str = "hann", combine: str = "antenna", antenna: int = 0,
                notch_dc: bool = False, notch_width_bins: int = 1) -> DopplerMap:
    """Windowed slow-time DFT per delay bin over ``window_frames`` concatenated frames.

    The CIR must carry window_frames x M symbols (at least 8). ``combine`` picks a
    single antenna ("antenna") or the coherent sum over antennas ("sum"); the sum
    is a boresight beam, only meaningful after calibration. With ``notch_dc`` the
    zero-Doppler column(s) are zeroed to suppress static paths.
    """
    num_symbols = cir.num_symbols
    if window_frames < 1:
        raise ValueError("window_frames must be at least 1")
    if num_symbols != window_frames * grid.num_symbols:
        raise ValueError(
            f"CIR carries {num_symbols} symbols but window_frames x M = "
            f"{window_frames * grid.num_symbols}")
    if num_symbols < 8:
        raise ValueError("need at least 8 slow-time symbols for a Doppler map")

    if combine == "antenna":
        slow_time = cir.data[antenna]                    # (M_total, U)
    elif combine == "sum":
        slow_time = cir.data.sum(axis=0)
    else:
        raise ValueError(f"unknown combine mode {combine!r}")

    if window == "hann":
        taper = np.hanning(num_symbols)
    elif window == "rect":
        taper = np.ones(num_symbols)
    else:
        raise ValueError(f"unknown window {window!r}")

    spectrum = np.fft.fftshift(np.fft.fft(taper[:, None] * slow_time, axis=0), axes=0)
    power = np.abs(spectrum) ** 2
    axis = np.fft.fftshift(np.fft.fftfreq(num_symbols, d=grid.symbol_interval))
    if notch_dc:
        resolution = 1.0 / (num_symbols * grid.symbol_interval)
        half_width = (notch_width_bins - 1) // 2 + 0.5
        power[np.abs(axis) < half_width * resolution, :] = 0.0

    return DopplerMap(matrix=power.T.copy(),
                      doppler_axis_hz=axis,
                      doppler_resolution=1.0 / (num_symbols * grid.symbol_interval),
                      bin_duration=cir.bin_duration)


def rotate_by(direction: np.ndarray, angle: float) -> np.ndarray:
    """Rotate a 2-vector counterclockwise by ``angle`` radians."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * direction[0] - s * direction[1],
                     c * direction[1] + s * direction[0]])


def ellipse_ray_range(bistatic_range_m: float, tx: np.ndarray, rx: np.ndarray,
                      direction: np.ndarray) -> float:
    """Distance from rx, along a unit direction, to the iso-range ellipse with foci tx/rx.

    Closed form: with d = rx - tx and D = |d|, r = (L^2 - D^2) / (2 (L + d . u)).
    """
    d = np.asarray(rx, dtype=float) - np.asarray(tx, dtype=float)
    dist = float(np.linalg.norm(d))
    if bistatic_range_m <= dist:
        raise GeometryError(
            f"bistatic range {bistatic_range_m:.3f} m does not exceed the Tx-Rx "
            f"baseline {dist:.3f} m; the iso-range ellipse is degenerate")
    r = (bistatic_range_m ** 2 - dist ** 2) / (2.0 * (bistatic_range_m + float(np.dot(d, direction))))
    if r <= 0:
        raise GeometryError("the arrival ray does not intersect the iso-range ellipse")
    return r


def localize(range_est: RangeEstimate, aoa: float, scene: SceneGeometry) -> Position2D:
    """Intersect the measured iso-range ellipse with the measured arrival ray."""
    direction = rotate_by(scene.rx_normal, aoa)
    r = ellipse_ray_range(range_est.bistatic_range, scene.tx_position,
                          scene.rx_position, direction)
    point = scene.rx_position + r * direction
    return Position2D(x=float(point[0]), y=float(point[1]))


def sync_error(estimated_range_m: float, true_path: PathSpec) -> float:
    """Absolute timing error, in seconds, of a bistatic range estimate."""
    true_range = SPEED_OF_LIGHT * true_path.delay
    return abs(estimated_range_m - true_range) / SPEED_OF_LIGHT
