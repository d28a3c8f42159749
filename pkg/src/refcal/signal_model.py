"""Synthesis of ideal and impaired CSI tensors from scene descriptions.

Sign conventions, used consistently everywhere downstream:

* a path delay tau enters the subcarrier axis as ``exp(-j 2 pi n df tau)``;
* a per-antenna sampling time offset enters with the *opposite* sign,
  ``exp(+j 2 pi n df tau_sto)``, which is how receive-side sampling
  misalignment shows up in extracted CSI;
* Doppler advances the symbol axis as ``exp(+j 2 pi m f_D T)``;
* steering phases grow along the array as ``exp(+j 2 pi p (d/lambda) sin aoa)``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigurationError
from .types import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    CsiTensor,
    ImpairmentSpec,
    OfdmGrid,
    PathSpec,
    SceneGeometry,
    Target,
    wrap_angle,
)
from .validation import check_csi_dims, check_kind


def steering_vector(aoa: float, geom: ArrayGeometry) -> np.ndarray:
    """Plane-wave phase signature of a wave arriving at ``aoa`` radians off boresight.

    Element p equals exp(j 2 pi p (d/lambda) sin aoa); element 0 is always 1.
    """
    if abs(aoa) > np.pi / 2:
        raise ValueError(f"arrival angle {aoa} rad is outside [-pi/2, pi/2]")
    p = np.arange(geom.num_antennas)
    return np.exp(2j * np.pi * p * (geom.spacing / geom.wavelength) * np.sin(aoa))


def bistatic_range(tx: np.ndarray, point: np.ndarray, rx: np.ndarray) -> float:
    """Total propagation length tx -> point -> rx in meters."""
    return float(np.linalg.norm(point - tx) + np.linalg.norm(rx - point))


def arrival_angle(scene: SceneGeometry, point: np.ndarray) -> float:
    """Signed angle, from the Rx boresight, of the direction Rx -> point."""
    v = np.asarray(point, dtype=float) - scene.rx_position
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("point coincides with the receiver")
    v = v / norm
    n = scene.rx_normal
    return math.atan2(n[0] * v[1] - n[1] * v[0], float(np.dot(n, v)))


def bistatic_range_rate(target: Target, scene: SceneGeometry) -> float:
    """Time derivative of the bistatic range for a moving point target."""
    u_tx = target.position - scene.tx_position
    u_rx = target.position - scene.rx_position
    u_tx = u_tx / np.linalg.norm(u_tx)
    u_rx = u_rx / np.linalg.norm(u_rx)
    return float(np.dot(target.velocity, u_tx + u_rx))


def _path_gain(length: float, scale: float, carrier_frequency: float) -> complex:
    # Simple 1/L spreading; carrier phase makes gains complex and geometry-dependent.
    tau = length / SPEED_OF_LIGHT
    return (scale / length) * np.exp(-2j * np.pi * carrier_frequency * tau)


def scene_to_paths(scene: SceneGeometry, grid: OfdmGrid, *,
                   los_gain: float = 1.0, reflector_gain: float = 1.0,
                   target_gain: float = 0.5) -> tuple[list[PathSpec], int]:
    """Expand a scene into propagation paths; returns (paths, reference path index).

    The direct path is the reference when present; otherwise the reflector
    bounce is. The reference is static by construction, so its Doppler is 0.
    A closing target (shrinking bistatic range) gets positive Doppler.
    """
    paths: list[PathSpec] = []
    ref_index = -1
    fc = grid.carrier_frequency

    if not scene.los_blocked:
        length = bistatic_range(scene.tx_position, scene.tx_position, scene.rx_position)
        paths.append(PathSpec(
            delay=length / SPEED_OF_LIGHT,
            doppler=0.0,
            aoa=arrival_angle(scene, scene.tx_position),
            gain=_path_gain(length, los_gain, fc),
        ))
        ref_index = 0

    if scene.reference_reflector_position is not None:
        length = bistatic_range(scene.tx_position, scene.reference_reflector_position,
                                scene.rx_position)
        paths.append(PathSpec(
            delay=length / SPEED_OF_LIGHT,
            doppler=0.0,
            aoa=arrival_angle(scene, scene.reference_reflector_position),
            gain=_path_gain(length, reflector_gain, fc),
        ))
        if ref_index < 0:
            ref_index = len(paths) - 1

    for target in scene.targets:
        length = bistatic_range(scene.tx_position, target.position, scene.rx_position)
        doppler = -bistatic_range_rate(target, scene) / grid.wavelength
        paths.append(PathSpec(
            delay=length / SPEED_OF_LIGHT,
            doppler=doppler,
            aoa=arrival_angle(scene, target.position),
            gain=_path_gain(length, target_gain, fc),
        ))

    if ref_index < 0:
        raise ConfigurationError("scene provides neither a direct path nor a reflector path")
    for path in paths:
        if path.delay >= grid.delay_span:
            raise ConfigurationError(
                f"path delay {path.delay:.3e} s aliases beyond the unambiguous span "
                f"{grid.delay_span:.3e} s")
        if abs(path.doppler) >= grid.max_doppler:
            raise ConfigurationError(
                f"path Doppler {path.doppler:.1f} Hz aliases beyond +-{grid.max_doppler:.1f} Hz")
    return paths, ref_index


def ideal_csi(paths: list[PathSpec], grid: OfdmGrid, geom: ArrayGeometry) -> CsiTensor:
    """Superpose paths into the error-free CSI tensor H_p[m, n]."""
    n = np.arange(grid.num_subcarriers)
    m = np.arange(grid.num_symbols)
    data = np.zeros((geom.num_antennas, grid.num_symbols, grid.num_subcarriers),
                    dtype=np.complex128)
    for path in paths:
        if path.delay >= grid.delay_span:
            raise ValueError(f"path delay {path.delay:.3e} s exceeds the unambiguous span")
        if abs(path.doppler) >= grid.max_doppler:
            raise ValueError(f"path Doppler {path.doppler:.1f} Hz would alias")
        a = steering_vector(path.aoa, geom)
        delay_ramp = np.exp(-2j * np.pi * n * grid.subcarrier_spacing * path.delay)
        doppler_ramp = np.exp(2j * np.pi * m * path.doppler * grid.symbol_interval)
        data += path.gain * a[:, None, None] * doppler_ramp[None, :, None] * delay_ramp[None, None, :]
    return CsiTensor(data=data, kind="ideal")


def apply_impairments(csi: CsiTensor, imp: ImpairmentSpec, grid: OfdmGrid) -> CsiTensor:
    """Stamp per-symbol common phase and per-antenna sampling offsets onto ideal CSI.

    Every factor is unit-modulus, so entrywise magnitudes are preserved.
    """
    check_kind(csi, "ideal", "apply_impairments")
    check_csi_dims(csi, grid=grid)
    if imp.num_antennas != csi.num_antennas:
        raise ValueError("impairment STO vector length must equal the antenna count")
    if imp.num_symbols != csi.num_symbols:
        raise ValueError("impairment phase trajectory length must equal the symbol count")
    n = np.arange(grid.num_subcarriers)
    common_phase = np.exp(1j * imp.phase_trajectory)                      # (M,)
    sto_ramp = np.exp(2j * np.pi * np.outer(imp.sto_per_antenna,          # (P, N)
                                            n * grid.subcarrier_spacing))
    data = csi.data * common_phase[None, :, None] * sto_ramp[:, None, :]
    return CsiTensor(data=data, kind="raw")


def add_noise(csi: CsiTensor, snr_db: float | None, seed: int) -> CsiTensor:
    """Add circularly-symmetric complex Gaussian noise at the given SNR.

    ``snr_db`` of None or +inf returns the input unchanged. The SNR is defined
    against the mean entry power of the tensor; output is deterministic in ``seed``.
    """
    if snr_db is None or snr_db == np.inf:
        return CsiTensor(data=csi.data.copy(), kind=csi.kind)
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite (or +inf / None for no noise)")
    signal_power = float(np.mean(np.abs(csi.data) ** 2))
    noise_var = signal_power / (10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    sigma = math.sqrt(noise_var / 2.0)
    noise = rng.normal(0.0, sigma, csi.data.shape) + 1j * rng.normal(0.0, sigma, csi.data.shape)
    return CsiTensor(data=csi.data + noise, kind=csi.kind)


def sample_impairments(grid: OfdmGrid, num_antennas: int, bin_duration: float,
                       rng: np.random.Generator, *,
                       sto_max_bins: int = 40, sto_fraction_of_bin: float = 0.0,
                       cfo_residual_hz: float = 25.0,
                       phase_jitter_scale: float = 1.0) -> ImpairmentSpec:
    """Draw a random impairment realization.

    STOs are integer multiples of the CIR bin by default; ``sto_fraction_of_bin``
    adds uniform sub-bin jitter for studying the quantization floor. The common
    phase trajectory is a residual-CFO slope plus i.i.d. jitter, wrapped.
    """
    bins = rng.integers(0, sto_max_bins + 1, num_antennas).astype(float)
    if sto_fraction_of_bin > 0:
        bins = bins + sto_fraction_of_bin * rng.uniform(0.0, 1.0, num_antennas)
    sto = bins * bin_duration
    m = np.arange(grid.num_symbols)
    jitter = phase_jitter_scale * rng.uniform(-np.pi, np.pi, grid.num_symbols)
    theta = wrap_angle(2.0 * np.pi * cfo_residual_hz * m * grid.symbol_interval + jitter)
    return ImpairmentSpec(sto_per_antenna=sto, phase_trajectory=theta)
