"""Core data types: OFDM reference-signal grid, receive array, paths, scenes, CSI tensors.

All quantities are SI (seconds, meters, Hz, radians). Angles of arrival are
measured from the receive array normal, positive counterclockwise, and must
lie in front of the array. Complex CSI grids are indexed
(antenna p, symbol m, subcarrier n), all 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

CSI_KINDS = ("ideal", "raw", "aligned", "calibrated")


def wrap_angle(theta):
    """Wrap angles to (-pi, pi]."""
    return np.angle(np.exp(1j * np.asarray(theta, dtype=float)))


@dataclass(frozen=True)
class OfdmGrid:
    """Reference-signal grid: N subcarriers spaced ``subcarrier_spacing`` apart,
    M symbols spaced ``symbol_interval`` apart, on carrier ``carrier_frequency``."""

    num_subcarriers: int
    subcarrier_spacing: float
    num_symbols: int
    symbol_interval: float
    carrier_frequency: float

    def __post_init__(self):
        if self.num_subcarriers < 2 or self.num_symbols < 2:
            raise ValueError("grid needs at least 2 subcarriers and 2 symbols")
        if self.subcarrier_spacing <= 0 or self.symbol_interval <= 0 or self.carrier_frequency <= 0:
            raise ValueError("subcarrier spacing, symbol interval and carrier frequency must be positive")

    @property
    def delay_span(self) -> float:
        """Unambiguous delay span 1/spacing; all path delays must fall in [0, delay_span)."""
        return 1.0 / self.subcarrier_spacing

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def max_doppler(self) -> float:
        """Doppler magnitudes must stay below 1/(2 T) to avoid slow-time aliasing."""
        return 0.5 / self.symbol_interval


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear receive array: P elements, ``spacing`` meters apart."""

    num_antennas: int
    spacing: float
    wavelength: float

    def __post_init__(self):
        if self.num_antennas < 2:
            raise ValueError("need at least 2 antennas")
        if self.spacing <= 0 or self.wavelength <= 0:
            raise ValueError("spacing and wavelength must be positive")

    @classmethod
    def half_wavelength(cls, num_antennas: int, carrier_frequency: float) -> "ArrayGeometry":
        lam = SPEED_OF_LIGHT / carrier_frequency
        return cls(num_antennas=num_antennas, spacing=lam / 2.0, wavelength=lam)


@dataclass(frozen=True)
class PathSpec:
    """One propagation path: delay (s), Doppler (Hz), arrival angle (rad), complex gain."""

    delay: float
    doppler: float
    aoa: float
    gain: complex

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError(f"path delay must be non-negative, got {self.delay}")
        if not abs(self.aoa) < np.pi / 2:
            raise ValueError(f"path AoA must lie strictly inside (-pi/2, pi/2), got {self.aoa}")
        if abs(self.gain) <= 0:
            raise ValueError("path gain must be nonzero")


@dataclass(frozen=True)
class ImpairmentSpec:
    """Per-antenna sampling time offsets and the per-symbol common phase trajectory."""

    sto_per_antenna: np.ndarray
    phase_trajectory: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sto_per_antenna", np.asarray(self.sto_per_antenna, dtype=float))
        object.__setattr__(self, "phase_trajectory", np.asarray(self.phase_trajectory, dtype=float))
        if self.sto_per_antenna.ndim != 1 or self.phase_trajectory.ndim != 1:
            raise ValueError("sto_per_antenna and phase_trajectory must be 1-D")
        theta = self.phase_trajectory
        if np.any(theta <= -np.pi) or np.any(theta > np.pi):
            raise ValueError("phase trajectory must be wrapped to (-pi, pi]")

    @property
    def num_antennas(self) -> int:
        return self.sto_per_antenna.shape[0]

    @property
    def num_symbols(self) -> int:
        return self.phase_trajectory.shape[0]


@dataclass(frozen=True)
class Target:
    """Point target: 2-D position (m) and velocity (m/s)."""

    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))
        if self.position.shape != (2,) or self.velocity.shape != (2,):
            raise ValueError("target position and velocity must be 2-vectors")


@dataclass(frozen=True)
class SceneGeometry:
    """Planar scene: Tx/Rx positions, Rx boresight, optional reference reflector, targets.

    The reflector (when present) provides a static bounced path of known
    geometry that can substitute for the direct Tx-Rx path when that path
    is blocked.
    """

    tx_position: np.ndarray
    rx_position: np.ndarray
    rx_normal: np.ndarray
    reference_reflector_position: np.ndarray | None = None
    los_blocked: bool = False
    targets: tuple[Target, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "tx_position", np.asarray(self.tx_position, dtype=float))
        object.__setattr__(self, "rx_position", np.asarray(self.rx_position, dtype=float))
        normal = np.asarray(self.rx_normal, dtype=float)
        if self.tx_position.shape != (2,) or self.rx_position.shape != (2,) or normal.shape != (2,):
            raise ValueError("tx_position, rx_position and rx_normal must be 2-vectors")
        norm = float(np.linalg.norm(normal))
        if norm == 0:
            raise ValueError("rx_normal must be a nonzero direction")
        object.__setattr__(self, "rx_normal", normal / norm)
        if np.array_equal(self.tx_position, self.rx_position):
            raise ValueError("tx and rx positions must differ")
        if self.reference_reflector_position is not None:
            refl = np.asarray(self.reference_reflector_position, dtype=float)
            if refl.shape != (2,):
                raise ValueError("reference_reflector_position must be a 2-vector")
            object.__setattr__(self, "reference_reflector_position", refl)
        elif self.los_blocked:
            raise ValueError("a blocked direct path requires a reference reflector position")
        object.__setattr__(self, "targets", tuple(self.targets))


@dataclass
class CsiTensor:
    """Complex CSI grid of shape (P, M, N) with a processing-stage tag."""

    data: np.ndarray
    kind: str

    def __post_init__(self):
        self.data = np.asarray(self.data)
        if self.data.ndim != 3:
            raise ValueError(f"CSI data must be 3-D (antenna, symbol, subcarrier), got {self.data.ndim}-D")
        if not np.iscomplexobj(self.data):
            self.data = self.data.astype(np.complex128)
        if not np.all(np.isfinite(self.data)):
            raise ValueError("CSI data contains non-finite entries")
        if self.kind not in CSI_KINDS:
            raise ValueError(f"unknown CSI kind {self.kind!r}, expected one of {CSI_KINDS}")

    @property
    def num_antennas(self) -> int:
        return self.data.shape[0]

    @property
    def num_symbols(self) -> int:
        return self.data.shape[1]

    @property
    def num_subcarriers(self) -> int:
        return self.data.shape[2]


@dataclass
class CirTensor:
    """Delay-domain transform of a CSI tensor: shape (P, M, U), bin spacing ``bin_duration``."""

    data: np.ndarray
    bin_duration: float
    oversample: int

    def __post_init__(self):
        self.data = np.asarray(self.data)
        if self.data.ndim != 3:
            raise ValueError("CIR data must be 3-D (antenna, symbol, delay bin)")
        if self.data.shape[2] != self.oversample:
            raise ValueError("delay axis length must equal the IFFT size")
        if self.oversample < 2 or (self.oversample & (self.oversample - 1)) != 0:
            raise ValueError(f"IFFT size must be a power of two, got {self.oversample}")
        if self.bin_duration <= 0:
            raise ValueError("bin duration must be positive")

    @property
    def num_antennas(self) -> int:
        return self.data.shape[0]

    @property
    def num_symbols(self) -> int:
        return self.data.shape[1]
