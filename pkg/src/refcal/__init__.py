"""Reference-path-aided calibration and sensing for bistatic OFDM CSI.

A sensing receiver that extracts CSI under communication-grade synchronization
sees per-antenna sampling time offsets and a per-symbol common phase. This
package synthesizes such impaired CSI from planar scenes, removes the
impairments using a static path of known geometry, and evaluates range,
angle, Doppler, and localization accuracy end to end.
"""

__version__ = "0.1.0"

from .aoa import AoaEstimate, TapSnapshots, default_angle_grid, estimate_taps_aoa, extract_tap_snapshots, music_spectrum
from .calibration import (
    CalibrationResult,
    ReferenceInfo,
    ReferenceMatch,
    calibrate_csi,
    divide_calibrate,
    extract_reference_response,
    identify_reference,
    reconstruct_steering,
    reference_info_from_scene,
)
from .cir import CirTensor, RegionOfInterest, compute_cir, concat_symbols, find_region_of_interest, magnitude_profile
from .errors import (
    ConfigurationError,
    GeometryError,
    ReferenceNotFoundError,
    ReferenceStabilityWarning,
    SensingError,
    WeakReferenceError,
)
from .estimator import ReferencePathCalibrator
from .sensing import (
    DopplerMap,
    Position2D,
    RangeEstimate,
    doppler_map,
    ellipse_ray_range,
    estimate_delay,
    localize,
    sync_error,
)
from .signal_model import (
    add_noise,
    apply_impairments,
    arrival_angle,
    bistatic_range,
    ideal_csi,
    sample_impairments,
    scene_to_paths,
    steering_vector,
)
from .sto import ShiftEstimate, compensate_relative_sto, estimate_relative_sto, relevance
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

__all__ = [
    "__version__",
    "SPEED_OF_LIGHT",
    "AoaEstimate",
    "ArrayGeometry",
    "CalibrationResult",
    "CirTensor",
    "ConfigurationError",
    "CsiTensor",
    "DopplerMap",
    "GeometryError",
    "ImpairmentSpec",
    "OfdmGrid",
    "PathSpec",
    "Position2D",
    "RangeEstimate",
    "ReferenceInfo",
    "ReferenceMatch",
    "ReferenceNotFoundError",
    "ReferencePathCalibrator",
    "ReferenceStabilityWarning",
    "RegionOfInterest",
    "SceneGeometry",
    "SensingError",
    "ShiftEstimate",
    "TapSnapshots",
    "Target",
    "WeakReferenceError",
    "add_noise",
    "apply_impairments",
    "arrival_angle",
    "bistatic_range",
    "calibrate_csi",
    "compensate_relative_sto",
    "compute_cir",
    "concat_symbols",
    "default_angle_grid",
    "divide_calibrate",
    "doppler_map",
    "ellipse_ray_range",
    "estimate_delay",
    "estimate_relative_sto",
    "estimate_taps_aoa",
    "extract_reference_response",
    "extract_tap_snapshots",
    "find_region_of_interest",
    "ideal_csi",
    "identify_reference",
    "localize",
    "magnitude_profile",
    "music_spectrum",
    "reconstruct_steering",
    "reference_info_from_scene",
    "relevance",
    "sample_impairments",
    "scene_to_paths",
    "steering_vector",
    "sync_error",
    "wrap_angle",
]
