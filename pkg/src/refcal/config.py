"""Scenario configuration: a strict, human-editable INI schema with units in key names."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .types import ArrayGeometry, OfdmGrid, SceneGeometry, Target

SCHEMA_VERSION = 1


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    return int(text)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_vec2(text: str) -> tuple[float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {text!r}")
    return float(parts[0]), float(parts[1])


def _parse_targets(text: str) -> list[tuple[float, float, float, float]]:
    text = text.strip()
    if not text:
        return []
    out = []
    for chunk in text.split(";"):
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) != 4:
            raise ValueError(f"each target needs x,y,vx,vy; got {chunk!r}")
        out.append(tuple(float(p) for p in parts))
    return out


def _parse_float_list(text: str) -> list[float]:
    return [float(p.strip()) for p in text.split(",") if p.strip()]


def _parse_window(text: str) -> str:
    value = text.strip().lower()
    if value not in ("hann", "rect"):
        raise ValueError(f"doppler window must be 'hann' or 'rect', got {text!r}")
    return value


def _parse_combine(text: str) -> str:
    value = text.strip().lower()
    if value not in ("antenna", "sum"):
        raise ValueError(f"doppler combine must be 'antenna' or 'sum', got {text!r}")
    return value


# section -> key -> (parser, default); a default of _REQUIRED means the key is mandatory.
_REQUIRED = object()

_SCHEMA: dict[str, dict[str, tuple]] = {
    "meta": {
        "schema_version": (_parse_int, _REQUIRED),
    },
    "grid": {
        "num_rs_subcarriers": (_parse_int, 76),
        "rs_spacing_hz": (_parse_float, 6.48e6),
        "num_rs_symbols": (_parse_int, 10),
        "rs_interval_s": (_parse_float, 4e-3),
        "carrier_frequency_hz": (_parse_float, 26e9),
    },
    "array": {
        "num_antennas": (_parse_int, 8),
        "spacing_wavelengths": (_parse_float, 0.5),
    },
    "scene": {
        "tx_position_m": (_parse_vec2, (0.0, 0.0)),
        "rx_position_m": (_parse_vec2, (-3.0, 0.0)),
        "rx_normal": (_parse_vec2, (0.7071067811865476, 0.7071067811865476)),
        "los_blocked": (_parse_bool, False),
        "reflector_position_m": (_parse_vec2, None),
        "targets": (_parse_targets, [(-1.2, 2.2, 0.0, 0.0)]),
        "los_gain": (_parse_float, 1.0),
        "reflector_gain": (_parse_float, 1.0),
        "target_gain": (_parse_float, 0.5),
    },
    "impairments": {
        "sto_max_bins": (_parse_int, 40),
        "sto_fraction_of_bin": (_parse_float, 0.0),
        "cfo_residual_hz": (_parse_float, 25.0),
        "phase_jitter_scale": (_parse_float, 1.0),
    },
    "pipeline": {
        "ifft_size": (_parse_int, 1024),
        "num_roi_peaks": (_parse_int, 2),
        "angle_grid_step_deg": (_parse_float, 0.5),
        "aoa_match_tolerance_deg": (_parse_float, 3.0),
        "min_reference_power_db": (_parse_float, 10.0),
        "reference_cv_warning": (_parse_float, 0.1),
        "target_guard_bins": (_parse_int, 3),
        "doppler_window": (_parse_window, "hann"),
        "doppler_combine": (_parse_combine, "antenna"),
        "notch_zero_doppler": (_parse_bool, False),
        "export_doppler_map": (_parse_bool, False),
    },
    "run": {
        "num_trials": (_parse_int, 100),
        "seed": (_parse_int, 12345),
        "snr_db_list": (_parse_float_list, [20.0]),
        "no_noise": (_parse_bool, False),
        "target_placement_jitter_m": (_parse_float, 0.25),
    },
}


@dataclass
class ScenarioConfig:
    """Fully resolved scenario: every knob the harness and pipeline need."""

    values: dict[str, dict] = field(default_factory=dict)

    def __post_init__(self):
        if not self.values:
            self.values = {section: {key: spec[1] for key, spec in keys.items()
                                     if spec[1] is not _REQUIRED}
                           for section, keys in _SCHEMA.items()}
            self.values["meta"]["schema_version"] = SCHEMA_VERSION
        self.validate()

    def validate(self):
        if self.values["meta"]["schema_version"] != SCHEMA_VERSION:
            raise ConfigurationError(
                f"meta.schema_version: expected {SCHEMA_VERSION}, "
                f"got {self.values['meta']['schema_version']}")
        if self.values["run"]["num_trials"] < 1:
            raise ConfigurationError("run.num_trials: must be at least 1")
        if not self.values["run"]["snr_db_list"]:
            raise ConfigurationError("run.snr_db_list: must list at least one SNR")
        # Building the domain objects runs their own invariant checks.
        self.grid()
        self.array()
        self.scene()

    def __getitem__(self, section: str) -> dict:
        return self.values[section]

    def grid(self) -> OfdmGrid:
        g = self.values["grid"]
        try:
            return OfdmGrid(num_subcarriers=g["num_rs_subcarriers"],
                            subcarrier_spacing=g["rs_spacing_hz"],
                            num_symbols=g["num_rs_symbols"],
                            symbol_interval=g["rs_interval_s"],
                            carrier_frequency=g["carrier_frequency_hz"])
        except ValueError as exc:
            raise ConfigurationError(f"grid: {exc}") from exc

    def array(self) -> ArrayGeometry:
        a = self.values["array"]
        wavelength = self.grid().wavelength
        try:
            return ArrayGeometry(num_antennas=a["num_antennas"],
                                 spacing=a["spacing_wavelengths"] * wavelength,
                                 wavelength=wavelength)
        except ValueError as exc:
            raise ConfigurationError(f"array: {exc}") from exc

    def scene(self) -> SceneGeometry:
        s = self.values["scene"]
        targets = tuple(Target(position=np.array([t[0], t[1]]),
                               velocity=np.array([t[2], t[3]]))
                        for t in s["targets"])
        reflector = s["reflector_position_m"]
        try:
            return SceneGeometry(
                tx_position=np.array(s["tx_position_m"]),
                rx_position=np.array(s["rx_position_m"]),
                rx_normal=np.array(s["rx_normal"]),
                reference_reflector_position=None if reflector is None else np.array(reflector),
                los_blocked=s["los_blocked"],
                targets=targets)
        except ValueError as exc:
            raise ConfigurationError(f"scene: {exc}") from exc

    def manifest_items(self) -> list[tuple[str, list[tuple[str, str]]]]:
        """Resolved values, serialized for the run manifest (deterministic order)."""
        out = []
        for section in _SCHEMA:
            pairs = []
            for key in _SCHEMA[section]:
                value = self.values[section][key]
                pairs.append((key, _format_value(value)))
            out.append((section, pairs))
        return out


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        if value and isinstance(value[0], (list, tuple)):
            return "; ".join(",".join(repr(float(x)) for x in item) for item in value)
        return ",".join(repr(float(x)) for x in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a scenario INI file; unknown sections or keys are fatal."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except configparser.Error as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc

    values: dict[str, dict] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigurationError(f"{path}: unknown section [{section}]")
    for section, keys in _SCHEMA.items():
        section_values = {}
        present = dict(parser.items(section)) if parser.has_section(section) else {}
        for key in present:
            if key not in keys:
                raise ConfigurationError(f"{path}: unknown key {section}.{key}")
        for key, (converter, default) in keys.items():
            if key in present:
                try:
                    section_values[key] = converter(present[key])
                except ValueError as exc:
                    raise ConfigurationError(f"{path}: {section}.{key}: {exc}") from exc
            elif default is _REQUIRED:
                raise ConfigurationError(f"{path}: missing required key {section}.{key}")
            else:
                section_values[key] = default
        values[section] = section_values
    return ScenarioConfig(values=values)
