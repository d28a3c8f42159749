"""Monte-Carlo trial runner: build scenes, impair, calibrate, sense, export."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .aoa import default_angle_grid, extract_tap_snapshots, music_spectrum
from .calibration import calibrate_csi, reference_info_from_scene
from .cir import compute_cir, find_region_of_interest, magnitude_profile
from .config import ScenarioConfig
from .errors import SensingError
from .sensing import DopplerMap, doppler_map, estimate_delay, localize, sync_error
from .signal_model import add_noise, apply_impairments, ideal_csi, sample_impairments, scene_to_paths
from .types import SceneGeometry, Target


@dataclass
class TrialRecord:
    """Outcome of one Monte-Carlo trial."""

    trial: int
    snr_db: float
    sync_error_s: float = math.nan
    localization_error_m: float = math.nan
    aoa_error_rad: float = math.nan
    reference_found: bool = False
    warnings: list[str] = field(default_factory=list)
    failure: str = ""

    @property
    def succeeded(self) -> bool:
        return self.reference_found and not self.failure


METRICS = ("sync_error_s", "localization_error_m", "aoa_error_rad")


def _jitter_scene(scene: SceneGeometry, jitter: float, rng: np.random.Generator) -> SceneGeometry:
    if jitter <= 0 or not scene.targets:
        return scene
    moved = tuple(Target(position=t.position + rng.uniform(-jitter, jitter, 2),
                         velocity=t.velocity) for t in scene.targets)
    return replace(scene, targets=moved)


def _circular_distance(a: int, b: int, size: int) -> int:
    d = abs(a - b) % size
    return min(d, size - d)


def run_scenario(config: ScenarioConfig, progress=None) -> list[TrialRecord]:
    """Run the configured trial sweep; per-trial pipeline errors are recorded, not fatal.

    Each (snr, repetition) pair consumes an RNG stream derived from
    (seed, snr index, repetition), so extending the sweep never perturbs
    existing trials.
    """
    grid = config.grid()
    geom = config.array()
    base_scene = config.scene()
    if not base_scene.targets:
        raise SensingError("run_scenario needs at least one target in the scene")

    pipe = config["pipeline"]
    imp_cfg = config["impairments"]
    run_cfg = config["run"]
    scene_cfg = config["scene"]
    ref_info = reference_info_from_scene(
        base_scene, aoa_match_tolerance=np.deg2rad(pipe["aoa_match_tolerance_deg"]))
    angle_grid = default_angle_grid(pipe["angle_grid_step_deg"])
    bin_duration = 1.0 / (grid.subcarrier_spacing * pipe["ifft_size"])
    ref_bin = int(round(ref_info.known_delay / bin_duration)) % pipe["ifft_size"]

    records: list[TrialRecord] = []
    total = len(run_cfg["snr_db_list"]) * run_cfg["num_trials"]
    step = max(1, total // 20)
    trial_id = 0
    for snr_index, snr_db in enumerate(run_cfg["snr_db_list"]):
        for rep in range(run_cfg["num_trials"]):
            rng = np.random.default_rng([run_cfg["seed"], snr_index, rep])
            record = TrialRecord(trial=trial_id, snr_db=snr_db)
            try:
                _run_trial(record, rng, grid, geom, base_scene, scene_cfg, imp_cfg,
                           pipe, ref_info, angle_grid, ref_bin, snr_db,
                           run_cfg["no_noise"], run_cfg["target_placement_jitter_m"])
            except SensingError as exc:
                record.failure = f"{type(exc).__name__}: {exc}"
            records.append(record)
            trial_id += 1
            if progress is not None and trial_id % step == 0:
                print(f"trial {trial_id}/{total}", file=progress)
    return records


def _run_trial(record, rng, grid, geom, base_scene, scene_cfg, imp_cfg, pipe,
               ref_info, angle_grid, ref_bin, snr_db, no_noise, jitter):
    scene = _jitter_scene(base_scene, jitter, rng)
    paths, _ = scene_to_paths(scene, grid,
                              los_gain=scene_cfg["los_gain"],
                              reflector_gain=scene_cfg["reflector_gain"],
                              target_gain=scene_cfg["target_gain"])
    target_path = paths[len(paths) - len(scene.targets)]

    clean = ideal_csi(paths, grid, geom)
    imp = sample_impairments(
        grid, geom.num_antennas,
        1.0 / (grid.subcarrier_spacing * pipe["ifft_size"]), rng,
        sto_max_bins=imp_cfg["sto_max_bins"],
        sto_fraction_of_bin=imp_cfg["sto_fraction_of_bin"],
        cfo_residual_hz=imp_cfg["cfo_residual_hz"],
        phase_jitter_scale=imp_cfg["phase_jitter_scale"])
    raw = apply_impairments(clean, imp, grid)
    if not no_noise:
        raw = add_noise(raw, snr_db, seed=int(rng.integers(2 ** 63)))

    result = calibrate_csi(raw, grid, geom, ref_info,
                           ifft_size=pipe["ifft_size"], num_peaks=pipe["num_roi_peaks"],
                           angle_grid=angle_grid,
                           min_reference_power_db=pipe["min_reference_power_db"],
                           reference_cv_warning=pipe["reference_cv_warning"])
    record.reference_found = True
    record.warnings.extend(result.warnings)

    cir_cal = compute_cir(result.csi_calibrated, pipe["ifft_size"], grid)
    roi = find_region_of_interest(magnitude_profile(cir_cal), num_peaks=pipe["num_roi_peaks"])
    guard = pipe["target_guard_bins"]
    target_taps = [u for u in roi.peak_bins
                   if _circular_distance(u, ref_bin, pipe["ifft_size"]) > guard]
    if not target_taps:
        record.failure = "target tap not found"
        return

    range_est = estimate_delay(cir_cal, target_taps[0])
    aoa_est = music_spectrum(extract_tap_snapshots(cir_cal, target_taps[0]),
                             geom, angle_grid, num_sources=1)
    position = localize(range_est, aoa_est.aoa, scene)

    truth = scene.targets[0].position
    record.sync_error_s = sync_error(range_est.bistatic_range, target_path)
    record.localization_error_m = float(np.hypot(position.x - truth[0], position.y - truth[1]))
    record.aoa_error_rad = abs(aoa_est.aoa - target_path.aoa)


def nearest_rank_percentile(values: np.ndarray, q: float) -> float:
    """Nearest-rank percentile: value at rank ceil(q/100 * n) of the sorted sample."""
    ordered = np.sort(np.asarray(values, dtype=float))
    if ordered.size == 0:
        return math.nan
    rank = max(1, math.ceil(q / 100.0 * ordered.size))
    return float(ordered[rank - 1])


@dataclass
class Summary:
    """Aggregate statistics and CDF tables for a trial sweep."""

    metrics: dict[str, dict[str, float]]
    cdfs: dict[str, list[tuple[float, float]]]
    num_trials: int
    num_failed: int


def summarize(records: list[TrialRecord]) -> Summary:
    """Mean, 50/80/95th nearest-rank percentiles, and max per metric, plus CDF tables.

    Failed trials are counted separately and excluded from the statistics.
    """
    good = [r for r in records if r.succeeded]
    metrics = {}
    cdfs = {}
    for name in METRICS:
        values = np.array([getattr(r, name) for r in good if math.isfinite(getattr(r, name))])
        if values.size:
            metrics[name] = {
                "mean": float(values.mean()),
                "p50": nearest_rank_percentile(values, 50),
                "p80": nearest_rank_percentile(values, 80),
                "p95": nearest_rank_percentile(values, 95),
                "max": float(values.max()),
                "count": float(values.size),
            }
            ordered = np.sort(values)
            cdfs[name] = [(float(v), (i + 1) / ordered.size) for i, v in enumerate(ordered)]
        else:
            metrics[name] = {"mean": math.nan, "p50": math.nan, "p80": math.nan,
                             "p95": math.nan, "max": math.nan, "count": 0.0}
            cdfs[name] = []
    return Summary(metrics=metrics, cdfs=cdfs, num_trials=len(records),
                   num_failed=len(records) - len(good))


def scenario_doppler_map(config: ScenarioConfig) -> DopplerMap:
    """One calibrated delay-Doppler map for the configured scene (single realization)."""
    grid = config.grid()
    geom = config.array()
    scene = config.scene()
    pipe = config["pipeline"]
    imp_cfg = config["impairments"]
    run_cfg = config["run"]
    ref_info = reference_info_from_scene(
        scene, aoa_match_tolerance=np.deg2rad(pipe["aoa_match_tolerance_deg"]))

    rng = np.random.default_rng([run_cfg["seed"], 3301])
    paths, _ = scene_to_paths(scene, grid,
                              los_gain=config["scene"]["los_gain"],
                              reflector_gain=config["scene"]["reflector_gain"],
                              target_gain=config["scene"]["target_gain"])
    clean = ideal_csi(paths, grid, geom)
    imp = sample_impairments(grid, geom.num_antennas,
                             1.0 / (grid.subcarrier_spacing * pipe["ifft_size"]), rng,
                             sto_max_bins=imp_cfg["sto_max_bins"],
                             sto_fraction_of_bin=imp_cfg["sto_fraction_of_bin"],
                             cfo_residual_hz=imp_cfg["cfo_residual_hz"],
                             phase_jitter_scale=imp_cfg["phase_jitter_scale"])
    raw = apply_impairments(clean, imp, grid)
    if not run_cfg["no_noise"]:
        raw = add_noise(raw, run_cfg["snr_db_list"][0], seed=int(rng.integers(2 ** 63)))
    result = calibrate_csi(raw, grid, geom, ref_info,
                           ifft_size=pipe["ifft_size"], num_peaks=pipe["num_roi_peaks"],
                           min_reference_power_db=pipe["min_reference_power_db"],
                           reference_cv_warning=pipe["reference_cv_warning"])
    cir_cal = compute_cir(result.csi_calibrated, pipe["ifft_size"], grid)
    return doppler_map(cir_cal, grid, window_frames=1, window=pipe["doppler_window"],
                       combine=pipe["doppler_combine"], notch_dc=pipe["notch_zero_doppler"])


def export(records: list[TrialRecord], summary: Summary, out_dir: str | Path,
           config: ScenarioConfig, doppler: DopplerMap | None = None) -> list[Path]:
    """Write trial records, CDF tables, summary, optional Doppler map, and the manifest.

    Outputs are bit-deterministic for a given (records, config): no timestamps,
    repr-formatted floats.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    trials_path = out / "trials.csv"
    with open(trials_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["trial", "snr_db", "sync_error_s", "localization_error_m",
                         "aoa_error_rad", "reference_found", "failure", "warnings"])
        for r in records:
            writer.writerow([r.trial, repr(float(r.snr_db)), repr(r.sync_error_s),
                             repr(r.localization_error_m), repr(r.aoa_error_rad),
                             "true" if r.reference_found else "false",
                             r.failure, " | ".join(r.warnings)])
    written.append(trials_path)

    for name, table in summary.cdfs.items():
        cdf_path = out / f"cdf_{name}.csv"
        with open(cdf_path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow([name, "cumulative_fraction"])
            for value, fraction in table:
                writer.writerow([repr(value), repr(fraction)])
        written.append(cdf_path)

    summary_path = out / "summary.csv"
    with open(summary_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["metric", "mean", "p50", "p80", "p95", "max", "count"])
        for name, stats in summary.metrics.items():
            writer.writerow([name] + [repr(stats[k]) for k in
                                      ("mean", "p50", "p80", "p95", "max", "count")])
        writer.writerow(["num_trials", repr(float(summary.num_trials)), "", "", "", "", ""])
        writer.writerow(["num_failed", repr(float(summary.num_failed)), "", "", "", "", ""])
    written.append(summary_path)

    if doppler is not None:
        doppler_path = out / "doppler_map.csv"
        with open(doppler_path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["delay_s\\doppler_hz"] +
                            [repr(float(f)) for f in doppler.doppler_axis_hz])
            for u in range(doppler.matrix.shape[0]):
                writer.writerow([repr(u * doppler.bin_duration)] +
                                [repr(float(v)) for v in doppler.matrix[u]])
        written.append(doppler_path)

    manifest_path = out / "run_manifest.txt"
    with open(manifest_path, "w", encoding="utf-8") as handle:
        handle.write("[manifest]\n")
        handle.write(f"tool_version = {__version__}\n")
        handle.write(f"seed = {config['run']['seed']}\n")
        handle.write(f"num_records = {len(records)}\n")
        handle.write(f"num_failed = {summary.num_failed}\n\n")
        for section, pairs in config.manifest_items():
            handle.write(f"[{section}]\n")
            for key, value in pairs:
                handle.write(f"{key} = {value}\n")
            handle.write("\n")
    written.append(manifest_path)
    return written
