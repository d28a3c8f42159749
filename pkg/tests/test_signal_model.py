import numpy as np
import pytest

from refcal import (
    SPEED_OF_LIGHT,
    ArrayGeometry,
    ConfigurationError,
    CsiTensor,
    ImpairmentSpec,
    OfdmGrid,
    PathSpec,
    SceneGeometry,
    Target,
    add_noise,
    apply_impairments,
    bistatic_range,
    compute_cir,
    ideal_csi,
    sample_impairments,
    scene_to_paths,
    steering_vector,
    wrap_angle,
)
from conftest import IFFT_SIZE, assert_allclose_complex
from oracles import csi_scalar, impair_scalar


def random_paths(rng, grid, max_paths=3):
    num = rng.integers(1, max_paths + 1)
    paths = []
    for _ in range(num):
        paths.append(PathSpec(
            delay=rng.uniform(0.0, 0.9) * grid.delay_span,
            doppler=rng.uniform(-0.4, 0.4) / grid.symbol_interval,
            aoa=rng.uniform(-80, 80) * np.pi / 180,
            gain=complex(rng.uniform(0.2, 1.0) * np.exp(1j * rng.uniform(-np.pi, np.pi)))))
    return paths


class TestSteeringVector:
    def test_boresight_is_all_ones(self, ula):
        np.testing.assert_array_equal(steering_vector(0.0, ula), np.ones(8, dtype=complex))

    def test_minus_45_deg_phases(self):
        # 2 pi p 0.5 sin(-45deg) = -p * pi * sqrt(2)/2
        geom = ArrayGeometry(num_antennas=3, spacing=0.5, wavelength=1.0)
        vec = steering_vector(np.deg2rad(-45.0), geom)
        expected = np.array([0.0, -2.221441469079183, -4.442882938158366])
        np.testing.assert_allclose(np.unwrap(np.angle(vec)), expected, atol=1e-12)
        assert vec[0] == 1 + 0j

    def test_plus_30_deg_phase_step(self):
        geom = ArrayGeometry(num_antennas=6, spacing=0.5, wavelength=1.0)
        vec = steering_vector(np.deg2rad(30.0), geom)
        steps = np.angle(vec[1:] / vec[:-1])
        np.testing.assert_allclose(steps, np.pi / 2, rtol=1e-12)

    def test_negated_angle_conjugates(self, ula):
        rng = np.random.default_rng(0)
        for aoa in rng.uniform(-np.pi / 2 * 0.99, np.pi / 2 * 0.99, 25):
            np.testing.assert_allclose(steering_vector(-aoa, ula),
                                       np.conj(steering_vector(aoa, ula)), rtol=1e-12)

    def test_out_of_range_angle_raises(self, ula):
        with pytest.raises(ValueError):
            steering_vector(1.7, ula)


class TestSceneToPaths:
    def test_direct_path_range_3m(self, los_scene, grid):
        paths, ref_idx = scene_to_paths(los_scene, grid)
        ref = paths[ref_idx]
        assert ref.delay == pytest.approx(3.0 / SPEED_OF_LIGHT, rel=1e-12)
        assert ref.delay == pytest.approx(10.0069e-9, abs=1e-13)
        assert np.rad2deg(ref.aoa) == pytest.approx(-45.0, abs=1e-9)

    def test_reflector_path_geometry(self, nlos_scene, grid):
        paths, ref_idx = scene_to_paths(nlos_scene, grid)
        ref = paths[ref_idx]
        assert ref.delay * SPEED_OF_LIGHT == pytest.approx(26.77, abs=0.01)
        assert np.rad2deg(ref.aoa) == pytest.approx(38.5, abs=0.1)
        assert ref.doppler == 0.0

    def test_static_target_has_zero_doppler(self, los_scene, grid):
        paths, _ = scene_to_paths(los_scene, grid)
        assert paths[-1].doppler == 0.0

    def test_doppler_matches_finite_difference(self, grid):
        velocity = np.array([0.3, -0.2])
        scene = SceneGeometry([0, 0], [-3, 0], [2 ** -0.5, 2 ** -0.5],
                              targets=[Target([-1.0, 2.5], velocity)])
        paths, _ = scene_to_paths(scene, grid)
        dt = 1e-6
        l0 = bistatic_range(scene.tx_position, np.array([-1.0, 2.5]), scene.rx_position)
        l1 = bistatic_range(scene.tx_position, np.array([-1.0, 2.5]) + velocity * dt,
                            scene.rx_position)
        expected = -(l1 - l0) / dt / grid.wavelength
        assert paths[-1].doppler == pytest.approx(expected, rel=1e-5)

    def test_closing_target_gets_positive_doppler(self, grid):
        # velocity pointing at both Tx and Rx shrinks the bistatic range
        scene = SceneGeometry([0, 0], [-3, 0], [2 ** -0.5, 2 ** -0.5],
                              targets=[Target([-1.5, 2.0], [0.0, -1.0])])
        paths, _ = scene_to_paths(scene, grid)
        assert paths[-1].doppler > 0

    def test_aliasing_delay_rejected(self, los_scene):
        wide = OfdmGrid(num_subcarriers=76, subcarrier_spacing=1.2e8, num_symbols=10,
                        symbol_interval=4e-3, carrier_frequency=26e9)
        with pytest.raises(ConfigurationError):
            scene_to_paths(los_scene, wide)

    def test_blocked_scene_requires_reflector(self):
        with pytest.raises(ValueError):
            SceneGeometry([0, 0], [-3, 0], [0, 1], los_blocked=True)


class TestIdealCsi:
    def test_zero_delay_boresight_path_is_all_ones(self, grid, ula):
        paths = [PathSpec(delay=0.0, doppler=0.0, aoa=0.0, gain=1.0 + 0j)]
        csi = ideal_csi(paths, grid, ula)
        assert csi.kind == "ideal"
        np.testing.assert_allclose(csi.data, np.ones_like(csi.data), rtol=1e-12)

    def test_on_grid_delay_gives_dft_column(self, grid, ula):
        k = 5
        tau = k / (grid.num_subcarriers * grid.subcarrier_spacing)
        csi = ideal_csi([PathSpec(tau, 0.0, 0.0, 1.0 + 0j)], grid, ula)
        n = np.arange(grid.num_subcarriers)
        expected = np.exp(-2j * np.pi * n * k / grid.num_subcarriers)
        np.testing.assert_allclose(csi.data[0, 0], expected, rtol=0, atol=1e-12)

    def test_two_path_small_case_matches_scalar_oracle(self):
        grid = OfdmGrid(num_subcarriers=4, subcarrier_spacing=1e6, num_symbols=2,
                        symbol_interval=1e-3, carrier_frequency=3e9)
        geom = ArrayGeometry(num_antennas=2, spacing=0.05, wavelength=0.1)
        paths = [PathSpec(1.2e-7, 40.0, np.deg2rad(20), 0.8 - 0.3j),
                 PathSpec(6.0e-7, -15.0, np.deg2rad(-35), 0.2 + 0.5j)]
        expected = csi_scalar(paths, grid, geom.num_antennas, geom.spacing, geom.wavelength)
        csi = ideal_csi(paths, grid, geom)
        assert_allclose_complex(csi.data, np.array(expected), rtol=1e-12)

    def test_random_instances_match_scalar_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            grid = OfdmGrid(num_subcarriers=int(rng.integers(2, 9)),
                            subcarrier_spacing=rng.uniform(1e5, 1e7),
                            num_symbols=int(rng.integers(2, 5)),
                            symbol_interval=rng.uniform(1e-4, 1e-2),
                            carrier_frequency=1e9)
            geom = ArrayGeometry(num_antennas=int(rng.integers(2, 5)),
                                 spacing=0.5, wavelength=1.0)
            paths = random_paths(rng, grid)
            expected = csi_scalar(paths, grid, geom.num_antennas, geom.spacing, geom.wavelength)
            assert_allclose_complex(ideal_csi(paths, grid, geom).data,
                                    np.array(expected), rtol=1e-12)

    def test_superposition(self, grid, ula):
        rng = np.random.default_rng(11)
        for _ in range(10):
            a = random_paths(rng, grid)
            b = random_paths(rng, grid)
            combined = ideal_csi(a + b, grid, ula)
            split = ideal_csi(a, grid, ula).data + ideal_csi(b, grid, ula).data
            assert_allclose_complex(combined.data, split, rtol=1e-12)


class TestApplyImpairments:
    def test_zero_impairment_is_identity(self, grid, ula):
        csi = ideal_csi([PathSpec(1e-8, 0.0, 0.3, 1.0 + 0j)], grid, ula)
        imp = ImpairmentSpec(np.zeros(8), np.zeros(10))
        raw = apply_impairments(csi, imp, grid)
        np.testing.assert_array_equal(raw.data, csi.data)
        assert raw.kind == "raw"

    def test_integer_bin_sto_rolls_cir(self, grid, ula):
        delta = 1.0 / (grid.subcarrier_spacing * IFFT_SIZE)
        csi = ideal_csi([PathSpec(200 * delta, 0.0, 0.0, 1.0 + 0j)], grid, ula)
        shift_bins = 7
        sto = np.zeros(8)
        sto[3] = shift_bins * delta
        raw = apply_impairments(csi, ImpairmentSpec(sto, np.zeros(10)), grid)
        cir = compute_cir(raw, IFFT_SIZE, grid)
        # positive sampling offset moves the path to earlier delay bins
        rolled = np.roll(cir.data[0, 0], -shift_bins)
        np.testing.assert_allclose(cir.data[3, 0], rolled, rtol=0, atol=1e-12)

    def test_magnitudes_preserved(self, grid, ula):
        rng = np.random.default_rng(5)
        csi = ideal_csi(random_paths(rng, grid), grid, ula)
        delta = 1.0 / (grid.subcarrier_spacing * IFFT_SIZE)
        imp = sample_impairments(grid, 8, delta, rng)
        raw = apply_impairments(csi, imp, grid)
        np.testing.assert_allclose(np.abs(raw.data), np.abs(csi.data), rtol=1e-13)

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(77)
        grid = OfdmGrid(num_subcarriers=6, subcarrier_spacing=2e6, num_symbols=3,
                        symbol_interval=5e-4, carrier_frequency=5e9)
        geom = ArrayGeometry(num_antennas=3, spacing=0.5, wavelength=1.0)
        paths = random_paths(rng, grid)
        theta = wrap_angle(rng.uniform(-4, 4, 3))
        sto = rng.uniform(0, 1e-7, 3)
        clean = ideal_csi(paths, grid, geom)
        raw = apply_impairments(clean, ImpairmentSpec(sto, theta), grid)
        expected = impair_scalar(clean.data.tolist(), theta.tolist(), sto.tolist(), grid)
        assert_allclose_complex(raw.data, np.array(expected), rtol=1e-12)

    def test_requires_ideal_kind(self, grid, ula):
        csi = ideal_csi([PathSpec(1e-8, 0.0, 0.0, 1 + 0j)], grid, ula)
        raw = apply_impairments(csi, ImpairmentSpec(np.zeros(8), np.zeros(10)), grid)
        with pytest.raises(ValueError, match="ideal"):
            apply_impairments(raw, ImpairmentSpec(np.zeros(8), np.zeros(10)), grid)


class TestAddNoise:
    def test_no_noise_sentinels(self, grid, ula):
        csi = ideal_csi([PathSpec(1e-8, 0.0, 0.1, 1 + 0j)], grid, ula)
        for sentinel in (np.inf, None):
            out = add_noise(csi, sentinel, seed=1)
            np.testing.assert_array_equal(out.data, csi.data)

    def test_zero_db_noise_power_within_5_percent(self):
        grid = OfdmGrid(num_subcarriers=256, subcarrier_spacing=1e6, num_symbols=10,
                        symbol_interval=1e-3, carrier_frequency=3e9)
        geom = ArrayGeometry(num_antennas=4, spacing=0.5, wavelength=1.0)
        csi = ideal_csi([PathSpec(2e-7, 0.0, 0.2, 1 + 0j)], grid, geom)
        assert csi.data.size >= 10_000
        noisy = add_noise(csi, 0.0, seed=3)
        signal_power = np.mean(np.abs(csi.data) ** 2)
        noise_power = np.mean(np.abs(noisy.data - csi.data) ** 2)
        assert noise_power == pytest.approx(signal_power, rel=0.05)

    def test_same_seed_bit_identical(self, grid, ula):
        csi = ideal_csi([PathSpec(1e-8, 0.0, 0.0, 1 + 0j)], grid, ula)
        one = add_noise(csi, 10.0, seed=9)
        two = add_noise(csi, 10.0, seed=9)
        np.testing.assert_array_equal(one.data, two.data)
        other = add_noise(csi, 10.0, seed=10)
        assert np.any(other.data != one.data)

    def test_nan_snr_rejected(self, grid, ula):
        csi = ideal_csi([PathSpec(1e-8, 0.0, 0.0, 1 + 0j)], grid, ula)
        with pytest.raises(ValueError):
            add_noise(csi, np.nan, seed=0)


class TestImpairmentSampling:
    def test_integer_bins_and_wrapped_phase(self, grid):
        delta = 1.0 / (grid.subcarrier_spacing * IFFT_SIZE)
        rng = np.random.default_rng(2)
        imp = sample_impairments(grid, 8, delta, rng, sto_max_bins=40)
        bins = imp.sto_per_antenna / delta
        np.testing.assert_allclose(bins, np.round(bins), atol=1e-9)
        assert np.all(bins >= 0) and np.all(bins <= 40)
        assert np.all(imp.phase_trajectory > -np.pi)
        assert np.all(imp.phase_trajectory <= np.pi)

    def test_fractional_bins_opt_in(self, grid):
        delta = 1.0 / (grid.subcarrier_spacing * IFFT_SIZE)
        imp = sample_impairments(grid, 8, delta, np.random.default_rng(2),
                                 sto_max_bins=10, sto_fraction_of_bin=1.0)
        bins = imp.sto_per_antenna / delta
        assert np.any(np.abs(bins - np.round(bins)) > 1e-3)

    def test_unwrapped_trajectory_rejected(self):
        with pytest.raises(ValueError):
            ImpairmentSpec(np.zeros(2), np.array([0.0, 4.0]))


def test_wrap_angle_range():
    angles = wrap_angle(np.array([0.0, np.pi, -np.pi, 3 * np.pi, -2.5 * np.pi, 7.0]))
    assert np.all(angles > -np.pi) and np.all(angles <= np.pi)
    assert angles[0] == 0.0
    assert angles[1] == pytest.approx(np.pi)


def test_csi_tensor_rejects_nonfinite():
    data = np.ones((2, 2, 2), dtype=complex)
    data[0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        CsiTensor(data=data, kind="ideal")
