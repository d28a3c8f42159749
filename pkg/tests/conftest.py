import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from refcal import ArrayGeometry, OfdmGrid, SceneGeometry, Target

IFFT_SIZE = 1024


@pytest.fixture
def grid():
    """Prototype-like reference-signal grid: 76 subcarriers at 6.48 MHz, 10 symbols at 4 ms."""
    return OfdmGrid(num_subcarriers=76, subcarrier_spacing=6.48e6, num_symbols=10,
                    symbol_interval=4e-3, carrier_frequency=26e9)


@pytest.fixture
def ula(grid):
    return ArrayGeometry.half_wavelength(8, grid.carrier_frequency)


@pytest.fixture
def los_scene():
    """Tx at origin, Rx 3 m away on the baseline, boresight 45 deg up, one static target."""
    return SceneGeometry(
        tx_position=[0.0, 0.0], rx_position=[-3.0, 0.0],
        rx_normal=[2 ** -0.5, 2 ** -0.5],
        targets=[Target(position=[-1.2, 2.2], velocity=[0.0, 0.0])])


@pytest.fixture
def nlos_scene():
    """Direct path blocked; plate at (-1.5, 13.3) m provides the reference bounce."""
    return SceneGeometry(
        tx_position=[0.0, 0.0], rx_position=[-3.0, 0.0],
        rx_normal=[2 ** -0.5, 2 ** -0.5],
        reference_reflector_position=[-1.5, 13.3], los_blocked=True,
        targets=[Target(position=[-1.2, 2.2], velocity=[0.0, 0.0])])


def assert_allclose_complex(actual, expected, rtol):
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    scale = max(float(np.max(np.abs(expected))), 1e-300)
    np.testing.assert_array_less(np.max(np.abs(actual - expected)) / scale, rtol)
