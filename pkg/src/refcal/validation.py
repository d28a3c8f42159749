"""Input validation helpers shared by the functional API and the estimator."""

from __future__ import annotations

import numpy as np

from .types import ArrayGeometry, CsiTensor, OfdmGrid


def as_csi(X, kind: str = "raw") -> CsiTensor:
    """Coerce an array-like or CsiTensor into a CsiTensor, tagging arrays with ``kind``."""
    if isinstance(X, CsiTensor):
        return X
    return CsiTensor(data=np.asarray(X), kind=kind)


def check_csi_dims(csi: CsiTensor, grid: OfdmGrid | None = None,
                   geom: ArrayGeometry | None = None) -> CsiTensor:
    """Verify a CSI tensor matches the grid/array it claims to come from."""
    if grid is not None:
        if csi.num_symbols != grid.num_symbols or csi.num_subcarriers != grid.num_subcarriers:
            raise ValueError(
                f"CSI shape {csi.data.shape} does not match grid "
                f"(M={grid.num_symbols}, N={grid.num_subcarriers})")
    if geom is not None and csi.num_antennas != geom.num_antennas:
        raise ValueError(
            f"CSI has {csi.num_antennas} antennas but the array has {geom.num_antennas}")
    return csi


def check_kind(csi: CsiTensor, expected: str, op: str) -> CsiTensor:
    """Guard the pipeline stage order: ``op`` expects CSI of the given kind."""
    if csi.kind != expected:
        raise ValueError(f"{op} expects {expected!r} CSI, got {csi.kind!r}")
    return csi


def check_angle_grid(angle_grid) -> np.ndarray:
    grid = np.asarray(angle_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("angle grid must be a non-empty 1-D array of radians")
    if np.any(np.abs(grid) > np.pi / 2):
        raise ValueError("angle grid must stay within [-pi/2, pi/2]")
    return grid
