"""Delay-domain processing: oversampled IFFT of CSI and peak region extraction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .types import CirTensor, CsiTensor, OfdmGrid


@dataclass
class RegionOfInterest:
    """Delay bins surrounding the strongest local peaks of a power profile.

    ``member_bins`` holds, for every peak, the contiguous neighbors whose power
    stays within half (-3 dB) of that peak. ``complete`` is False when fewer
    local maxima existed than were requested.
    """

    peak_bins: list[int]
    member_bins: set[int] = field(default_factory=set)
    complete: bool = True


def compute_cir(csi: CsiTensor, ifft_size: int, grid: OfdmGrid) -> CirTensor:
    """Oversampled IFFT along subcarriers: Q_p[m, u] = (1/U) sum_n H_p[m, n] e^{+j2pi un/U}.

    The subcarrier axis is zero-padded from N up to U, so the delay axis has
    bin spacing 1/(spacing * U).
    """
    if ifft_size < csi.num_subcarriers:
        raise ConfigurationError(
            f"IFFT size {ifft_size} is smaller than the subcarrier count {csi.num_subcarriers}")
    data = np.fft.ifft(csi.data, n=ifft_size, axis=2)
    return CirTensor(data=data,
                     bin_duration=1.0 / (grid.subcarrier_spacing * ifft_size),
                     oversample=ifft_size)


def magnitude_profile(cir: CirTensor) -> np.ndarray:
    """Per-bin power averaged over antennas and symbols."""
    return np.mean(np.abs(cir.data) ** 2, axis=(0, 1))


def _circular_local_maxima(profile: np.ndarray) -> list[int]:
    """Indices of local maxima on a circular profile.

    A plateau counts once, at its lowest member index; a constant profile
    degenerates to a single peak at index 0.
    """
    size = profile.shape[0]
    if np.all(profile == profile[0]):
        return [0]
    peaks = []
    visited = np.zeros(size, dtype=bool)
    for start in range(size):
        if visited[start]:
            continue
        value = profile[start]
        run = [start]
        visited[start] = True
        j = (start + 1) % size
        while profile[j] == value and not visited[j]:
            run.append(j)
            visited[j] = True
            j = (j + 1) % size
        i = (start - 1) % size
        while profile[i] == value and not visited[i]:
            run.append(i)
            visited[i] = True
            i = (i - 1) % size
        if profile[i] < value and profile[j] < value:
            peaks.append(min(run))
    return peaks


def find_region_of_interest(profile: np.ndarray, num_peaks: int = 2) -> RegionOfInterest:
    """Locate the ``num_peaks`` largest local maxima and their -3 dB neighborhoods.

    Adjacency is circular. Equal-valued peaks are ranked lower-index-first.
    If the profile has fewer local maxima than requested, the result carries
    what exists with ``complete=False``.
    """
    profile = np.asarray(profile, dtype=float)
    if num_peaks < 1:
        raise ValueError("num_peaks must be at least 1")
    if profile.ndim != 1 or profile.shape[0] < 3:
        raise ValueError("profile must be 1-D with at least 3 bins")
    size = profile.shape[0]

    maxima = _circular_local_maxima(profile)
    maxima.sort(key=lambda u: (-profile[u], u))
    selected = maxima[:num_peaks]

    members: set[int] = set()
    for peak in selected:
        threshold = profile[peak] / 2.0
        members.add(peak)
        for step in (1, -1):
            u = peak
            for _ in range(size - 1):
                u = (u + step) % size
                if profile[u] >= threshold:
                    members.add(u)
                else:
                    break
    return RegionOfInterest(peak_bins=selected, member_bins=members,
                            complete=len(selected) >= num_peaks)


def concat_symbols(cirs: list[CirTensor]) -> CirTensor:
    """Stack CIR tensors along the symbol (slow-time) axis, e.g. successive frames."""
    if not cirs:
        raise ValueError("need at least one CIR tensor")
    first = cirs[0]
    for cir in cirs[1:]:
        if cir.oversample != first.oversample or cir.bin_duration != first.bin_duration:
            raise ValueError("all CIR tensors must share the same delay axis")
    return CirTensor(data=np.concatenate([c.data for c in cirs], axis=1),
                     bin_duration=first.bin_duration, oversample=first.oversample)
