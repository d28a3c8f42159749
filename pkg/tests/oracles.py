"""Independent brute-force references for the vectorized implementations.

Everything here is deliberately scalar / pure-python (cmath, explicit loops)
so that it shares no code path with the package under test.
"""

import cmath


def csi_scalar(paths, grid, num_antennas, spacing, wavelength):
    """Triple-loop evaluation of the multipath CSI sum, entry by entry."""
    out = [[[0j for _ in range(grid.num_subcarriers)]
            for _ in range(grid.num_symbols)]
           for _ in range(num_antennas)]
    for p in range(num_antennas):
        for m in range(grid.num_symbols):
            for n in range(grid.num_subcarriers):
                acc = 0j
                for path in paths:
                    steer = cmath.exp(2j * cmath.pi * p * (spacing / wavelength)
                                      * cmath.sin(path.aoa))
                    delay = cmath.exp(-2j * cmath.pi * n * grid.subcarrier_spacing * path.delay)
                    dopp = cmath.exp(2j * cmath.pi * m * path.doppler * grid.symbol_interval)
                    acc += path.gain * steer * delay * dopp
                out[p][m][n] = acc
    return out


def impair_scalar(csi_entries, theta, sto, grid):
    """Entrywise application of the per-symbol phase and per-antenna offset ramps."""
    num_antennas = len(csi_entries)
    num_symbols = len(csi_entries[0])
    num_subcarriers = len(csi_entries[0][0])
    out = [[[0j] * num_subcarriers for _ in range(num_symbols)] for _ in range(num_antennas)]
    for p in range(num_antennas):
        for m in range(num_symbols):
            for n in range(num_subcarriers):
                factor = cmath.exp(1j * theta[m]) * cmath.exp(
                    2j * cmath.pi * n * grid.subcarrier_spacing * sto[p])
                out[p][m][n] = factor * csi_entries[p][m][n]
    return out


def relevance_scan(ref_mag, other_mag, member_bins):
    """Exhaustive circular-slide scan; returns (best_shift, best_score)."""
    size = len(ref_mag)
    best_shift, best_score = 0, float("-inf")
    for shift in range(size):
        score = 0.0
        for u in member_bins:
            score += abs(ref_mag[u]) * abs(other_mag[(u + shift) % size])
        if score > best_score:
            best_shift, best_score = shift, score
    return best_shift, best_score


def slow_time_power(samples, symbol_interval, frequency, window):
    """Direct windowed DFT power of a slow-time sample sequence at one frequency."""
    acc = 0j
    for m, value in enumerate(samples):
        acc += window[m] * value * cmath.exp(-2j * cmath.pi * frequency * m * symbol_interval)
    return abs(acc) ** 2


def dirichlet_power(offset_bins, num_subcarriers, ifft_size):
    """|(1/U) sum_n exp(2j pi n x)|^2 at x = offset_bins / U: the kernel a single
    path paints across the oversampled delay axis."""
    x = offset_bins / ifft_size
    acc = 0j
    for n in range(num_subcarriers):
        acc += cmath.exp(2j * cmath.pi * n * x)
    return abs(acc / ifft_size) ** 2
