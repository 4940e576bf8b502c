"""Plane-wave bookkeeping shared by the photonic and elastic solvers:
reciprocal-index selection, coefficient matrices from the raster FFT, and
the concurrent k-path solve driver."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .geometry import GeometryError, UnitCellGeometry, field_fft, reciprocal_basis


def hex_disk_indices(cutoff: int) -> np.ndarray:
    """Integer (m, n) with m^2 + n^2 - mn <= cutoff^2.

    This is |m b1 + n b2| <= cutoff * |b1| for the hexagonal reciprocal
    basis, evaluated in exact integer arithmetic, so the set is closed
    under the full C6v point group (a square index box is not, which would
    break point-group equality of the spectra at truncation level).
    """
    rng = np.arange(-cutoff, cutoff + 1)
    m, n = np.meshgrid(rng, rng, indexing="ij")
    mask = m * m + n * n - m * n <= cutoff * cutoff
    return np.stack([m[mask], n[mask]], axis=1)


def box_indices(max_m: int, max_n: int) -> np.ndarray:
    """Integer box |m| <= max_m, |n| <= max_n (supercell solves)."""
    mm = np.arange(-max_m, max_m + 1)
    nn = np.arange(-max_n, max_n + 1)
    m, n = np.meshgrid(mm, nn, indexing="ij")
    return np.stack([m.ravel(), n.ravel()], axis=1)


def disk_indices(recip: np.ndarray, g_max: float) -> np.ndarray:
    """All integer (m, n) with |m B1 + n B2| <= g_max (Cartesian norm)."""
    lengths = np.linalg.norm(recip, axis=1)
    max_m = int(np.ceil(g_max / lengths[0] * 2.0)) + 1
    max_n = int(np.ceil(g_max / lengths[1] * 2.0)) + 1
    idx = box_indices(max_m, max_n)
    g = idx @ recip
    return idx[np.linalg.norm(g, axis=1) <= g_max * (1.0 + 1e-12)]


def coefficient_matrix(grid: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """C[p, q] = Fourier coefficient of ``grid`` at G_p - G_q.

    The raster must resolve all index differences: 2*max|index| below the
    grid Nyquist limit in each direction.
    """
    nx, ny = grid.shape
    span_m = int(np.abs(idx[:, 0]).max()) if len(idx) else 0
    span_n = int(np.abs(idx[:, 1]).max()) if len(idx) else 0
    if 2 * span_m >= nx // 2 or 2 * span_n >= ny // 2:
        raise GeometryError(
            f"plane-wave set (spans {span_m}, {span_n}) exceeds the raster "
            f"Nyquist limit for a {nx}x{ny} grid"
        )
    transform = field_fft(grid)
    dm = idx[:, None, 0] - idx[None, :, 0]
    dn = idx[:, None, 1] - idx[None, :, 1]
    return transform[dm % nx, dn % ny]


def bloch_waves(cell: UnitCellGeometry, k, idx: np.ndarray) -> np.ndarray:
    """k + G for each retained index, shape (n_pw, 2)."""
    recip = reciprocal_basis(cell.cell_vectors())
    return np.asarray(k, dtype=float)[None, :] + idx @ recip


def solve_k_set(solve_one, kpoints, workers: int = 1) -> list:
    """Run ``solve_one(k)`` over the k set, optionally in a thread pool.

    Results are joined in input order regardless of completion order, so
    output is deterministic for any worker count.
    """
    kpoints = list(kpoints)
    if workers <= 1 or len(kpoints) <= 1:
        return [solve_one(k) for k in kpoints]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(solve_one, kpoints))
