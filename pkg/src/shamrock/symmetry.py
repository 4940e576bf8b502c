"""Point-group operations of the crystal, the effective irreducible-zone
k-path, and time-reversal/band-symmetry checks."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .geometry import LatticeSpec, reciprocal_basis


class SymmetryError(ValueError):
    pass


@dataclass(frozen=True)
class PointOp:
    """Orthogonal 2x2 point operation with a conventional label."""

    matrix: np.ndarray
    label: str

    def __post_init__(self):
        m = self.matrix
        if np.abs(m.T @ m - np.eye(2)).max() > 1e-12:
            raise SymmetryError(f"{self.label}: matrix is not orthogonal")

    def apply(self, k) -> np.ndarray:
        return np.asarray(k, dtype=float) @ self.matrix.T


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _mirror(axis_angle: float) -> np.ndarray:
    c, s = math.cos(2.0 * axis_angle), math.sin(2.0 * axis_angle)
    return np.array([[c, s], [s, -c]])


def point_group(space_group: str) -> list[PointOp]:
    """Generating point operations of the planar space group.

    p3m1 (C3v, order 6): identity, two three-fold rotations, mirrors on the
    0/60/120-degree lines. p6mm (C6v, order 12) adds the six-fold rotations
    and the 30/90/150-degree mirrors.
    """
    if space_group == "p3m1":
        ops = [PointOp(np.eye(2), "E")]
        ops.append(PointOp(_rotation(2.0 * math.pi / 3.0), "C3"))
        ops.append(PointOp(_rotation(4.0 * math.pi / 3.0), "C3^2"))
        for i, ang in enumerate((0.0, math.pi / 3.0, 2.0 * math.pi / 3.0)):
            ops.append(PointOp(_mirror(ang), f"sigma{i + 1}"))
        return ops
    if space_group == "p6mm":
        ops = [PointOp(np.eye(2), "E")]
        for j in range(1, 6):
            ops.append(PointOp(_rotation(j * math.pi / 3.0), f"C6^{j}"))
        for i in range(6):
            ops.append(PointOp(_mirror(i * math.pi / 6.0), f"sigma{i + 1}"))
        return ops
    raise SymmetryError(f"unknown space group {space_group!r}")


@dataclass(frozen=True)
class KPath:
    """Sampled path through reciprocal space.

    vertices: (label, Cartesian k) pairs. kpoints holds the samples in
    order, path_length the cumulative Cartesian arc length, and
    vertex_indices the sample index of each vertex.
    """

    vertices: tuple
    kpoints: np.ndarray
    path_length: np.ndarray
    vertex_indices: tuple

    def __len__(self) -> int:
        return len(self.kpoints)


def irbz_path(lattice: LatticeSpec, samples_per_segment: int) -> KPath:
    """Gamma-M-K-Gamma path on the effective irreducible Brillouin zone.

    The crystal is p3m1, but time reversal makes the spectra inversion
    symmetric, so the effective wedge and path are those of p6mm. M is the
    midpoint of a reciprocal basis vector, K the adjacent zone corner.
    Total sample count is 3*samples_per_segment + 1 (the closing Gamma).
    """
    if samples_per_segment < 2:
        raise SymmetryError("samples_per_segment must be >= 2")
    b = reciprocal_basis(lattice)
    gamma = np.zeros(2)
    m_point = 0.5 * b[1]
    k_point = (b[0] + 2.0 * b[1]) / 3.0
    vertices = [("Gamma", gamma), ("M", m_point), ("K", k_point), ("Gamma", gamma)]

    kpoints = []
    vertex_indices = [0]
    for (_, start), (_, stop) in zip(vertices[:-1], vertices[1:]):
        ts = np.linspace(0.0, 1.0, samples_per_segment, endpoint=False)
        kpoints.extend(start + t * (stop - start) for t in ts)
        vertex_indices.append(vertex_indices[-1] + samples_per_segment)
    kpoints.append(gamma)
    kpoints = np.asarray(kpoints)

    steps = np.linalg.norm(np.diff(kpoints, axis=0), axis=1)
    path_length = np.concatenate([[0.0], np.cumsum(steps)])
    return KPath(
        vertices=tuple((lbl, tuple(v)) for lbl, v in vertices),
        kpoints=kpoints,
        path_length=path_length,
        vertex_indices=tuple(vertex_indices),
    )


def segment_path(vertices, samples_per_segment: int) -> KPath:
    """Path through arbitrary labeled vertices (used for projected bands)."""
    if samples_per_segment < 2:
        raise SymmetryError("samples_per_segment must be >= 2")
    pts = [(lbl, np.asarray(v, dtype=float)) for lbl, v in vertices]
    kpoints = []
    vertex_indices = [0]
    for (_, start), (_, stop) in zip(pts[:-1], pts[1:]):
        ts = np.linspace(0.0, 1.0, samples_per_segment, endpoint=False)
        kpoints.extend(start + t * (stop - start) for t in ts)
        vertex_indices.append(vertex_indices[-1] + samples_per_segment)
    kpoints.append(pts[-1][1])
    kpoints = np.asarray(kpoints)
    steps = np.linalg.norm(np.diff(kpoints, axis=0), axis=1)
    path_length = np.concatenate([[0.0], np.cumsum(steps)])
    return KPath(
        vertices=tuple((lbl, tuple(v)) for lbl, v in pts),
        kpoints=kpoints,
        path_length=path_length,
        vertex_indices=tuple(vertex_indices),
    )


@dataclass(frozen=True)
class TimeReversalReport:
    max_relative_deviation: float
    per_band: np.ndarray
    worst_band: int
    passed: bool
    tol: float


def check_time_reversal(
    bands_at_k, bands_at_minus_k, tol: float
) -> TimeReversalReport:
    """Compare omega(k) with omega(-k) band by band.

    Relative deviation is scaled by the larger magnitude per band (bands at
    zero compare absolutely against the spectrum scale).
    """
    wk = np.asarray(bands_at_k, dtype=float)
    wmk = np.asarray(bands_at_minus_k, dtype=float)
    if wk.shape != wmk.shape:
        raise SymmetryError(
            f"band count mismatch: {wk.shape} vs {wmk.shape}"
        )
    floor = max(np.abs(wk).max() * 1e-6, 1e-300)
    scale = np.maximum(np.maximum(np.abs(wk), np.abs(wmk)), floor)
    per_band = np.abs(wk - wmk) / scale
    worst = int(np.argmax(per_band))
    return TimeReversalReport(
        max_relative_deviation=float(per_band[worst]),
        per_band=per_band,
        worst_band=worst,
        passed=bool(per_band[worst] <= tol),
        tol=tol,
    )


def export_kpath_csv(path: KPath, file) -> None:
    """CSV columns: index, kx, ky, path_length, label (blank off-vertex)."""
    labels = {idx: lbl for (lbl, _), idx in zip(path.vertices, path.vertex_indices)}
    writer = csv.writer(file, lineterminator="\n")
    writer.writerow(["index", "kx", "ky", "path_length", "label"])
    for i, (k, s) in enumerate(zip(path.kpoints, path.path_length)):
        writer.writerow([i, repr(float(k[0])), repr(float(k[1])), repr(float(s)),
                         labels.get(i, "")])
