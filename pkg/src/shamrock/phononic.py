"""2D elastodynamic plane-wave-expansion bands (plane strain, in-plane
displacements) with anisotropic cubic stiffness.

Vacuum holes are modeled as a soft filler (a small multiple of the solid's
stiffness tensor and density) so the mass matrix stays positive definite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import pwe
from .bands import BandStructure, GapReport, find_gaps
from .geometry import UnitCellGeometry
from .numerics import HermitianProblem, hermitian_eigensolve
from .symmetry import KPath

DEFAULT_FILLER_FACTOR = 1e-6

# GaAs room-temperature stiffness and density (ioffe.ru semiconductor DB);
# config values, not constants of the model.
GAAS_C11 = 118.8e9
GAAS_C12 = 53.8e9
GAAS_C44 = 59.4e9
GAAS_RHO = 5317.0


@dataclass(frozen=True)
class ElasticMaterial:
    """Cubic stiffness constants (Pa), density (kg/m^3), and the in-plane
    rotation of the cubic axes relative to the lattice vectors (radians)."""

    c11: float = GAAS_C11
    c12: float = GAAS_C12
    c44: float = GAAS_C44
    rho: float = GAAS_RHO
    axis_rotation: float = 0.0

    def __post_init__(self):
        if not (self.c11 > 0.0 and self.c44 > 0.0):
            raise ValueError("c11 and c44 must be positive")
        if not self.c11 > abs(self.c12):
            raise ValueError("require c11 > |c12| for in-plane stability")
        if not self.rho > 0.0:
            raise ValueError("density must be positive")

    @property
    def is_isotropic(self) -> bool:
        return math.isclose(self.c12, self.c11 - 2.0 * self.c44, rel_tol=1e-12)

    @property
    def transverse_speed(self) -> float:
        return math.sqrt(self.c44 / self.rho)

    def stiffness_tensor(self) -> np.ndarray:
        """In-plane C_ijkl (2x2x2x2, Pa) rotated by ``axis_rotation``."""
        c = np.zeros((2, 2, 2, 2))
        c[0, 0, 0, 0] = c[1, 1, 1, 1] = self.c11
        c[0, 0, 1, 1] = c[1, 1, 0, 0] = self.c12
        for i, j in ((0, 1), (1, 0)):
            c[i, j, i, j] = c[i, j, j, i] = self.c44
        phi = self.axis_rotation
        if phi == 0.0:
            return c
        r = np.array([[math.cos(phi), -math.sin(phi)],
                      [math.sin(phi), math.cos(phi)]])
        return np.einsum("ia,jb,kc,ld,abcd->ijkl", r, r, r, r, c)


def isotropic_like(material: ElasticMaterial) -> ElasticMaterial:
    """Same c11, c44, rho with c12 forced to the isotropic relation."""
    return ElasticMaterial(
        c11=material.c11,
        c12=material.c11 - 2.0 * material.c44,
        c44=material.c44,
        rho=material.rho,
        axis_rotation=0.0,
    )


def assemble_elastic_operator(
    cell: UnitCellGeometry,
    material: ElasticMaterial,
    k,
    cutoff: int,
    idx: np.ndarray | None = None,
    n_wanted: int | None = None,
    filler_factor: float = DEFAULT_FILLER_FACTOR,
) -> HermitianProblem:
    """Generalized problem A u = (omega a)^2 B u for in-plane displacement.

    A[(p,i),(q,k)] = sum_jl (k+G_p)_j C_ijkl(G_p-G_q) (k+G_q)_l encodes
    div(C : grad u); B carries the density. The stiffness and density
    fields are chi-blends of the solid tensor and the soft filler
    (filler = filler_factor * solid), so both matrices stay Hermitian and
    B positive definite.
    """
    if not filler_factor > 0.0:
        raise ValueError("filler_factor must be positive")
    if idx is None:
        idx = pwe.hex_disk_indices(cutoff)
    c_solid = material.stiffness_tensor()
    c_fill = filler_factor * c_solid
    rho_fill = filler_factor * material.rho

    chi_hat = pwe.coefficient_matrix(cell.chi, idx)
    kg = pwe.bloch_waves(cell, k, idx)
    n_pw = len(idx)

    dc = c_solid - c_fill
    coupling = np.einsum("pj,ijkl,ql->piqk", kg, dc, kg)
    a = coupling * chi_hat[:, None, :, None]
    diag = np.einsum("pj,ijkl,pl->pik", kg, c_fill, kg)
    a[np.arange(n_pw), :, np.arange(n_pw), :] += diag
    a = a.reshape(2 * n_pw, 2 * n_pw)

    drho = material.rho - rho_fill
    rho_hat = drho * chi_hat + rho_fill * np.eye(n_pw)
    b = np.einsum("pq,ik->piqk", rho_hat, np.eye(2)).reshape(2 * n_pw, 2 * n_pw)

    return HermitianProblem(
        matrix_a=a,
        matrix_b=b,
        n_wanted=min(n_wanted or 2 * n_pw, 2 * n_pw),
    )


def elastic_band_structure(
    cell: UnitCellGeometry,
    material: ElasticMaterial,
    kpath: KPath,
    n_bands: int,
    cutoff: int,
    workers: int = 1,
    filler_factor: float = DEFAULT_FILLER_FACTOR,
) -> BandStructure:
    """Elastic bands along the path in units (omega a / 2 pi) / sqrt(c44/rho)."""
    if n_bands < 1:
        raise ValueError("n_bands must be >= 1")
    v_t = material.transverse_speed

    def solve_one(k):
        problem = assemble_elastic_operator(
            cell, material, k, cutoff, n_wanted=n_bands,
            filler_factor=filler_factor,
        )
        values, _ = hermitian_eigensolve(problem)
        return np.sqrt(np.clip(values, 0.0, None)) / (2.0 * math.pi * v_t)

    rows = pwe.solve_k_set(solve_one, kpath.kpoints, workers=workers)
    return BandStructure(
        kpath=kpath,
        frequencies=np.asarray(rows),
        polarization="elastic",
        freq_scale_hz=v_t / cell.lattice.a,
    )


def find_complete_gap(bands: BandStructure) -> GapReport:
    """Gaps common to all computed in-plane branches.

    Bands are sorted per k-point, so an interval between consecutive sorted
    bands is free of modes of every branch; no polarization filtering is
    applied.
    """
    if bands.polarization != "elastic":
        raise ValueError("complete-gap detection expects elastic bands")
    return find_gaps(bands)
