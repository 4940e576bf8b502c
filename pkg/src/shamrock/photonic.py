"""2D plane-wave-expansion photonic bands (TE/TM) of the hole crystal with
an effective-index reduction of the finite-thickness membrane.

The membrane's third dimension enters only through the fundamental
guided-mode effective index of the unpatterned slab, evaluated once at a
target frequency; every THz figure downstream carries that approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import pwe
from .bands import BandStructure, GapReport, find_gaps
from .geometry import UnitCellGeometry
from .numerics import HermitianProblem, bracketed_root, hermitian_eigensolve
from .symmetry import KPath

C_LIGHT = 299792458.0

DEFAULT_TARGET_FREQ = 0.34  # midgap target, units a/lambda


class NoGuidedModeError(ValueError):
    """The slab supports no guided mode at the requested frequency."""


@dataclass(frozen=True)
class PhotonicMaterial:
    """Unpatterned membrane: bulk refractive index and thickness ratio."""

    n_bulk: float
    d_over_a: float
    neff_target_freq: float = DEFAULT_TARGET_FREQ

    def __post_init__(self):
        if not self.n_bulk > 1.0:
            raise ValueError(f"n_bulk must exceed 1, got {self.n_bulk}")
        if not self.d_over_a > 0.0:
            raise ValueError("d_over_a must be positive")


def effective_index(
    material: PhotonicMaterial, target_freq: float, polarization: str = "te"
) -> float:
    """Fundamental guided-mode index of the symmetric air-clad slab.

    Solves the even-mode slab dispersion relation
        kappa*d/2 = atan(q * gamma / kappa),
    kappa = k0*sqrt(n^2 - N^2), gamma = k0*sqrt(N^2 - 1), with q = 1 for TE
    and q = n^2 for TM, by bracketed root finding in N. ``target_freq`` is
    the normalized frequency a/lambda; lengths are in units of a.
    """
    if target_freq <= 0.0:
        raise NoGuidedModeError("target frequency must be positive")
    n = material.n_bulk
    d = material.d_over_a
    k0 = 2.0 * math.pi * target_freq
    q = 1.0 if polarization.lower() == "te" else n * n

    def dispersion(n_eff: float) -> float:
        kappa = k0 * math.sqrt(max(n * n - n_eff * n_eff, 0.0))
        gamma = k0 * math.sqrt(max(n_eff * n_eff - 1.0, 0.0))
        if kappa == 0.0:
            return -math.pi / 2.0
        return 0.5 * kappa * d - math.atan(q * gamma / kappa)

    lo, hi = 1.0 + 1e-12, n - 1e-12
    if dispersion(lo) <= 0.0 or dispersion(hi) >= 0.0:
        raise NoGuidedModeError(
            f"no fundamental {polarization.upper()} mode at a/lambda="
            f"{target_freq}"
        )
    return bracketed_root(dispersion, lo, hi, tol=1e-14)


def slab_dispersion_residual(
    material: PhotonicMaterial, target_freq: float, n_eff: float,
    polarization: str = "te",
) -> float:
    """tan-form residual tan(kappa d/2) - q*gamma/kappa at a candidate index."""
    n = material.n_bulk
    k0 = 2.0 * math.pi * target_freq
    q = 1.0 if polarization.lower() == "te" else n * n
    kappa = k0 * math.sqrt(n * n - n_eff * n_eff)
    gamma = k0 * math.sqrt(n_eff * n_eff - 1.0)
    return math.tan(0.5 * kappa * material.d_over_a) - q * gamma / kappa


def _inverse_permittivity_grid(
    cell: UnitCellGeometry, n_eff: float
) -> np.ndarray:
    # Inverse rule: transform 1/eps(r); holes are air.
    eta_solid = 1.0 / (n_eff * n_eff)
    return 1.0 + (eta_solid - 1.0) * cell.chi


def assemble_photonic_operator(
    cell: UnitCellGeometry,
    material: PhotonicMaterial,
    k,
    cutoff: int,
    polarization: str = "te",
    n_eff: float | None = None,
    idx: np.ndarray | None = None,
    n_wanted: int | None = None,
) -> HermitianProblem:
    """Hermitian operator whose eigenvalues are (omega a / 2 pi c)^2 * (2 pi)^2.

    TE (in-plane E): M[p,q] = (k+G_p).(k+G_q) eta(G_p - G_q);
    TM (out-of-plane E): M[p,q] = |k+G_p| |k+G_q| eta(G_p - G_q),
    with eta the Fourier transform of the inverse permittivity. The
    permittivity is n_eff^2 in the solid and 1 in the holes. ``idx``
    overrides the default hexagonal-disk plane-wave set (supercells).
    """
    pol = polarization.lower()
    if pol not in ("te", "tm"):
        raise ValueError(f"unknown polarization {polarization!r}")
    if n_eff is None:
        n_eff = effective_index(material, material.neff_target_freq, pol)
    if idx is None:
        idx = pwe.hex_disk_indices(cutoff)
    eta = pwe.coefficient_matrix(_inverse_permittivity_grid(cell, n_eff), idx)
    kg = pwe.bloch_waves(cell, k, idx)
    if pol == "te":
        coupling = kg @ kg.T
    else:
        norms = np.linalg.norm(kg, axis=1)
        coupling = norms[:, None] * norms[None, :]
    matrix = coupling * eta
    n_pw = len(idx)
    return HermitianProblem(
        matrix_a=matrix,
        matrix_b=None,
        n_wanted=min(n_wanted or n_pw, n_pw),
    )


def band_structure(
    cell: UnitCellGeometry,
    material: PhotonicMaterial,
    kpath: KPath,
    n_bands: int,
    cutoff: int,
    polarization: str = "te",
    workers: int = 1,
) -> BandStructure:
    """TE or TM bands along the path, normalized units omega*a/(2*pi*c).

    The light line is the air-cladding radiation edge omega = c|k|. When
    the slab has no guided mode at the target frequency the solver falls
    back to the bulk index and flags the result.
    """
    if n_bands < 1:
        raise ValueError("n_bands must be >= 1")
    pol = polarization.lower()
    used_bulk = False
    try:
        n_eff = effective_index(material, material.neff_target_freq, pol)
    except NoGuidedModeError:
        import warnings

        warnings.warn(
            "no guided slab mode at the target frequency; using n_bulk",
            stacklevel=2,
        )
        n_eff = material.n_bulk
        used_bulk = True

    def solve_one(k):
        problem = assemble_photonic_operator(
            cell, material, k, cutoff, pol, n_eff=n_eff, n_wanted=n_bands
        )
        values, _ = hermitian_eigensolve(problem)
        return np.sqrt(np.clip(values, 0.0, None)) / (2.0 * math.pi)

    rows = pwe.solve_k_set(solve_one, kpath.kpoints, workers=workers)
    light = np.linalg.norm(kpath.kpoints, axis=1) / (2.0 * math.pi)
    return BandStructure(
        kpath=kpath,
        frequencies=np.asarray(rows),
        polarization=pol,
        freq_scale_hz=C_LIGHT / cell.lattice.a,
        light_line=light,
        used_bulk_index=used_bulk,
    )


__all__ = [
    "PhotonicMaterial",
    "NoGuidedModeError",
    "effective_index",
    "slab_dispersion_residual",
    "assemble_photonic_operator",
    "band_structure",
    "find_gaps",
    "BandStructure",
    "GapReport",
]
