"""Supercells for waveguides and heterostructure cavities, projected band
structures, and localized-mode extraction for both physics domains.

Supercell conventions (units of a):
  * the guide axis is x, with period a; the transverse supercell vector is
    oblique, A2 = (n/2, H), which keeps the hexagonal stacking seamless
    across the periodic wrap (no stacking fault at the outer boundary);
  * structures are centered on the guide axis (y = 0), and the raster uses
    Ny = n * Nx samples, so the y-mirror maps raster points onto raster
    points exactly for straight waveguides;
  * a removed-row waveguide of width W places the two innermost hole rows
    sqrt(3)*a*W apart; W = 1 restores the undisturbed crystal.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import pwe
from .bands import BandStructure, GapInterval, find_gaps
from .geometry import (
    GeometryError,
    ShamrockHole,
    UnitCellGeometry,
    circular_hole,
    hole_extent_along,
    rasterize_holes,
)
from .numerics import hermitian_eigensolve, hermitian_eigensolve_window
from .phononic import ElasticMaterial, assemble_elastic_operator
from .photonic import PhotonicMaterial, assemble_photonic_operator, effective_index
from .symmetry import KPath, segment_path

ROW_PITCH = 0.5 * math.sqrt(3.0)

GUIDED_LOCALIZATION = 0.6
CAVITY_LOCALIZATION = 0.7


class DefectError(GeometryError):
    pass


@dataclass(frozen=True)
class DefectSpec:
    """Waveguide defect: either a removed row rescaled to width W (row
    spacing sqrt(3)*a*W) or the center row replaced by circular holes."""

    kind: str
    W: float = 1.0
    circle_radius: float | None = None

    def __post_init__(self):
        if self.kind not in ("removed_row_W", "circular_hole_row"):
            raise DefectError(f"unknown defect kind {self.kind!r}")
        if self.kind == "removed_row_W" and not 0.0 < self.W <= 1.0:
            raise DefectError(f"W={self.W} outside (0, 1]")
        if self.circle_radius is not None and not 0.0 < self.circle_radius < 0.5:
            raise DefectError("circle_radius must lie in (0, 0.5)")


@dataclass(frozen=True)
class HeterostructureSpec:
    """Waveguide-width modulation: ``core_periods`` cells of core_W between
    mirror sections of mirror_W (mirror_periods cells per side)."""

    mirror_W: float
    core_W: float
    core_periods: int = 2
    mirror_periods: int = 4

    def __post_init__(self):
        if not 0.0 < self.mirror_W <= 1.0 or not 0.0 < self.core_W <= 1.0:
            raise DefectError("waveguide widths must lie in (0, 1]")
        if self.mirror_W >= self.core_W:
            raise DefectError(
                "mirror_W must be smaller than core_W (mirror gaps the core)"
            )
        if self.core_periods < 1 or self.mirror_periods < 1:
            raise DefectError("period counts must be >= 1")

    @property
    def n_long(self) -> int:
        return 2 * self.mirror_periods + self.core_periods


@dataclass(frozen=True)
class Supercell(UnitCellGeometry):
    """Rasterized supercell plus the metadata the defect solvers need."""

    base_cell: UnitCellGeometry = None
    defect: DefectSpec | None = None
    heterostructure: HeterostructureSpec | None = None
    n_transverse: int = 0
    n_long: int = 1
    defect_halfwidth: float = 0.0
    core_halflength: float = 0.0


def _row_parity_offset(t: int) -> float:
    # Rows alternate x-offsets 0 and 1/2 moving away from the guide; rows
    # +t and -t share an offset, which is the hexagonal stacking across a
    # removed row.
    return 0.5 * ((abs(t) - 1) % 2)


def _check_row_clearance(hole: ShamrockHole, gap: float, what: str) -> None:
    reach_up = hole_extent_along(hole, (0.0, 1.0))
    reach_down = hole_extent_along(hole, (0.0, -1.0))
    if reach_up + reach_down >= gap:
        raise DefectError(
            f"{what}: holes from opposite rows merge (row gap {gap:.3f}a, "
            f"hole spans {reach_up + reach_down:.3f}a)"
        )


def area_matched_circle_radius(cell: UnitCellGeometry) -> float:
    """Radius of the circle with the same area as the cell's hole."""
    hole_area = (1.0 - cell.fill_fraction) * cell.cell_area()
    return math.sqrt(hole_area / math.pi)


def build_supercell(
    cell: UnitCellGeometry,
    defect: DefectSpec | None,
    n_transverse: int,
    resolution_per_a: int = 64,
) -> Supercell:
    """Supercell periodic along the guide (period a), n_transverse cells wide.

    With no defect the raster is an exact tiling of the unit cell, so its
    spectra fold exactly onto the bulk bands. Defected supercells are built
    from an explicit, y-mirror-symmetric hole list.
    """
    if n_transverse < 5:
        raise DefectError("n_transverse must be >= 5")
    if n_transverse % 2 == 0:
        raise DefectError("n_transverse must be odd (defect centered)")
    n = n_transverse
    i0 = (n - 1) // 2
    hole = cell.hole

    if defect is None:
        nx, _ = cell.chi.shape
        chi = np.tile(cell.chi, (1, n))
        v = cell.cell_vectors()
        vectors = (tuple(v[0]), tuple(n * v[1]))
        return Supercell(
            lattice=cell.lattice,
            hole=hole,
            chi=chi,
            vectors=vectors,
            base_cell=cell,
            defect=None,
            n_transverse=n,
            defect_halfwidth=0.0,
        )

    holes: list[tuple[ShamrockHole, np.ndarray]] = []
    if defect.kind == "removed_row_W":
        w = defect.W
        _check_row_clearance(hole, w * math.sqrt(3.0), f"W={w} waveguide")
        height = math.sqrt(3.0) * (w + i0 - 0.5)
        for t in range(1, i0 + 1):
            y = (w * math.sqrt(3.0) / 2.0) + (t - 1) * ROW_PITCH
            x = _row_parity_offset(t)
            holes.append((hole, np.array([x, y])))
            holes.append((hole, np.array([x, -y])))
        vectors = ((1.0, 0.0), (n / 2.0, height))
        halfwidth = w * math.sqrt(3.0) / 2.0 + 0.5 * ROW_PITCH
    else:
        radius = defect.circle_radius
        if radius is None:
            radius = area_matched_circle_radius(cell)
        circle = circular_hole(radius)
        down = hole_extent_along(hole, (0.0, -1.0))
        if radius + down >= ROW_PITCH:
            raise DefectError(
                f"circle radius {radius:.3f}a merges with the adjacent row"
            )
        height = n * ROW_PITCH
        for t in range(-i0, i0 + 1):
            y = t * ROW_PITCH
            x = 0.5 * (t % 2)
            holes.append((circle if t == 0 else hole, np.array([x, y])))
        vectors = ((1.0, 0.0), (n / 2.0, height))
        halfwidth = ROW_PITCH

    nx = resolution_per_a
    ny = n * resolution_per_a
    chi = rasterize_holes(np.asarray(vectors, dtype=float), holes, (nx, ny))
    return Supercell(
        lattice=cell.lattice,
        hole=hole,
        chi=chi,
        vectors=vectors,
        base_cell=cell,
        defect=defect,
        n_transverse=n,
        defect_halfwidth=halfwidth,
    )


def build_cavity_supercell(
    cell: UnitCellGeometry,
    hs: HeterostructureSpec,
    n_transverse: int,
    resolution_per_a: int = 48,
) -> Supercell:
    """Heterostructure cavity: per-column waveguide width, uniform height.

    The outermost rows stay at the mirror-section height in every column
    (the torus needs one wrap height), so the core's extra width is
    absorbed by linearly tapering the row displacement from the innermost
    row to zero at the outermost row.
    """
    if n_transverse < 5 or n_transverse % 2 == 0:
        raise DefectError("n_transverse must be odd and >= 5")
    n = n_transverse
    i0 = (n - 1) // 2
    hole = cell.hole
    _check_row_clearance(hole, hs.core_W * math.sqrt(3.0), "cavity core")

    n_long = hs.n_long
    widths = (
        [hs.mirror_W] * hs.mirror_periods
        + [hs.core_W] * hs.core_periods
        + [hs.mirror_W] * hs.mirror_periods
    )
    height = math.sqrt(3.0) * (hs.mirror_W + i0 - 0.5)

    holes = []
    for m, w in enumerate(widths):
        for t in range(1, i0 + 1):
            base = hs.mirror_W * math.sqrt(3.0) / 2.0 + (t - 1) * ROW_PITCH
            taper = (i0 - t) / (i0 - 1)
            y = base + (w - hs.mirror_W) * math.sqrt(3.0) / 2.0 * taper
            x = m + _row_parity_offset(t)
            holes.append((hole, np.array([x, y])))
            holes.append((hole, np.array([x, -y])))
    vectors = ((float(n_long), 0.0), (0.5, height))

    nx = n_long * resolution_per_a
    ny = max(int(round(height * resolution_per_a)), resolution_per_a)
    chi = rasterize_holes(np.asarray(vectors, dtype=float), holes, (nx, ny))
    return Supercell(
        lattice=cell.lattice,
        hole=hole,
        chi=chi,
        vectors=vectors,
        base_cell=cell,
        defect=None,
        heterostructure=hs,
        n_transverse=n,
        n_long=n_long,
        defect_halfwidth=hs.core_W * math.sqrt(3.0) / 2.0 + 0.5 * ROW_PITCH,
        core_halflength=0.5 * hs.core_periods + 1.0,
    )


def waveguide_g_indices(cutoff: int, n_transverse: int) -> np.ndarray:
    """Plane-wave box for a 1 x n supercell with centered residues.

    m in [-cutoff, cutoff] along the guide, n in [-(cutoff*nt + h),
    cutoff*nt + h] with h = (nt-1)/2: every transverse index splits
    uniquely as q*nt + j with |q| <= cutoff and centered fold offset j, so
    an undefected supercell decouples exactly into folded bulk problems.
    """
    h = (n_transverse - 1) // 2
    return pwe.box_indices(cutoff, cutoff * n_transverse + h)


def _assemble(supercell, material, k, idx, n_wanted):
    if isinstance(material, PhotonicMaterial):
        return assemble_photonic_operator(
            supercell, material, k, cutoff=0, polarization="te",
            idx=idx, n_wanted=n_wanted,
        )
    return assemble_elastic_operator(
        supercell, material, k, cutoff=0, idx=idx, n_wanted=n_wanted
    )


def _frequency_scale(material, supercell):
    """(normalization divisor for sqrt(eigenvalue), Hz per normalized unit)."""
    if isinstance(material, PhotonicMaterial):
        return 2.0 * math.pi, 299792458.0 / supercell.lattice.a
    v_t = material.transverse_speed
    return 2.0 * math.pi * v_t, v_t / supercell.lattice.a


def mode_energy_grid(supercell, material, vector, idx, shape=None,
                     filler_factor: float = 1e-6):
    """Periodic-part energy density on the raster grid, normalized to 1.

    Photonic modes use |field|^2; elastic modes use the kinetic density
    rho(r) |u|^2 with the chi-blended density.
    """
    nx, ny = shape or supercell.chi.shape
    if isinstance(material, PhotonicMaterial):
        comps = [vector]
        weight = np.ones((nx, ny))
    else:
        comps = [vector[0::2], vector[1::2]]
        rho_fill = filler_factor * material.rho
        weight = rho_fill + (material.rho - rho_fill) * supercell.chi
    energy = np.zeros((nx, ny))
    for comp in comps:
        spectrum = np.zeros((nx, ny), dtype=complex)
        spectrum[idx[:, 0] % nx, idx[:, 1] % ny] = comp
        fld = np.fft.ifft2(spectrum) * (nx * ny)
        energy += np.abs(fld) ** 2
    energy *= weight
    total = energy.sum()
    if total > 0.0:
        energy /= total
    return energy


def _transverse_fraction(supercell, energy, halfwidth: float) -> float:
    """Energy fraction with |y| <= halfwidth (y from the oblique raster)."""
    nx, ny = energy.shape
    v = supercell.cell_vectors()
    frac = np.arange(ny) / ny
    y = frac * v[1, 1]
    y = np.where(y > 0.5 * v[1, 1], y - v[1, 1], y)
    mask = np.abs(y) <= halfwidth
    return float(energy[:, mask].sum())


def _longitudinal_fraction(supercell, energy, halflength: float) -> float:
    """Energy fraction within |x - x_center| <= halflength along the guide."""
    nx, ny = energy.shape
    v = supercell.cell_vectors()
    u = np.arange(nx)[:, None] / nx
    w = np.arange(ny)[None, :] / ny
    x = u * v[0, 0] + w * v[1, 0]
    period = v[0, 0]
    x_center = 0.5 * period
    dx = (x - x_center + 0.5 * period) % period - 0.5 * period
    mask = np.abs(dx) <= halflength
    return float(energy[mask].sum())


@dataclass(frozen=True)
class WaveguideBands:
    """Projected bands with the matched-cutoff bulk gap and guided-band
    classification (in-gap and transversely localized)."""

    bands: BandStructure
    bulk_gap: GapInterval | None
    localization: np.ndarray  # (n_k, n_bands); NaN where not evaluated
    guided: np.ndarray        # bool (n_k, n_bands)

    def guided_frequency(self, k_index: int) -> float | None:
        """Lowest guided-band frequency at one kx sample."""
        hits = np.where(self.guided[k_index])[0]
        if len(hits) == 0:
            return None
        return float(self.bands.frequencies[k_index, hits[0]].min())

    def has_guided_band(self) -> bool:
        return bool(self.guided.any())


def waveguide_bands(
    supercell: Supercell,
    material,
    n_bands: int,
    cutoff: int,
    kx_samples: int,
    workers: int = 1,
    localization_threshold: float = GUIDED_LOCALIZATION,
) -> WaveguideBands:
    """Projected bands over kx in [0, pi/a] with guided-mode classification.

    The bulk reference gap is computed from the matching undefected
    supercell with the same plane-wave set and kx samples, so defect and
    reference share one truncation level. Guided modes are bands inside
    that gap whose transverse energy fraction within the defect region
    exceeds the threshold.
    """
    if supercell.defect is None:
        raise DefectError("waveguide_bands needs a defected supercell")
    if kx_samples < 2:
        raise DefectError("kx_samples must be >= 2")
    n_t = supercell.n_transverse
    idx = waveguide_g_indices(cutoff, n_t)
    kxs = np.linspace(0.0, math.pi, kx_samples)
    kpoints = np.column_stack([kxs, np.zeros_like(kxs)])

    reference = build_supercell(
        supercell.base_cell, None, n_t,
        resolution_per_a=supercell.chi.shape[0],
    )
    norm, scale_hz = _frequency_scale(material, supercell)

    def solve_reference(k):
        problem = _assemble(reference, material, k, idx, n_bands)
        values, _ = hermitian_eigensolve(problem)
        return np.sqrt(np.clip(values, 0.0, None)) / norm

    def solve_defect(k):
        problem = _assemble(supercell, material, k, idx, n_bands)
        values, vectors = hermitian_eigensolve(problem)
        return np.sqrt(np.clip(values, 0.0, None)) / norm, vectors

    ref_rows = pwe.solve_k_set(solve_reference, kpoints, workers=workers)
    results = pwe.solve_k_set(solve_defect, kpoints, workers=workers)

    kpath = segment_path(
        [("Gamma", (0.0, 0.0)), ("X", (math.pi, 0.0))], max(kx_samples - 1, 2)
    )
    kpath = KPath(
        vertices=kpath.vertices,
        kpoints=kpoints,
        path_length=kxs.copy(),
        vertex_indices=(0, kx_samples - 1),
    )

    ref_bands = BandStructure(
        kpath=kpath,
        frequencies=np.asarray(ref_rows),
        polarization="bulk-reference",
        freq_scale_hz=scale_hz,
    )
    gaps = find_gaps(ref_bands).gaps
    bulk_gap = max(gaps, key=lambda g: g.upper - g.lower) if gaps else None

    freqs = np.asarray([r[0] for r in results])
    n_b = freqs.shape[1]
    localization = np.full((kx_samples, n_b), np.nan)
    guided = np.zeros((kx_samples, n_b), dtype=bool)
    if bulk_gap is not None:
        for ik, (row, vectors) in enumerate(results):
            in_gap = np.where(
                (row > bulk_gap.lower) & (row < bulk_gap.upper)
            )[0]
            for ib in in_gap:
                energy = mode_energy_grid(
                    supercell, material, vectors[:, ib], idx
                )
                frac = _transverse_fraction(
                    supercell, energy, supercell.defect_halfwidth
                )
                localization[ik, ib] = frac
                guided[ik, ib] = frac >= localization_threshold

    projected = BandStructure(
        kpath=kpath,
        frequencies=freqs,
        polarization=(
            "te" if isinstance(material, PhotonicMaterial) else "elastic"
        ),
        freq_scale_hz=scale_hz,
    )
    return WaveguideBands(
        bands=projected,
        bulk_gap=bulk_gap,
        localization=localization,
        guided=guided,
    )


@dataclass(frozen=True)
class LocalizedMode:
    """Cavity mode: normalized and physical frequency, unit-energy profile
    grid, core-energy fraction, and the exponential decay length along the
    guide axis (units of a)."""

    frequency: float
    frequency_hz: float
    profile: np.ndarray
    localization: float
    decay_length: float
    polarization: str


def _decay_length(supercell: Supercell, energy: np.ndarray) -> float:
    nx, _ = energy.shape
    period = supercell.cell_vectors()[0, 0]
    profile_x = energy.sum(axis=1)
    x = (np.arange(nx) + 0.5) / nx * period
    dx = np.abs(
        (x - 0.5 * period + 0.5 * period) % period - 0.5 * period
    )
    core = supercell.core_halflength
    sel = (dx > core) & (profile_x > 1e-300)
    if sel.sum() < 4:
        return math.inf
    r = dx[sel]
    lg = np.log(profile_x[sel])
    slope = np.polyfit(r, lg, 1)[0]
    if slope >= 0.0:
        return math.inf
    return float(-1.0 / slope)


def mirror_gap_window(
    cell: UnitCellGeometry,
    mirror_W: float,
    material,
    n_transverse: int,
    cutoff: int,
    resolution_per_a: int = 64,
) -> tuple[GapInterval | None, float | None]:
    """(bulk gap, lowest guided frequency of the mirror waveguide).

    Frequencies below the mirror's guided band but inside the bulk gap
    cannot propagate through the mirror sections; that window hosts the
    cavity modes.
    """
    mirror = build_supercell(
        cell,
        DefectSpec(kind="removed_row_W", W=mirror_W),
        n_transverse,
        resolution_per_a=resolution_per_a,
    )
    wb = waveguide_bands(
        mirror, material, n_bands=_default_band_count(n_transverse),
        cutoff=cutoff, kx_samples=5,
    )
    if wb.bulk_gap is None:
        return None, None
    guided_freqs = wb.bands.frequencies[wb.guided]
    mirror_min = float(guided_freqs.min()) if guided_freqs.size else None
    return wb.bulk_gap, mirror_min


def _default_band_count(n_transverse: int) -> int:
    return 5 * n_transverse + 10


def cavity_modes(
    hs: HeterostructureSpec,
    cell: UnitCellGeometry,
    material,
    n_modes: int = 8,
    cutoff: int = 4,
    n_transverse: int = 11,
    g_max: float | None = None,
    resolution_per_a: int = 48,
    size_budget: int = 9000,
) -> list[LocalizedMode]:
    """Localized modes of the heterostructure cavity, periodic outer edge.

    Solves the cavity supercell at Gamma inside the mirror-section gap
    window and returns at most n_modes modes sorted by decreasing
    localization. An empty list means no in-window mode, not an error.
    """
    gap, mirror_min = mirror_gap_window(
        cell, hs.mirror_W, material, n_transverse, cutoff,
        resolution_per_a=max(resolution_per_a, 48),
    )
    if gap is None:
        return []
    upper = mirror_min if mirror_min is not None else gap.upper
    lo = gap.lower * (1.0 + 1e-9)
    hi = upper * (1.0 - 1e-9)
    if hi <= lo:
        return []

    supercell = build_cavity_supercell(
        cell, hs, n_transverse, resolution_per_a=resolution_per_a
    )
    if g_max is None:
        g_max = cutoff * 2.0 / math.sqrt(3.0) * 0.75
    recip = np.asarray(
        2.0 * math.pi * np.linalg.inv(supercell.cell_vectors()).T
    )
    idx = pwe.disk_indices(recip, g_max * 2.0 * math.pi)
    dof = len(idx) * (1 if isinstance(material, PhotonicMaterial) else 2)
    if dof > size_budget:
        raise DefectError(
            f"cavity problem size {dof} exceeds the dense-solver budget "
            f"{size_budget}; reduce g_max or the supercell"
        )

    norm, scale_hz = _frequency_scale(material, supercell)
    problem = _assemble(supercell, material, (0.0, 0.0), idx, 1)
    values, vectors = hermitian_eigensolve_window(
        problem.matrix_a, problem.matrix_b, (lo * norm) ** 2, (hi * norm) ** 2
    )

    modes = []
    for i in range(len(values)):
        freq = math.sqrt(max(values[i], 0.0)) / norm
        energy = mode_energy_grid(supercell, material, vectors[:, i], idx)
        loc = _longitudinal_fraction(
            supercell, energy, supercell.core_halflength
        )
        modes.append(
            LocalizedMode(
                frequency=freq,
                frequency_hz=freq * scale_hz,
                profile=energy,
                localization=loc,
                decay_length=_decay_length(supercell, energy),
                polarization=(
                    "te" if isinstance(material, PhotonicMaterial) else "elastic"
                ),
            )
        )
    modes.sort(key=lambda m: -m.localization)
    return modes[:n_modes]


def export_mode_profile(mode: LocalizedMode, csv_path) -> None:
    """Profile grid as CSV: ix, iy, energy (unit total energy)."""
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["ix", "iy", "energy"])
        nx, ny = mode.profile.shape
        for i in range(nx):
            for j in range(ny):
                writer.writerow([i, j, repr(float(mode.profile[i, j]))])


def read_mode_profile(csv_path, shape) -> np.ndarray:
    grid = np.zeros(shape)
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for ix, iy, value in reader:
            grid[int(ix), int(iy)] = float(value)
    return grid
