"""Shamrock-hole lattice geometry: membership tests, rasterized material
indicator fields on the hexagonal primitive cell, and their Fourier
coefficients for plane-wave assembly.

Internal length unit is the lattice constant (a = 1); physical lengths enter
only through :class:`LatticeSpec` metadata at the reporting boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

# Hexagonal primitive vectors, units of a.
HEX_A1 = (1.0, 0.0)
HEX_A2 = (0.5, 0.5 * math.sqrt(3.0))


class GeometryError(ValueError):
    """Invalid lattice, hole, or raster parameters."""


@dataclass(frozen=True)
class LatticeSpec:
    """Hexagonal lattice metadata.

    a and d are in meters; basis vectors are in units of a and must have
    equal unit length with 60 degrees between them.
    """

    a: float
    d: float
    basis_vectors: tuple[tuple[float, float], tuple[float, float]] = (HEX_A1, HEX_A2)

    def __post_init__(self):
        if not (self.a > 0.0):
            raise GeometryError(f"lattice constant must be positive, got {self.a}")
        if not (self.d > 0.0):
            raise GeometryError(f"membrane thickness must be positive, got {self.d}")
        v1, v2 = (np.asarray(v, dtype=float) for v in self.basis_vectors)
        n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
        if abs(n1 - 1.0) > 1e-12 or abs(n2 - 1.0) > 1e-12:
            raise GeometryError("basis vectors must have length a (1 in units of a)")
        cos_angle = float(v1 @ v2) / (n1 * n2)
        if abs(cos_angle - 0.5) > 1e-12:
            raise GeometryError("basis vectors must span 60 degrees")

    @property
    def d_over_a(self) -> float:
        return self.d / self.a

    def vectors(self) -> np.ndarray:
        """Primitive vectors as a (2, 2) array of rows, units of a."""
        return np.asarray(self.basis_vectors, dtype=float)

    def cell_area(self) -> float:
        v = self.vectors()
        return abs(v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0])


@dataclass(frozen=True)
class ShamrockHole:
    """Three-lobed hole: three ellipses rotated by 2*pi/3, each displaced
    outward along its own major axis.

    A and B are the full minor/major axis lengths in units of a (semi-axes
    A/2, B/2); set ``axes_are_semi`` to reinterpret them as semi-axes.
    L is the outward center shift, ``orientation`` rotates the whole
    three-lobe pattern. A = B = L = 0 is the degenerate no-hole case.
    """

    A: float
    B: float
    L: float
    orientation: float = 0.0
    axes_are_semi: bool = False

    def __post_init__(self):
        if self.A < 0.0 or self.B < 0.0 or self.L < 0.0:
            raise GeometryError("hole parameters A, B, L must be non-negative")
        if self.A > self.B:
            raise GeometryError(f"minor axis A={self.A} exceeds major axis B={self.B}")

    @property
    def semi_minor(self) -> float:
        return self.A if self.axes_are_semi else 0.5 * self.A

    @property
    def semi_major(self) -> float:
        return self.B if self.axes_are_semi else 0.5 * self.B

    @property
    def is_empty(self) -> bool:
        return self.semi_minor == 0.0 or self.semi_major == 0.0

    def bounding_radius(self) -> float:
        """Radius of the smallest circle about the hole center containing the hole."""
        if self.is_empty:
            return 0.0
        return self.L + self.semi_major

    def lobe_angles(self) -> np.ndarray:
        return self.orientation + np.array([0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0])


def circular_hole(radius: float) -> ShamrockHole:
    """Circle of given radius expressed as a degenerate shamrock (A=B=2r, L=0)."""
    return ShamrockHole(A=2.0 * radius, B=2.0 * radius, L=0.0)


def point_in_shamrock(hole: ShamrockHole, p, center) -> bool | np.ndarray:
    """Membership in the union of the three shifted ellipses.

    ``p`` may be a single 2-vector or an (..., 2) array; the result matches
    the leading shape. Total function: degenerate holes contain nothing.
    """
    pts = np.asarray(p, dtype=float)
    scalar = pts.ndim == 1
    pts = np.atleast_2d(pts)
    c = np.asarray(center, dtype=float)
    rel = pts - c

    if hole.is_empty:
        out = np.zeros(rel.shape[:-1], dtype=bool)
        return bool(out[0]) if scalar else out

    sa, sb = hole.semi_minor, hole.semi_major
    inside = np.zeros(rel.shape[:-1], dtype=bool)
    for theta in hole.lobe_angles():
        ct, st = math.cos(theta), math.sin(theta)
        # Lobe frame: x along the major axis (displaced by L), y along minor.
        dx = rel[..., 0] - hole.L * ct
        dy = rel[..., 1] - hole.L * st
        u = dx * ct + dy * st
        v = -dx * st + dy * ct
        inside |= (u / sb) ** 2 + (v / sa) ** 2 <= 1.0
    return bool(inside[0]) if scalar else inside


def _c3v_stencil(pixel_size: float) -> np.ndarray:
    """Anti-aliasing offsets closed under the C3v point group.

    Center point plus two hexagonal rings (angles 0:60:300 and 30:60:330),
    so that reflections across the 0/60/120-degree mirror lines and 2*pi/3
    rotations map the stencil onto itself exactly. This keeps the sampled
    indicator field bit-for-bit symmetric, which a square subpixel grid
    would not.
    """
    offsets = [(0.0, 0.0)]
    for radius, phase in ((0.28 * pixel_size, 0.0), (0.42 * pixel_size, math.pi / 6.0)):
        for j in range(6):
            ang = phase + j * math.pi / 3.0
            offsets.append((radius * math.cos(ang), radius * math.sin(ang)))
    return np.asarray(offsets)


@dataclass(frozen=True)
class UnitCellGeometry:
    """Rasterized material indicator on a periodic cell.

    chi[i, j] samples the indicator (1 = solid, 0 = hole, boundary pixels
    anti-aliased) at r = (i/Nx) V1 + (j/Ny) V2, grid aligned to the cell
    origin. ``vectors`` are the cell vectors in units of a.
    """

    lattice: LatticeSpec
    hole: ShamrockHole
    chi: np.ndarray
    vectors: tuple[tuple[float, float], tuple[float, float]] = field(
        default=(HEX_A1, HEX_A2)
    )

    def __post_init__(self):
        chi = self.chi
        if chi.ndim != 2:
            raise GeometryError("chi must be a 2D grid")
        if chi.min() < -1e-12 or chi.max() > 1.0 + 1e-12:
            raise GeometryError("chi must lie in [0, 1]")

    @property
    def fill_fraction(self) -> float:
        return float(self.chi.mean())

    @property
    def resolution(self) -> tuple[int, int]:
        return self.chi.shape

    def cell_vectors(self) -> np.ndarray:
        return np.asarray(self.vectors, dtype=float)

    def cell_area(self) -> float:
        v = self.cell_vectors()
        return abs(v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0])

    def grid_points(self) -> np.ndarray:
        """Cartesian sample positions, shape (Nx, Ny, 2), units of a."""
        nx, ny = self.chi.shape
        v = self.cell_vectors()
        u = np.arange(nx)[:, None, None] / nx
        w = np.arange(ny)[None, :, None] / ny
        return u * v[0] + w * v[1]


def rasterize_holes(
    vectors: np.ndarray,
    holes: list[tuple[ShamrockHole, np.ndarray]],
    shape: tuple[int, int],
    antialias: bool = True,
) -> np.ndarray:
    """Sample the solid indicator for a set of holes on a periodic cell.

    Each hole is tested only inside its own bounding window (including the
    eight periodic images), which keeps large supercells cheap. Sample
    points are (i/Nx) V1 + (j/Ny) V2 with the C3v anti-aliasing stencil.
    """
    nx, ny = shape
    v = np.asarray(vectors, dtype=float)
    chi = np.ones(shape, dtype=float)
    if not holes:
        return chi

    pixel = math.sqrt(abs(np.linalg.det(v)) / (nx * ny))
    offsets = _c3v_stencil(pixel) if antialias else np.zeros((1, 2))
    n_sub = len(offsets)
    inv_v = np.linalg.inv(v)

    counts = np.zeros(shape, dtype=np.int32)
    for hole, center in holes:
        if hole.is_empty:
            continue
        reach = hole.bounding_radius() + 2.0 * pixel
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                c = np.asarray(center, dtype=float) + di * v[0] + dj * v[1]
                # Fractional-coordinate window that covers the lobes plus stencil.
                cf = c @ inv_v
                span = reach * np.linalg.norm(inv_v, axis=0)
                i_lo = math.floor((cf[0] - span[0]) * nx)
                i_hi = math.ceil((cf[0] + span[0]) * nx) + 1
                j_lo = math.floor((cf[1] - span[1]) * ny)
                j_hi = math.ceil((cf[1] + span[1]) * ny) + 1
                if i_hi <= 0 or i_lo >= nx or j_hi <= 0 or j_lo >= ny:
                    continue
                i_lo, i_hi = max(i_lo, 0), min(i_hi, nx)
                j_lo, j_hi = max(j_lo, 0), min(j_hi, ny)
                ii = np.arange(i_lo, i_hi)
                jj = np.arange(j_lo, j_hi)
                base = (
                    (ii[:, None, None] / nx) * v[0]
                    + (jj[None, :, None] / ny) * v[1]
                )
                window = np.zeros((len(ii), len(jj)), dtype=np.int32)
                for off in offsets:
                    window += point_in_shamrock(hole, base + off, c)
                np.add.at(counts, np.ix_(ii, jj), window)
    # Overlapping windows cannot double-count a subsample beyond n_sub
    # because holes are required not to overlap each other.
    np.minimum(counts, n_sub, out=counts)
    chi -= counts / float(n_sub)
    return chi


def build_unit_cell(
    lattice: LatticeSpec,
    hole: ShamrockHole,
    resolution: int,
    antialias: bool = True,
) -> UnitCellGeometry:
    """Rasterize one primitive cell with the hole centered on the lattice site.

    The grid is aligned to the lattice site so the p3m1 point group maps
    sample points onto sample points; together with the symmetric stencil
    this makes the rasterized field exactly symmetric.
    """
    if resolution < 16:
        raise GeometryError(f"resolution {resolution} below minimum 16")
    if hole.bounding_radius() > 0.5:
        raise GeometryError(
            f"hole extent {hole.bounding_radius():.3f}a reaches the neighboring "
            "cell (limit 0.5a)"
        )
    vectors = lattice.vectors()
    chi = rasterize_holes(
        vectors,
        [(hole, np.zeros(2))],
        (resolution, resolution),
        antialias=antialias,
    )
    cell = UnitCellGeometry(
        lattice=lattice,
        hole=hole,
        chi=chi,
        vectors=tuple(map(tuple, vectors)),
    )
    if not hole.is_empty and not (0.0 < cell.fill_fraction < 1.0):
        raise GeometryError("hole produced a degenerate fill fraction")
    return cell


def reciprocal_basis(lattice: LatticeSpec | np.ndarray) -> np.ndarray:
    """Reciprocal vectors b1, b2 (rows) with b_i . a_j = 2*pi*delta_ij."""
    if isinstance(lattice, LatticeSpec):
        v = lattice.vectors()
    else:
        v = np.asarray(lattice, dtype=float)
    return TWO_PI * np.linalg.inv(v).T


@dataclass(frozen=True)
class FourierField:
    """Fourier coefficients of a real periodic field.

    coefficients maps integer reciprocal indices (m, n), kept within the
    hexagonal-norm disk m^2 + n^2 - mn <= cutoff^2, to complex amplitudes
    of exp(i G . r) with G = m b1 + n b2.
    """

    coefficients: dict[tuple[int, int], complex]
    cutoff: int

    def coefficient(self, m: int, n: int) -> complex:
        return self.coefficients[(m, n)]


def field_fft(values: np.ndarray) -> np.ndarray:
    """Normalized 2D DFT whose (m, n) bin is the Fourier coefficient of the
    trigonometric interpolant at G = m b1 + n b2 (indices modulo the grid)."""
    ny, nx = values.shape[1], values.shape[0]
    return np.fft.fft2(values) / (nx * ny)


def fourier_coefficients(
    cell: UnitCellGeometry,
    values: tuple[float, float],
    cutoff: int,
) -> FourierField:
    """Fourier coefficients of the mapped field solid*chi + hole*(1 - chi).

    values = (solid, hole). Coefficients are returned for all indices with
    m^2 + n^2 - mn <= cutoff^2; the raster Nyquist limit caps the cutoff.
    """
    if cutoff < 1:
        raise GeometryError(f"cutoff must be >= 1, got {cutoff}")
    solid, hole_value = values
    if not (math.isfinite(solid) and math.isfinite(hole_value)):
        raise GeometryError("field values must be finite")
    nx, ny = cell.chi.shape
    max_index = int(math.floor(cutoff * 2.0 / math.sqrt(3.0)))
    if 2 * max_index >= min(nx, ny) // 2:
        raise GeometryError(
            f"cutoff {cutoff} exceeds the raster Nyquist limit for a "
            f"{nx}x{ny} grid"
        )
    grid = hole_value + (solid - hole_value) * cell.chi
    transform = field_fft(grid)
    coeffs: dict[tuple[int, int], complex] = {}
    for m in range(-max_index, max_index + 1):
        for n in range(-max_index, max_index + 1):
            if m * m + n * n - m * n <= cutoff * cutoff:
                coeffs[(m, n)] = complex(transform[m % nx, n % ny])
    return FourierField(coefficients=coeffs, cutoff=cutoff)


def export_pgm(cell: UnitCellGeometry, path) -> None:
    """Write the indicator grid as a binary PGM (solid bright, holes dark)."""
    chi = cell.chi
    gray = np.round(chi.T[::-1] * 255.0).astype(np.uint8)
    header = f"P5\n{gray.shape[1]} {gray.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(gray.tobytes())


def hole_extent_along(hole: ShamrockHole, direction) -> float:
    """Maximum signed extent of the hole boundary along a unit direction.

    Used by supercell builders to check that defect rows do not merge
    across the guide: for an ellipse with semi-axes (sb, sa) at angle
    theta the support function is sqrt((sb*cos(theta-phi))^2 +
    (sa*sin(theta-phi))^2) plus the projected lobe shift.
    """
    if hole.is_empty:
        return 0.0
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    phi = math.atan2(d[1], d[0])
    sa, sb = hole.semi_minor, hole.semi_major
    extent = 0.0
    for theta in hole.lobe_angles():
        shift = hole.L * math.cos(theta - phi)
        support = math.hypot(sb * math.cos(theta - phi), sa * math.sin(theta - phi))
        extent = max(extent, shift + support)
    return extent
