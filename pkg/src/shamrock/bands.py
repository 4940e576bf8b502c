"""Band-structure containers, gap detection, and CSV export shared by the
photonic and elastic solvers."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .symmetry import KPath


class BandError(ValueError):
    pass


@dataclass(frozen=True)
class BandStructure:
    """Frequencies (k-sample x band) in normalized units.

    Photonic bands are omega*a/(2*pi*c); elastic bands are
    (omega*a/2*pi)/sqrt(c44/rho). ``freq_scale_hz`` converts one normalized
    unit to Hz at the reporting boundary. ``light_line`` (photonic slabs)
    is the air-cladding radiation edge per k-sample.
    """

    kpath: KPath
    frequencies: np.ndarray
    polarization: str
    freq_scale_hz: float
    light_line: np.ndarray | None = None
    used_bulk_index: bool = False

    def __post_init__(self):
        f = self.frequencies
        if f.ndim != 2 or len(f) != len(self.kpath.kpoints):
            raise BandError("frequencies must be (n_k, n_bands) over the k-path")
        if np.any(f < -1e-9):
            raise BandError("negative band frequencies")

    @property
    def n_bands(self) -> int:
        return self.frequencies.shape[1]


@dataclass(frozen=True)
class GapInterval:
    lower: float
    upper: float
    band_below: int
    band_above: int
    freq_scale_hz: float

    @property
    def midgap(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def gap_to_midgap(self) -> float:
        return (self.upper - self.lower) / self.midgap

    @property
    def lower_hz(self) -> float:
        return self.lower * self.freq_scale_hz

    @property
    def upper_hz(self) -> float:
        return self.upper * self.freq_scale_hz

    def as_dict(self) -> dict:
        return {
            "band_below": self.band_below,
            "band_above": self.band_above,
            "lower_normalized": self.lower,
            "upper_normalized": self.upper,
            "midgap_normalized": self.midgap,
            "gap_to_midgap": self.gap_to_midgap,
            "lower_hz": self.lower_hz,
            "upper_hz": self.upper_hz,
            "midgap_hz": self.midgap * self.freq_scale_hz,
        }


@dataclass(frozen=True)
class GapReport:
    gaps: tuple
    polarization: str
    freq_scale_hz: float

    def widest(self) -> GapInterval | None:
        if not self.gaps:
            return None
        return max(self.gaps, key=lambda g: g.gap_to_midgap)

    def as_dict(self) -> dict:
        return {
            "polarization": self.polarization,
            "gap_count": len(self.gaps),
            "gaps": [g.as_dict() for g in self.gaps],
        }


def find_gaps(
    bands: BandStructure,
    freq_window: tuple[float, float] | None = None,
) -> GapReport:
    """Gaps between consecutive (sorted) bands over the sampled k-set.

    A gap opens between band i and i+1 iff min_k band[i+1] > max_k band[i].
    Since bands are sorted per k-point, such an interval is free of modes
    of every computed branch. ``freq_window`` restricts reporting to gaps
    intersecting the window (normalized units).
    """
    f = bands.frequencies
    if f.shape[1] < 2:
        raise BandError("gap detection needs at least two bands")
    gaps = []
    for i in range(f.shape[1] - 1):
        lower = float(f[:, i].max())
        upper = float(f[:, i + 1].min())
        if upper <= lower or lower <= 0.0:
            continue
        if freq_window is not None:
            if upper < freq_window[0] or lower > freq_window[1]:
                continue
        gaps.append(
            GapInterval(
                lower=lower,
                upper=upper,
                band_below=i,
                band_above=i + 1,
                freq_scale_hz=bands.freq_scale_hz,
            )
        )
    return GapReport(
        gaps=tuple(gaps),
        polarization=bands.polarization,
        freq_scale_hz=bands.freq_scale_hz,
    )


def export_bands_csv(bands: BandStructure, file, unit_label: str = "THz") -> None:
    """Band CSV: one row per (k-sample, band).

    Columns: k_index, path_length, band_index, freq_normalized,
    freq_<unit>, and above_light_line when a light line is present.
    """
    unit = 1e12 if unit_label == "THz" else 1e9
    writer = csv.writer(file, lineterminator="\n")
    header = ["k_index", "path_length", "band_index", "freq_normalized",
              f"freq_{unit_label}"]
    has_light = bands.light_line is not None
    if has_light:
        header.append("above_light_line")
    writer.writerow(header)
    for ik in range(len(bands.kpath.kpoints)):
        for ib in range(bands.n_bands):
            nu = float(bands.frequencies[ik, ib])
            row = [
                ik,
                repr(float(bands.kpath.path_length[ik])),
                ib,
                repr(nu),
                repr(nu * bands.freq_scale_hz / unit),
            ]
            if has_light:
                row.append(int(nu >= float(bands.light_line[ik])))
            writer.writerow(row)
