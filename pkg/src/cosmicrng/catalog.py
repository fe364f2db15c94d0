"""Celestial source catalog: data model, CSV ingestion, and epoch selection.

The bundled catalog carries multi-epoch distance estimates for the sources
used in the photon-counting survey; distance estimates for the same source
have been revised by large factors between astrometry releases, so every
(name, epoch) pair is kept as its own row and consumers pick the latest.
Coordinates are only available for the two sources used in the Bell-test
layout; rows without published coordinates leave those cells blank.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from importlib import resources
from typing import Iterable, TextIO

CSV_HEADER = ["name", "ra_deg", "dec_deg", "vmag", "distance_ly", "sigma_ly", "epoch"]


class CatalogError(ValueError):
    """Malformed, duplicate, or out-of-range catalog data."""


def _key(name: str) -> str:
    # Identifiers like "HIP 55892" appear with and without internal spacing.
    return "".join(name.split()).casefold()


@dataclass(frozen=True)
class CelestialSource:
    """One catalog row: a source at one distance-estimate epoch.

    ``ra_deg``/``dec_deg`` are None when the underlying survey did not
    publish coordinates; geometry operations reject such sources.
    ``sigma_ly`` is the 1-standard-deviation distance uncertainty (0 when
    the epoch reported no uncertainty).
    """

    name: str
    ra_deg: float | None
    dec_deg: float | None
    vmag: float
    distance_ly: float
    sigma_ly: float
    epoch: int

    def __post_init__(self):
        if not self.name.strip():
            raise CatalogError("source name must be non-empty")
        if self.ra_deg is not None and not 0.0 <= self.ra_deg < 360.0:
            raise CatalogError(f"{self.name}: ra_deg must be in [0, 360), got {self.ra_deg}")
        if self.dec_deg is not None and not -90.0 <= self.dec_deg <= 90.0:
            raise CatalogError(f"{self.name}: dec_deg must be in [-90, 90], got {self.dec_deg}")
        if self.distance_ly <= 0:
            raise CatalogError(f"{self.name}: distance_ly must be positive")
        if self.sigma_ly < 0:
            raise CatalogError(f"{self.name}: sigma_ly must be >= 0")
        if self.epoch <= 0:
            raise CatalogError(f"{self.name}: epoch must be a positive integer")


@dataclass(frozen=True)
class Catalog:
    """Ordered, immutable collection of sources; (name, epoch) pairs are unique."""

    entries: tuple[CelestialSource, ...]

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            k = (_key(e.name), e.epoch)
            if k in seen:
                raise CatalogError(f"duplicate catalog entry: ({e.name!r}, {e.epoch})")
            seen.add(k)

    def names(self) -> list[str]:
        """Distinct source names in first-appearance order."""
        out, seen = [], set()
        for e in self.entries:
            if _key(e.name) not in seen:
                seen.add(_key(e.name))
                out.append(e.name)
        return out

    def entries_for(self, name: str) -> list[CelestialSource]:
        k = _key(name)
        return [e for e in self.entries if _key(e.name) == k]


def _parse_optional(field: str) -> float | None:
    field = field.strip()
    return float(field) if field else None


def load_catalog(text: str | TextIO | Iterable[str]) -> Catalog:
    """Parse a CSV catalog from a string or character stream.

    Expects the header ``name,ra_deg,dec_deg,vmag,distance_ly,sigma_ly,epoch``.
    ``#``-prefixed lines are comments.  Rows whose distance cell is blank are
    skipped (epochs for which no estimate was published); a blank sigma cell
    is read as 0.
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    numbered = [(i, line) for i, line in enumerate(text, start=1)
                if line.strip() and not line.lstrip().startswith("#")]
    if not numbered:
        raise CatalogError("catalog is empty: missing header row")
    rows = csv.reader(line for _, line in numbered)
    header = [h.strip() for h in next(rows)]
    if header != CSV_HEADER:
        raise CatalogError(
            f"line {numbered[0][0]}: bad header {header!r}, expected {CSV_HEADER!r}"
        )

    entries = []
    for (lineno, _), row in zip(numbered[1:], rows):
        if len(row) != len(CSV_HEADER):
            raise CatalogError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        name = row[0].strip()
        if not row[4].strip():
            continue  # no distance estimate at this epoch
        try:
            entry = CelestialSource(
                name=name,
                ra_deg=_parse_optional(row[1]),
                dec_deg=_parse_optional(row[2]),
                vmag=float(row[3]),
                distance_ly=float(row[4]),
                sigma_ly=float(row[5]) if row[5].strip() else 0.0,
                epoch=int(row[6]),
            )
        except CatalogError as exc:
            raise CatalogError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise CatalogError(f"line {lineno}: {exc}") from None
        entries.append(entry)

    try:
        return Catalog(tuple(entries))
    except CatalogError as exc:
        raise CatalogError(str(exc)) from None


def dump_catalog(catalog: Catalog) -> str:
    """Serialize a catalog back to CSV (inverse of load_catalog up to formatting)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for e in catalog.entries:
        writer.writerow([
            e.name,
            "" if e.ra_deg is None else repr(e.ra_deg),
            "" if e.dec_deg is None else repr(e.dec_deg),
            repr(e.vmag),
            repr(e.distance_ly),
            repr(e.sigma_ly),
            e.epoch,
        ])
    return buf.getvalue()


def select_latest(catalog: Catalog, name: str) -> CelestialSource:
    """The entry with the most recent epoch for ``name`` (case/spacing-insensitive)."""
    candidates = catalog.entries_for(name)
    if not candidates:
        raise KeyError(f"no catalog entry for source {name!r}")
    return max(candidates, key=lambda e: e.epoch)


def with_distance(source: CelestialSource, distance_ly: float, sigma_ly: float) -> CelestialSource:
    """Copy of ``source`` with a substituted distance estimate."""
    return replace(source, distance_ly=distance_ly, sigma_ly=sigma_ly)


def builtin_catalog() -> Catalog:
    """The bundled multi-epoch distance catalog."""
    text = resources.files("cosmicrng").joinpath("data/crss_distances.csv").read_text("utf-8")
    return load_catalog(text)
