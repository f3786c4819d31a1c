"""Hydrology dataset loading: monitoring stations, observation series and
e-flow thresholds from CSV files or a remote HTTP source.

CSV schemas (header rows mandatory):
    stations.csv:   station_id,name,river,country,lat,lon,kind
    series.csv:     station_id,date,kind,value,unit,quality
    thresholds.csv: site_id,warning_level,critical_level

The remote source serves the same columns as JSON arrays (GET /stations,
/series?since=&until=, /thresholds). Loaded datasets are immutable
snapshots; the tools in hydro.py are pure functions over one snapshot.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import httpx

from .errors import DanglingReference, ProviderFailure, SchemaError

STATION_KINDS = ("rainfall", "discharge", "reservoir", "eflow_site")
SERIES_KINDS = ("rainfall", "discharge", "reservoir")
UNITS = ("mm", "m3_per_s", "Mm3")
QUALITIES = ("observed", "forecast", "missing")

STATIONS_HEADER = ["station_id", "name", "river", "country", "lat", "lon", "kind"]
SERIES_HEADER = ["station_id", "date", "kind", "value", "unit", "quality"]
THRESHOLDS_HEADER = ["site_id", "warning_level", "critical_level"]


@dataclass(frozen=True)
class StationRecord:
    station_id: str
    name: str
    river: str
    country: str
    lat: float
    lon: float
    kind: str


@dataclass(frozen=True)
class SeriesPoint:
    station_id: str
    date: dt.date
    kind: str
    value: float | None  # None only when quality == "missing"
    unit: str
    quality: str


@dataclass(frozen=True)
class EflowThreshold:
    site_id: str
    warning_level: float
    critical_level: float


@dataclass
class Datasets:
    dataset_id: str
    stations: dict[str, StationRecord]
    series: list[SeriesPoint]
    thresholds: dict[str, EflowThreshold]
    _by_station: dict[str, list[SeriesPoint]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for p in self.series:
            self._by_station.setdefault(p.station_id, []).append(p)
        for points in self._by_station.values():
            points.sort(key=lambda p: (p.date, p.kind))

    def points_for(self, station_id: str) -> list[SeriesPoint]:
        return self._by_station.get(station_id, [])

    def stations_on_river(self, river: str) -> list[StationRecord]:
        want = normalize_river(river)
        return [s for s in self.stations.values() if normalize_river(s.river) == want]

    def counts(self) -> dict[str, int]:
        return {"stations": len(self.stations), "series_points": len(self.series),
                "thresholds": len(self.thresholds)}


def normalize_river(name: str) -> str:
    """Case-insensitive river matching; a trailing 'river' word is ignored
    so 'Olifants River' and 'olifants' name the same river."""
    norm = " ".join(name.strip().lower().split())
    if norm.endswith(" river"):
        norm = norm[: -len(" river")]
    return norm


# --------------------------------------------------------------------------
# row parsing, shared by CSV and remote JSON

def _parse_station(row: dict[str, str], rownum: int) -> StationRecord:
    sid = (row.get("station_id") or "").strip()
    if not sid:
        raise SchemaError(f"row {rownum}: empty station_id", rownum)
    kind = (row.get("kind") or "").strip()
    if kind not in STATION_KINDS:
        raise SchemaError(f"row {rownum}: unknown station kind {kind!r}", rownum)
    try:
        lat, lon = float(row["lat"]), float(row["lon"])
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"row {rownum}: bad coordinates: {exc}", rownum) from exc
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise SchemaError(f"row {rownum}: coordinates out of range ({lat}, {lon})", rownum)
    return StationRecord(sid, (row.get("name") or "").strip(), (row.get("river") or "").strip(),
                         (row.get("country") or "").strip(), lat, lon, kind)


def _parse_series_point(row: dict[str, str], rownum: int) -> SeriesPoint:
    sid = (row.get("station_id") or "").strip()
    if not sid:
        raise SchemaError(f"row {rownum}: empty station_id", rownum)
    try:
        date = dt.date.fromisoformat((row.get("date") or "").strip())
    except ValueError as exc:
        raise SchemaError(f"row {rownum}: malformed date {row.get('date')!r}", rownum) from exc
    kind = (row.get("kind") or "").strip()
    if kind not in SERIES_KINDS:
        raise SchemaError(f"row {rownum}: unknown series kind {kind!r}", rownum)
    unit = (row.get("unit") or "").strip()
    if unit not in UNITS:
        raise SchemaError(f"row {rownum}: unknown unit {unit!r}", rownum)
    quality = (row.get("quality") or "").strip()
    if quality not in QUALITIES:
        raise SchemaError(f"row {rownum}: unknown quality {quality!r}", rownum)
    raw_value = (row.get("value") or "").strip()
    if quality == "missing":
        if raw_value:
            raise SchemaError(f"row {rownum}: missing point must carry no value", rownum)
        value = None
    else:
        try:
            value = float(raw_value)
        except ValueError as exc:
            raise SchemaError(f"row {rownum}: bad value {raw_value!r}", rownum) from exc
    return SeriesPoint(sid, date, kind, value, unit, quality)


def _parse_threshold(row: dict[str, str], rownum: int) -> EflowThreshold:
    sid = (row.get("site_id") or "").strip()
    if not sid:
        raise SchemaError(f"row {rownum}: empty site_id", rownum)
    try:
        warning = float(row["warning_level"])
        critical = float(row["critical_level"])
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"row {rownum}: bad threshold levels: {exc}", rownum) from exc
    if not (0.0 <= critical <= warning):
        raise SchemaError(
            f"row {rownum}: need 0 <= critical_level <= warning_level", rownum)
    return EflowThreshold(sid, warning, critical)


def _check_integrity(stations: dict[str, StationRecord], series: list[SeriesPoint],
                     thresholds: dict[str, EflowThreshold]) -> None:
    dangling = sorted({p.station_id for p in series if p.station_id not in stations})
    if dangling:
        raise DanglingReference(
            f"series references unknown stations: {', '.join(dangling)}", dangling)
    bad_sites = sorted(
        sid for sid in thresholds
        if sid not in stations or stations[sid].kind != "eflow_site")
    if bad_sites:
        raise DanglingReference(
            f"thresholds reference unknown e-flow sites: {', '.join(bad_sites)}", bad_sites)
    seen: set[tuple[str, dt.date, str]] = set()
    for p in series:
        key = (p.station_id, p.date, p.kind)
        if key in seen:
            raise SchemaError(
                f"duplicate series point for {p.station_id} {p.date} {p.kind}")
        seen.add(key)


def _assemble(dataset_id: str, station_rows: Iterable[StationRecord],
              series: list[SeriesPoint],
              threshold_rows: Iterable[EflowThreshold]) -> Datasets:
    stations: dict[str, StationRecord] = {}
    for s in station_rows:
        if s.station_id in stations:
            raise SchemaError(f"duplicate station_id {s.station_id!r}")
        stations[s.station_id] = s
    thresholds: dict[str, EflowThreshold] = {}
    for t in threshold_rows:
        if t.site_id in thresholds:
            raise SchemaError(f"duplicate threshold for site {t.site_id!r}")
        thresholds[t.site_id] = t
    _check_integrity(stations, series, thresholds)
    return Datasets(dataset_id=dataset_id, stations=stations, series=series,
                    thresholds=thresholds)


# --------------------------------------------------------------------------
# CSV loading

def _read_csv(path: Path, expected_header: list[str]) -> list[tuple[dict[str, str], int]]:
    try:
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path.name}: empty file, header row required") from None
            if header != expected_header:
                raise SchemaError(
                    f"{path.name}: header {header} != expected {expected_header}")
            rows = []
            for rownum, raw in enumerate(reader, start=2):
                if not raw or all(not cell.strip() for cell in raw):
                    continue
                if len(raw) != len(expected_header):
                    raise SchemaError(
                        f"{path.name} row {rownum}: {len(raw)} fields, "
                        f"expected {len(expected_header)}", rownum)
                rows.append((dict(zip(expected_header, raw)), rownum))
            return rows
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc


def load_datasets(manifest_path: str | Path) -> Datasets:
    """Load a dataset manifest: JSON with dataset_id plus paths (relative to
    the manifest) for the three CSV files. Referential integrity is enforced
    at load time."""
    manifest_path = Path(manifest_path)
    with open(manifest_path, encoding="utf-8") as f:
        manifest = json.load(f)
    base = manifest_path.parent
    station_rows = [_parse_station(row, n)
                    for row, n in _read_csv(base / manifest["stations"], STATIONS_HEADER)]
    series = [_parse_series_point(row, n)
              for row, n in _read_csv(base / manifest["series"], SERIES_HEADER)]
    threshold_rows = [_parse_threshold(row, n)
                      for row, n in _read_csv(base / manifest["thresholds"], THRESHOLDS_HEADER)]
    return _assemble(manifest.get("dataset_id", "dataset"), station_rows, series,
                     threshold_rows)


# --------------------------------------------------------------------------
# remote loading (same schema as JSON arrays over HTTP)

class RemoteDatasetClient:
    """Fetches the three datasets from an HTTP source serving JSON arrays
    with the CSV column names as keys. Interchangeable with load_datasets."""

    def __init__(self, base_url: str, dataset_id: str | None = None,
                 timeout: float = 30.0, transport: httpx.BaseTransport | None = None):
        self.base_url = base_url
        self.dataset_id = dataset_id or base_url
        self._client = httpx.Client(base_url=base_url, timeout=timeout,
                                    transport=transport)

    def _get(self, path: str, params: dict[str, str] | None = None) -> list[dict[str, Any]]:
        try:
            resp = self._client.get(path, params=params or {})
            resp.raise_for_status()
            body = resp.json()
        except httpx.HTTPError as exc:
            raise ProviderFailure(f"dataset fetch {path} failed: {exc}") from exc
        if not isinstance(body, list):
            raise ProviderFailure(f"dataset endpoint {path} did not return an array")
        return body

    def load(self, since: dt.date | None = None, until: dt.date | None = None) -> Datasets:
        params = {}
        if since:
            params["since"] = since.isoformat()
        if until:
            params["until"] = until.isoformat()
        stations = [_parse_station({k: str(v) for k, v in row.items()}, n)
                    for n, row in enumerate(self._get("/stations"), start=1)]
        series = [_parse_series_point({k: ("" if v is None else str(v)) for k, v in row.items()}, n)
                  for n, row in enumerate(self._get("/series", params), start=1)]
        thresholds = [_parse_threshold({k: str(v) for k, v in row.items()}, n)
                      for n, row in enumerate(self._get("/thresholds"), start=1)]
        return _assemble(self.dataset_id, stations, series, thresholds)
