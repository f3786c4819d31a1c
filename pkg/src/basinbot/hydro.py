"""Hydrology tool plugin: rainfall statistics, nearest stations, water
availability, e-flow alerts and chart specs over a loaded dataset snapshot.

Every tool result is structured data carrying a dataset SourceRef (dataset
id, query parameters, retrieval time) plus a presentation-ready table;
numeric table cells are rounded to two decimals, the underlying records keep
full precision.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Any, Callable

from .datasets import Datasets, StationRecord, normalize_river
from .errors import NoData, UnknownRiver, UnknownStation, WrongKind
from .messages import SourceRef
from .tools import ToolDescriptor, ToolParam

EARTH_RADIUS_KM = 6371.0

MONTH_LABELS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
                "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")

_SEVERITY_RANK = {"normal": 0, "warning": 1, "critical": 2}


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance on a sphere of radius EARTH_RADIUS_KM."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = math.radians(lat2 - lat1)
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return EARTH_RADIUS_KM * 2 * math.atan2(math.sqrt(a), math.sqrt(1 - a))


def severity_for(flow: float, warning_level: float, critical_level: float) -> str:
    """Total severity function: critical below the critical level (strict),
    warning in [critical, warning), normal otherwise."""
    if flow < critical_level:
        return "critical"
    if flow < warning_level:
        return "warning"
    return "normal"


@dataclass
class MonthlyStats:
    month: str  # "YYYY-MM"
    min: float | None
    max: float | None
    avg: float | None
    total: float
    n_observed: int

    def to_json(self) -> dict[str, Any]:
        return {"month": self.month, "min": self.min, "max": self.max,
                "avg": self.avg, "total": self.total, "n_observed": self.n_observed}


def _round2(x: float | None) -> float | None:
    return None if x is None else round(x, 2)


class HydroPlugin:
    """Tools over one immutable Datasets snapshot. ``clock`` stamps the
    retrieved_at field of dataset refs; inject a fixed one for reproducible
    transcripts."""

    def __init__(self, data: Datasets,
                 clock: Callable[[], dt.datetime] | None = None):
        self.data = data
        self._clock = clock or (lambda: dt.datetime.now(dt.timezone.utc))

    def _ref(self, tool: str, params: dict[str, Any]) -> SourceRef:
        return SourceRef.dataset(self.data.dataset_id, {"tool": tool, **params},
                                 self._clock().isoformat())

    # ------------------------------------------------------------------
    # e-flow site listing

    def list_eflow_sites(self) -> dict[str, Any]:
        sites = sorted((s for s in self.data.stations.values() if s.kind == "eflow_site"),
                       key=lambda s: s.station_id)
        rows = [{"site_id": s.station_id, "name": s.name, "river": s.river}
                for s in sites]
        ref = self._ref("list_eflow_sites", {})
        return {
            "sites": rows,
            "table": {"columns": ["site_id", "name", "river"],
                      "rows": [[r["site_id"], r["name"], r["river"]] for r in rows]},
            "source_refs": [ref.to_json()],
        }

    # ------------------------------------------------------------------
    # nearest stations

    def nearest_stations(self, river: str | None = None, lat: float | None = None,
                         lon: float | None = None, n: int = 5,
                         kind: str | None = None) -> dict[str, Any]:
        if river is not None:
            anchors = self.data.stations_on_river(river)
            if not anchors:
                raise UnknownRiver(f"no stations on river {river!r}")
            ref_lat = sum(s.lat for s in anchors) / len(anchors)
            ref_lon = sum(s.lon for s in anchors) / len(anchors)
            reference = {"river": river, "lat": ref_lat, "lon": ref_lon,
                         "basis": f"centroid of {len(anchors)} stations"}
        elif lat is not None and lon is not None:
            ref_lat, ref_lon = float(lat), float(lon)
            reference = {"lat": ref_lat, "lon": ref_lon}
        else:
            raise ValueError("need either a river name or lat and lon")

        candidates = [s for s in self.data.stations.values()
                      if kind is None or s.kind == kind]
        ranked = sorted(
            ((haversine_km(ref_lat, ref_lon, s.lat, s.lon), s) for s in candidates),
            key=lambda pair: (pair[0], pair[1].station_id))[:n]

        stations = [{"station": _station_json(s), "distance_km": d} for d, s in ranked]
        params: dict[str, Any] = {"n": n}
        if river is not None:
            params["river"] = river
        else:
            params["lat"], params["lon"] = ref_lat, ref_lon
        if kind is not None:
            params["kind"] = kind
        ref = self._ref("nearest_stations", params)
        return {
            "reference": reference,
            "stations": stations,
            "table": {
                "columns": ["station_id", "name", "river", "kind", "distance_km"],
                "rows": [[s.station_id, s.name, s.river, s.kind, round(d, 3)]
                         for d, s in ranked],
            },
            "source_refs": [ref.to_json()],
        }

    # ------------------------------------------------------------------
    # rainfall statistics

    def _monthly_stats(self, station_id: str, year: int) -> list[MonthlyStats]:
        station = self.data.stations.get(station_id)
        if station is None:
            raise UnknownStation(f"unknown station {station_id!r}")
        if station.kind != "rainfall":
            raise WrongKind(f"station {station_id} is a {station.kind} station, "
                            "rainfall statistics need a rainfall station")
        by_month: dict[int, list[float]] = {m: [] for m in range(1, 13)}
        for p in self.data.points_for(station_id):
            if p.kind == "rainfall" and p.quality == "observed" \
                    and p.date.year == year and p.value is not None:
                by_month[p.date.month].append(p.value)
        stats = []
        for m in range(1, 13):
            values = by_month[m]
            month = f"{year:04d}-{m:02d}"
            if values:
                stats.append(MonthlyStats(month, min(values), max(values),
                                          sum(values) / len(values), sum(values),
                                          len(values)))
            else:
                stats.append(MonthlyStats(month, None, None, None, 0.0, 0))
        return stats

    def monthly_rainfall(self, station_id: str, year: int) -> dict[str, Any]:
        stats = self._monthly_stats(station_id, year)
        ref = self._ref("monthly_rainfall", {"station_id": station_id, "year": year})
        return {
            "station_id": station_id,
            "year": year,
            "unit": "mm",
            "months": [s.to_json() for s in stats],
            "table": {
                "columns": ["month", "min_mm", "max_mm", "avg_mm", "total_mm"],
                "rows": [[s.month, _round2(s.min), _round2(s.max), _round2(s.avg),
                          _round2(s.total)] for s in stats],
            },
            "source_refs": [ref.to_json()],
        }

    def compare_rainfall(self, station_id: str, year_a: int, year_b: int) -> dict[str, Any]:
        stats_a = self._monthly_stats(station_id, year_a)
        stats_b = self._monthly_stats(station_id, year_b)
        deltas = [a.total - b.total for a, b in zip(stats_a, stats_b)]
        ref = self._ref("compare_rainfall", {"station_id": station_id,
                                             "year_a": year_a, "year_b": year_b})
        return {
            "station_id": station_id,
            "year_a": year_a,
            "year_b": year_b,
            "unit": "mm",
            "months_a": [s.to_json() for s in stats_a],
            "months_b": [s.to_json() for s in stats_b],
            "delta_total": deltas,
            "year_a_has_data": any(s.n_observed > 0 for s in stats_a),
            "year_b_has_data": any(s.n_observed > 0 for s in stats_b),
            "table": {
                "columns": ["month", f"total_{year_a}_mm", f"total_{year_b}_mm", "delta_mm"],
                "rows": [[MONTH_LABELS[i], _round2(stats_a[i].total),
                          _round2(stats_b[i].total), _round2(deltas[i])]
                         for i in range(12)],
            },
            "source_refs": [ref.to_json()],
        }

    # ------------------------------------------------------------------
    # water availability

    def water_availability(self, river: str, month: str,
                           horizon: str = "historical") -> dict[str, Any]:
        if horizon not in ("historical", "forecast"):
            raise ValueError("horizon must be 'historical' or 'forecast'")
        on_river = self.data.stations_on_river(river)
        if not on_river:
            raise UnknownRiver(f"no stations on river {river!r}")
        reservoirs = [s for s in on_river if s.kind == "reservoir"]
        if not reservoirs:
            raise NoData(f"river {river!r} has no reservoir stations")
        year, mon = _parse_month(month)
        want_quality = "observed" if horizon == "historical" else "forecast"

        contributions = []
        quality_counts: dict[str, int] = {}
        for station in sorted(reservoirs, key=lambda s: s.station_id):
            in_month = [p for p in self.data.points_for(station.station_id)
                        if p.kind == "reservoir" and p.quality == want_quality
                        and p.date.year == year and p.date.month == mon
                        and p.value is not None]
            if not in_month:
                continue
            last = max(in_month, key=lambda p: p.date)
            contributions.append((station, last))
            quality_counts[last.quality] = quality_counts.get(last.quality, 0) + 1
        if not contributions:
            raise NoData(f"no {want_quality} storage points for river {river!r} in {month}")

        volume = sum(p.value for _, p in contributions if p.value is not None)
        ref = self._ref("water_availability",
                        {"river": river, "month": month, "horizon": horizon})
        return {
            "river": river,
            "month": month,
            "horizon": horizon,
            "is_forecast": horizon == "forecast",
            "volume": volume,
            "unit": "Mm3",
            "n_stations": len(contributions),
            "quality_counts": quality_counts,
            "stations": [{"station_id": s.station_id, "date": p.date.isoformat(),
                          "volume": p.value} for s, p in contributions],
            "table": {
                "columns": ["river", "month", "horizon", "volume_Mm3", "n_stations"],
                "rows": [[river, month, horizon, _round2(volume), len(contributions)]],
            },
            "source_refs": [ref.to_json()],
        }

    # ------------------------------------------------------------------
    # e-flow alerts

    def eflow_alerts(self, period: str) -> dict[str, Any]:
        year, mon = _parse_month(period)
        alerts = []
        no_data_sites = []
        worst_per_site: dict[str, tuple[int, float]] = {}
        for site_id in sorted(self.data.thresholds):
            thr = self.data.thresholds[site_id]
            flows = [p for p in self.data.points_for(site_id)
                     if p.kind == "discharge" and p.value is not None
                     and p.date.year == year and p.date.month == mon]
            if not flows:
                no_data_sites.append(site_id)
                continue
            for p in sorted(flows, key=lambda p: p.date):
                severity = severity_for(p.value, thr.warning_level, thr.critical_level)
                if severity == "critical":
                    margin = thr.critical_level - p.value
                    shortfall = margin / thr.critical_level
                elif severity == "warning":
                    margin = thr.warning_level - p.value
                    shortfall = margin / thr.warning_level
                else:
                    margin, shortfall = None, 0.0
                alerts.append({"site_id": site_id, "date": p.date.isoformat(),
                               "severity": severity, "flow": p.value, "margin": margin})
                rank = (_SEVERITY_RANK[severity], shortfall)
                if site_id not in worst_per_site or rank > worst_per_site[site_id]:
                    worst_per_site[site_id] = rank

        most_critical = None
        breached = [(sid, rank) for sid, rank in worst_per_site.items() if rank[0] > 0]
        if breached:
            breached.sort(key=lambda item: (-item[1][0], -item[1][1], item[0]))
            most_critical = breached[0][0]

        ref = self._ref("eflow_alerts", {"period": period})
        return {
            "period": period,
            "alerts": alerts,
            "most_critical": most_critical,
            "no_data_sites": no_data_sites,
            "table": {
                "columns": ["site_id", "date", "severity", "flow_m3s", "margin_m3s"],
                "rows": [[a["site_id"], a["date"], a["severity"],
                          _round2(a["flow"]), _round2(a["margin"])] for a in alerts],
            },
            "source_refs": [ref.to_json()],
        }

    # ------------------------------------------------------------------
    # chart specs (pure data; rendering happens client-side)

    def chart_spec(self, tool: str, params: dict[str, Any],
                   chart_kind: str) -> dict[str, Any]:
        if chart_kind not in ("line", "bar", "grouped_bar"):
            raise ValueError(f"unknown chart kind {chart_kind!r}")
        if tool == "monthly_rainfall":
            result = self.monthly_rainfall(params["station_id"], int(params["year"]))
            series = [{
                "label": str(result["year"]),
                "points": [{"x": MONTH_LABELS[i], "y": m["total"]}
                           for i, m in enumerate(result["months"])],
            }]
            title = f"Monthly rainfall totals for {params['station_id']} in {result['year']}"
        elif tool == "compare_rainfall":
            result = self.compare_rainfall(params["station_id"], int(params["year_a"]),
                                           int(params["year_b"]))
            series = [
                {"label": str(result["year_a"]),
                 "points": [{"x": MONTH_LABELS[i], "y": m["total"]}
                            for i, m in enumerate(result["months_a"])]},
                {"label": str(result["year_b"]),
                 "points": [{"x": MONTH_LABELS[i], "y": m["total"]}
                            for i, m in enumerate(result["months_b"])]},
            ]
            title = (f"Monthly rainfall totals for {params['station_id']}: "
                     f"{result['year_a']} vs {result['year_b']}")
        else:
            raise ValueError(f"chart_spec does not support tool {tool!r}")

        chart = {
            "kind": chart_kind,
            "title": title,
            "x_axis": {"label": "Month", "unit": None},
            "y_axis": {"label": "Rainfall", "unit": "mm"},
            "series": series,
        }
        return {"chart": chart, "source_refs": result["source_refs"]}

    # ------------------------------------------------------------------
    # tool-protocol surface

    def descriptors_and_handlers(self) -> list[tuple[ToolDescriptor, Callable]]:
        return [
            (ToolDescriptor(
                "list_eflow_sites",
                "List all environmental-flow monitoring sites with their rivers.",
            ), lambda args: self.list_eflow_sites()),
            (ToolDescriptor(
                "nearest_stations",
                ("Find the monitoring stations nearest to a river (centroid of its "
                 "stations) or to explicit coordinates. Distances in km."),
                (ToolParam("river", "string", description="River name (alternative to lat/lon)."),
                 ToolParam("lat", "number", description="Latitude in degrees."),
                 ToolParam("lon", "number", description="Longitude in degrees."),
                 ToolParam("n", "integer", description="How many stations (default 5)."),
                 ToolParam("kind", "enum", description="Restrict to one station kind.",
                           enum_values=("rainfall", "discharge", "reservoir", "eflow_site"))),
            ), self._handle_nearest),
            (ToolDescriptor(
                "monthly_rainfall",
                ("Monthly rainfall statistics (min, max, average, total in mm) for one "
                 "rainfall station over one calendar year."),
                (ToolParam("station_id", "string", required=True,
                           description="Rainfall station id."),
                 ToolParam("year", "integer", required=True, description="Calendar year.")),
            ), lambda args: self.monthly_rainfall(args["station_id"], args["year"])),
            (ToolDescriptor(
                "compare_rainfall",
                "Compare monthly rainfall between two years at one station.",
                (ToolParam("station_id", "string", required=True,
                           description="Rainfall station id."),
                 ToolParam("year_a", "integer", required=True, description="First year."),
                 ToolParam("year_b", "integer", required=True, description="Second year.")),
            ), lambda args: self.compare_rainfall(args["station_id"], args["year_a"],
                                                  args["year_b"])),
            (ToolDescriptor(
                "water_availability",
                ("Reservoir storage available on a river for one month (sum of each "
                 "reservoir's last reported storage, in million cubic meters)."),
                (ToolParam("river", "string", required=True, description="River name."),
                 ToolParam("month", "string", required=True, description="Month as YYYY-MM."),
                 ToolParam("horizon", "enum", description="historical (default) or forecast.",
                           enum_values=("historical", "forecast"))),
            ), lambda args: self.water_availability(args["river"], args["month"],
                                                    args.get("horizon", "historical"))),
            (ToolDescriptor(
                "eflow_alerts",
                ("Evaluate every e-flow site's daily flows against its thresholds for "
                 "one month; reports alert severities and the most critical site."),
                (ToolParam("period", "string", required=True, description="Month as YYYY-MM."),),
            ), lambda args: self.eflow_alerts(args["period"])),
            (ToolDescriptor(
                "chart_spec",
                ("Build a chart specification (pure data, rendered client-side) from a "
                 "rainfall tool result."),
                (ToolParam("tool", "enum", required=True,
                           description="Underlying data tool.",
                           enum_values=("monthly_rainfall", "compare_rainfall")),
                 ToolParam("params", "object", required=True,
                           description="Arguments for the underlying tool."),
                 ToolParam("chart_kind", "enum", required=True,
                           description="Chart type.",
                           enum_values=("line", "bar", "grouped_bar"))),
            ), lambda args: self.chart_spec(args["tool"], args["params"],
                                            args["chart_kind"])),
        ]

    def _handle_nearest(self, args: dict[str, Any]) -> dict[str, Any]:
        return self.nearest_stations(river=args.get("river"), lat=args.get("lat"),
                                     lon=args.get("lon"), n=args.get("n", 5),
                                     kind=args.get("kind"))

    def register(self, registry) -> None:
        for descriptor, handler in self.descriptors_and_handlers():
            registry.register(descriptor, handler)


def _station_json(s: StationRecord) -> dict[str, Any]:
    return {"station_id": s.station_id, "name": s.name, "river": s.river,
            "country": s.country, "lat": s.lat, "lon": s.lon, "kind": s.kind}


def _parse_month(month: str) -> tuple[int, int]:
    try:
        year_s, mon_s = month.split("-")
        year, mon = int(year_s), int(mon_s)
        if not 1 <= mon <= 12:
            raise ValueError
        return year, mon
    except ValueError:
        raise ValueError(f"month must be YYYY-MM, got {month!r}") from None
