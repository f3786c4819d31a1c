"""Deterministic synthetic basin fixtures: stations, observation series,
e-flow thresholds, a small document corpus, an engineered evaluation
dataset, and ready-to-serve config files.

Everything is a pure function of the seed, so two runs with the same seed
produce byte-identical files. All station names, numbers and document
contents are synthetic demonstration data.
"""

from __future__ import annotations

import calendar
import datetime as dt
import json
import math
import random
from pathlib import Path

RIVERS = (
    ("Olifants", "OLI", "South Africa", -24.2, 30.4),
    ("Luvuvhu", "LUV", "South Africa", -22.9, 30.6),
    ("Crocodile", "CRO", "South Africa", -24.5, 27.3),
    ("Shashe", "SHA", "Zimbabwe", -21.4, 28.6),
    ("Mokolo", "MOK", "Botswana", -23.6, 27.8),
)

WET_MONTHS = {11, 12, 1, 2, 3}
SHOULDER_MONTHS = {4, 10}


def _daterange(start: dt.date, end: dt.date):
    day = start
    while day <= end:
        yield day
        day += dt.timedelta(days=1)


def _month_end(year: int, month: int) -> dt.date:
    return dt.date(year, month, calendar.monthrange(year, month)[1])


# --------------------------------------------------------------------------
# hydrology fixtures

def build_stations(rng: random.Random) -> list[dict]:
    stations = []
    for river, abbr, country, base_lat, base_lon in RIVERS:
        def jitter():
            return rng.uniform(-0.6, 0.6)

        stations.append({"station_id": f"RF-{abbr}-01",
                         "name": "Shisakashanghondo" if abbr == "LUV" else f"{river} Rain Gauge North",
                         "river": river, "country": country,
                         "lat": round(base_lat + jitter(), 4),
                         "lon": round(base_lon + jitter(), 4), "kind": "rainfall"})
        stations.append({"station_id": f"RF-{abbr}-02",
                         "name": f"{river} Rain Gauge South",
                         "river": river, "country": country,
                         "lat": round(base_lat + jitter(), 4),
                         "lon": round(base_lon + jitter(), 4), "kind": "rainfall"})
        stations.append({"station_id": f"DS-{abbr}-01",
                         "name": f"{river} Flow Weir",
                         "river": river, "country": country,
                         "lat": round(base_lat + jitter(), 4),
                         "lon": round(base_lon + jitter(), 4), "kind": "discharge"})
        stations.append({"station_id": f"RV-{abbr}-01",
                         "name": f"{river} Main Dam",
                         "river": river, "country": country,
                         "lat": round(base_lat + jitter(), 4),
                         "lon": round(base_lon + jitter(), 4), "kind": "reservoir"})
        if abbr == "OLI":
            stations.append({"station_id": "RV-OLI-02",
                             "name": "Olifants Upper Dam",
                             "river": river, "country": country,
                             "lat": round(base_lat + jitter(), 4),
                             "lon": round(base_lon + jitter(), 4), "kind": "reservoir"})
        stations.append({"station_id": f"EF-{abbr}-01",
                         "name": f"{river} E-flow Site",
                         "river": river, "country": country,
                         "lat": round(base_lat + jitter(), 4),
                         "lon": round(base_lon + jitter(), 4), "kind": "eflow_site"})
    return stations


def _rain_value(rng: random.Random, month: int) -> float:
    if month in WET_MONTHS:
        p, scale = 0.55, 18.0
    elif month in SHOULDER_MONTHS:
        p, scale = 0.30, 8.0
    else:
        p, scale = 0.08, 3.0
    if rng.random() < p:
        return round(rng.uniform(0.2, 2.0 * scale), 1)
    return 0.0


def build_series(rng: random.Random, stations: list[dict],
                 thresholds: dict[str, tuple[float, float]]) -> list[dict]:
    rows = []

    for st in [s for s in stations if s["kind"] == "rainfall"]:
        for day in _daterange(dt.date(2023, 1, 1), dt.date(2024, 12, 31)):
            if rng.random() < 0.03:
                rows.append({"station_id": st["station_id"], "date": day.isoformat(),
                             "kind": "rainfall", "value": "", "unit": "mm",
                             "quality": "missing"})
            else:
                rows.append({"station_id": st["station_id"], "date": day.isoformat(),
                             "kind": "rainfall", "value": f"{_rain_value(rng, day.month):.1f}",
                             "unit": "mm", "quality": "observed"})

    for st in [s for s in stations if s["kind"] == "discharge"]:
        base = rng.uniform(20.0, 80.0)
        for day in _daterange(dt.date(2024, 11, 1), dt.date(2024, 12, 31)):
            flow = base * rng.uniform(0.6, 1.4)
            rows.append({"station_id": st["station_id"], "date": day.isoformat(),
                         "kind": "discharge", "value": f"{flow:.2f}",
                         "unit": "m3_per_s", "quality": "observed"})

    # e-flow sites: flows normally above the warning level; one site dips to
    # warning in early December, another breaches critical mid-December
    for st in [s for s in stations if s["kind"] == "eflow_site"]:
        warning, critical = thresholds[st["station_id"]]
        base = warning * 2.0
        for day in _daterange(dt.date(2024, 11, 1), dt.date(2024, 12, 31)):
            flow = base * rng.uniform(0.6, 1.4)
            if st["station_id"] == "EF-CRO-01" and day.month == 12 and 10 <= day.day <= 14:
                flow = critical * rng.uniform(0.5, 0.9)
            elif st["station_id"] == "EF-OLI-01" and day.month == 12 and 5 <= day.day <= 7:
                flow = critical + (warning - critical) * rng.uniform(0.3, 0.7)
            rows.append({"station_id": st["station_id"], "date": day.isoformat(),
                         "kind": "discharge", "value": f"{flow:.2f}",
                         "unit": "m3_per_s", "quality": "observed"})

    for st in [s for s in stations if s["kind"] == "reservoir"]:
        capacity = rng.uniform(80.0, 600.0)

        def storage(month: int) -> float:
            seasonal = 0.45 + 0.35 * math.sin(2 * math.pi * (month - 3) / 12.0)
            level = capacity * (seasonal + rng.uniform(-0.05, 0.05))
            return min(max(level, capacity * 0.05), capacity * 0.98)

        for year in (2023, 2024):
            for month in range(1, 13):
                rows.append({"station_id": st["station_id"],
                             "date": _month_end(year, month).isoformat(),
                             "kind": "reservoir", "value": f"{storage(month):.2f}",
                             "unit": "Mm3", "quality": "observed"})
        for month in range(1, 13):
            rows.append({"station_id": st["station_id"],
                         "date": _month_end(2025, month).isoformat(),
                         "kind": "reservoir", "value": f"{storage(month):.2f}",
                         "unit": "Mm3", "quality": "forecast"})
    return rows


def build_thresholds(rng: random.Random, stations: list[dict]) -> dict[str, tuple[float, float]]:
    thresholds = {}
    for st in [s for s in stations if s["kind"] == "eflow_site"]:
        base = rng.uniform(15.0, 60.0)
        thresholds[st["station_id"]] = (round(base, 1), round(base * 0.5, 1))
    return thresholds


# --------------------------------------------------------------------------
# corpus documents (fixed synthetic prose; the seed does not change them)

_DOCS: list[dict] = [
    {
        "doc_id": "basin-overview", "path": "corpus/basin-overview.md",
        "doc_type": "policy_report", "date": "2023-06-15",
        "tags": ["overview", "transboundary"],
        "body": """# Basin Overview and Shared Waters

The basin covered by this synthetic demonstration corpus is shared by four
countries: Botswana, Mozambique, South Africa, and Zimbabwe. Its waters rise
on interior plateaus and drain eastward to the Indian Ocean, crossing semi-arid
rangelands, irrigated valleys, and densely settled mining districts along the way.

An estimated 14.2 million people live within the basin boundary in this
demonstration dataset. Population is concentrated in the upstream industrial
belt and in the irrigation clusters of the middle reaches. Water demand is
dominated by irrigated agriculture, followed by mining, power generation, and
urban supply.

The principal tributaries represented in the demonstration network are the
Olifants, the Luvuvhu, the Crocodile, the Shashe, and the Mokolo. Each
tributary carries its own monitoring stations for rainfall, river discharge,
reservoir storage, and environmental flows.

Mean annual runoff for the whole demonstration basin is taken to be 5,500
million cubic meters, of which roughly a third is already committed to
existing storage schemes. The balance sustains ecosystems, downstream users,
and the estuary.

Transboundary coordination is handled by a joint watercourse commission in
which all four countries participate. The commission publishes allocation
guidance, coordinates flood warnings, and maintains the shared monitoring
register on which this corpus is modeled.""",
    },
    {
        "doc_id": "reservoir-register", "path": "corpus/reservoir-register.txt",
        "doc_type": "policy_report", "date": "2024-02-01",
        "tags": ["reservoirs", "storage"],
        "body": """Reservoir Register for the Demonstration Basin

The demonstration register lists six major reservoirs. The Olifants arm
carries two of them, the Olifants Main Dam and the Olifants Upper Dam, while
the Luvuvhu, Crocodile, Shashe, and Mokolo arms carry one main dam each.

Combined gross storage capacity across the six registered reservoirs is
1,840 million cubic meters in this synthetic dataset. Storage peaks at the
end of the wet season, typically in March, and declines through the dry
winter months as irrigation releases continue.

Operating rules require each dam to hold an environmental reserve. Releases
to meet downstream environmental flow requirements take precedence over
irrigation abstractions whenever a site falls below its warning threshold.

Dam safety inspections are scheduled every five years. The register records
the inspection date, spillway condition, and instrumentation status for each
wall. Remote monitoring of reservoir levels reports monthly storage in
million cubic meters to the basin data platform.""",
    },
    {
        "doc_id": "eflow-assessment", "path": "corpus/eflow-assessment.md",
        "doc_type": "eflow_assessment", "date": "2023-11-20",
        "tags": ["eflow", "thresholds"],
        "body": """# Environmental Flow Assessment Methods

Environmental flows are the discharge regimes required to keep river
ecosystems healthy. This synthetic assessment assigns each designated site
two screening levels: a warning level, below which conditions degrade, and a
critical level, below which acute ecological stress is expected.

The demonstration network designates one environmental flow site on each of
the five monitored tributaries. Site thresholds were derived from habitat
rating curves fitted at surveyed cross-sections, then rounded for screening
use. A daily flow below the critical level constitutes a critical breach; a
flow at or above the critical level but below the warning level constitutes
a warning condition.

Hydraulic habitat assessment at the surveyed sites combined rated
cross-sections with hydraulic modeling of depth and velocity distributions.
Fish and macroinvertebrate guilds were mapped to those distributions to
identify the flows at which usable habitat contracts sharply.

Screening runs monthly. For each site the screen reports every day in breach,
the severity class of the day, and the shortfall relative to the breached
threshold. Sites with no observations in the screening month are reported as
having no data rather than being treated as compliant.""",
    },
    {
        "doc_id": "hydrology-model", "path": "corpus/hydrology-model.md",
        "doc_type": "hydrological_model", "date": "2024-05-10",
        "tags": ["model", "runoff"],
        "body": """# Basin Hydrological Model Description

The demonstration basin model is a daily water-balance model driven by
gridded rainfall and reference evapotranspiration. Sub-catchments follow the
five monitored tributaries, each calibrated against its flow weir record.

Calibration used the 2023 observation year with a split-sample check against
2024. Model efficiency scores in the demonstration configuration range from
0.62 on the flashier sandveld catchments to 0.81 on the perennial upper
reaches.

Simulated mean annual runoff is 5,500 million cubic meters for the whole
demonstration basin, consistent with the figure quoted in the basin overview.
Roughly 60 percent of runoff is generated in the wet half-year between
November and March.

The model provides the forecast branch of the data platform. Seasonal
forecast storage trajectories for each registered reservoir are produced by
forcing the model with downscaled seasonal climate outlooks, and are loaded
into the platform as forecast-quality points for the year ahead.

Known limitations include unmodeled farm dams, a simple single-layer
groundwater store, and fixed abstraction schedules. These limitations mainly
affect low-flow skill in the driest months.""",
    },
    {
        "doc_id": "water-quality", "path": "corpus/water-quality.txt",
        "doc_type": "policy_report", "date": "2023-09-05",
        "tags": ["quality", "pollution"],
        "body": """Water Quality Status Summary

The major pollutant pressures recorded in the demonstration dataset are mine
drainage on the upper Olifants arm, nutrient enrichment downstream of urban
wastewater works, and sediment loads from overgrazed communal rangelands.

Acid mine drainage raises sulfate concentrations and lowers pH in the
affected reaches. The upper Olifants is flagged as the most polluted reach in
the demonstration dataset, with sulfate concentrations exceeding guideline
values in roughly four samples out of ten.

Nutrient enrichment shows up as elevated phosphate immediately downstream of
the three largest wastewater works, with seasonal algal blooms in the
receiving impoundments during late summer.

Monitoring sites are sampled quarterly. Classification follows a five-class
scheme from natural to seriously modified. In the latest synthetic survey,
two sites classified as natural, nine as good, seven as fair, and three as
poor, with one site seriously modified.""",
    },
    {
        "doc_id": "climate-outlook", "path": "corpus/climate-outlook.md",
        "doc_type": "other", "date": "2024-08-18",
        "tags": ["climate", "enso"],
        "body": """# Climate Variability and Change Outlook

Rainfall over the demonstration basin is strongly seasonal, with the wet
season spanning November to March. Interannual variability is dominated by
the El Nino Southern Oscillation: El Nino phases typically bring
below-average wet-season rainfall and elevated drought risk, while La Nina
phases tilt the odds toward above-average rainfall and flood risk.

Climate change projections used for this synthetic outlook indicate warming
of 1.5 to 2.5 degrees Celsius by mid-century, an intensification of heavy
rainfall events, and a modest decline in total wet-season rainfall in the
western half of the basin.

For planning purposes the outlook translates these projections into three
stress test scenarios: a drying scenario with 15 percent lower mean annual
runoff, a variability scenario with unchanged mean but doubled drought
frequency, and a wet-extremes scenario with 25 percent larger design floods.

Adaptation priorities identified for the basin include conjunctive use of
groundwater during droughts, raised flood freeboard on new infrastructure,
and revised reservoir operating rules that bank wet-season surpluses.""",
    },
    {
        "doc_id": "groundwater-study", "path": "corpus/groundwater-study.md",
        "doc_type": "hydrological_model", "date": "2023-04-12",
        "tags": ["groundwater", "aquifers"],
        "body": """# Groundwater and Surface Water Interaction Study

Two transboundary aquifers underlie the demonstration basin: a weathered
basement aquifer in the west shared across the Shashe headwaters, and an
alluvial aquifer tracking the main stem in the east. Both are represented in
this synthetic study.

The alluvial aquifer exchanges water with the river along most of its
length. During the wet season the river recharges the alluvium; during the
dry season the gradient reverses and the aquifer sustains baseflow. The study
estimates that groundwater contributes around 30 percent of dry-season flow
at the downstream boundary.

The basement aquifer is the main rural supply source. Borehole yields are
modest and drought-sensitive; static levels in the synthetic record fell by
up to four meters during the last drought cycle before recovering over two
wet seasons.

Management recommendations pair wellfield metering with river-aquifer
exchange monitoring at six index transects, so that abstraction caps can be
adjusted when baseflow support weakens.""",
    },
    {
        "doc_id": "governance-framework", "path": "corpus/governance-framework.txt",
        "doc_type": "policy_report", "date": "2022-12-01",
        "tags": ["governance", "institutions"],
        "body": """Water Governance Framework

Basin governance in this demonstration corpus rests on three tiers. National
water authorities in each of the four countries license abstractions and
operate national monitoring networks. A joint watercourse commission
coordinates transboundary allocation, data sharing, and flood warning. Local
catchment forums advise on site-level conflicts and conservation practice.

The basin information system is the shared data backbone. It registers
monitoring stations, publishes daily and monthly observations, and archives
the document library from which this synthetic corpus is drawn. Member states
retain ownership of their raw records while granting the commission a
standing license to publish derived products.

Allocation guidance is revisited every five years, or after any drought that
triggers basin-wide restrictions. The guidance sets reserve flows first,
then assurance-of-supply rules for urban systems, then irrigation quotas.

Dispute resolution follows a tiered path from technical reconciliation of
records, through mediated negotiation, to referral to the commission council.
No dispute in the synthetic record has progressed past mediation.""",
    },
    {
        "doc_id": "irrigation-census", "path": "corpus/irrigation-census.txt",
        "doc_type": "other", "date": "2024-03-22",
        "tags": ["irrigation", "agriculture"],
        "body": """Irrigated Agriculture Census Summary

The synthetic census maps 96,000 hectares of irrigated land across the
demonstration basin. Citrus and table grapes dominate the perennial area;
maize and vegetables dominate the annual area. Center pivots account for just
over half of the equipped area, with drip systems expanding fastest.

Agricultural water use in the census year is estimated at 780 million cubic
meters, about two thirds of all consumptive use in the basin. Conveyance
losses in older canal schemes remain the largest single inefficiency, at an
estimated 18 percent of diverted volume.

Satellite-derived evapotranspiration was used to cross-check reported
abstractions. Fields flagged where satellite estimates exceeded licensed
volumes by more than 20 percent cover about 7 percent of the equipped area
and are scheduled for metering visits.

The census recommends pairing remote-sensing checks with stepped tariffs,
and prioritizing canal rehabilitation in the two oldest schemes, where the
payback period on saved water is shortest.""",
    },
    {
        "doc_id": "conservation-areas", "path": "corpus/conservation-areas.md",
        "doc_type": "eflow_assessment", "date": "2023-07-30",
        "tags": ["conservation", "habitat"],
        "body": """# Conservation Areas and Freshwater Habitat

The demonstration basin contains three key conservation clusters: a
transfrontier park spanning the eastern lowveld, a chain of riverine reserves
along the perennial middle reaches, and a high-plateau grassland reserve
protecting headwater seeps.

Freshwater habitat priorities focus on the perennial pools that persist
through the dry season. These pools serve as refugia for fish and large
invertebrates, and their persistence depends directly on compliance with
environmental flow thresholds at the designated sites.

The riverine reserves report improving habitat condition where environmental
releases have been honored for three consecutive years, and declining
condition below two abstraction clusters where warning-level flows recur
each September.

Priority actions are invasive plant clearing along 240 kilometers of bank,
fish passage retrofits at two weirs, and formal recognition of the pool
refugia network in the next allocation guidance cycle.""",
    },
]


# --------------------------------------------------------------------------
# engineered evaluation dataset

_TOPICS = ("reservoir storage", "rainfall totals", "river discharge",
           "flood warnings", "drought indicators", "water allocations",
           "irrigation demand", "groundwater levels", "sediment transport",
           "wetland habitats")

# per-pattern: (answer statements, supported), context relevance flags,
# (ground-truth statements, supported)
_STMT_PATTERN = [(4, 4), (3, 2), (4, 3), (2, 1), (5, 4),
                 (3, 3), (4, 2), (2, 2), (3, 1), (1, 1)]
_FLAG_PATTERN = [[1], [1, 0], [1, 1], [1, 0, 1], [0, 1],
                 [1, 1, 0], [0, 0, 1], [1, 1, 1], [1, 0, 0, 1], []]
_RECALL_PATTERN = [(4, 3), (3, 3), (2, 1), (4, 2), (3, 2),
                   (2, 2), (5, 4), (3, 1), (4, 4), (2, 0)]

_LEVEL_QUESTION = {
    "L1": "What does monitoring record {uid} state about {topic}?",
    "L2": "How does the analysis in record {uid} explain {topic} across the basin?",
    "L3": "Which realtime trends in {topic} does record {uid} establish?",
}


def build_eval_sample(global_idx: int) -> dict:
    level = ("L1", "L2", "L3")[global_idx // 10]
    pattern = global_idx % 10
    uid = f"rec{global_idx:02d}"
    topic = _TOPICS[global_idx % len(_TOPICS)]

    n_stmt, n_sup = _STMT_PATTERN[pattern]
    flags = _FLAG_PATTERN[pattern]
    n_gt, n_gt_sup = _RECALL_PATTERN[pattern]
    if not flags:
        n_sup = 0
        n_gt_sup = 0

    gt_statements = [
        f"Ground fact {uid} number {k} covers seasonal {topic} planning."
        for k in range(1, n_gt + 1)
    ]
    supported = [
        f"Supported finding {uid} part {j} matches seasonal {topic} planning records."
        for j in range(1, n_sup + 1)
    ]
    unsupported = [
        f"Unverified claim {uid} item {j} lacks any recorded basis."
        for j in range(1, n_stmt - n_sup + 1)
    ]

    relevant_slots = [i for i, f in enumerate(flags) if f == 1]
    contexts = []
    for i, flag in enumerate(flags):
        if flag == 1:
            parts = [f"Registry extract for seasonal {topic} planning in {uid}."]
            slot = relevant_slots.index(i)
            parts += [s for k, s in enumerate(gt_statements[:n_gt_sup])
                      if k % len(relevant_slots) == slot]
            parts += [s for k, s in enumerate(supported)
                      if k % len(relevant_slots) == slot]
            contexts.append(" ".join(parts))
        else:
            contexts.append(
                f"Orbital telemetry checksum {uid}x{i} verification module "
                f"alignment notes without hydrological content.")

    return {
        "question": _LEVEL_QUESTION[level].format(uid=uid, topic=topic),
        "contexts": contexts,
        "answer": " ".join(supported + unsupported),
        "ground_truth": " ".join(gt_statements),
        "level": level,
    }


def build_eval_dataset() -> list[dict]:
    return [build_eval_sample(i) for i in range(30)]


# --------------------------------------------------------------------------
# top-level generation

_UI_SCRIPT = [
    {"kind": "tool_calls", "calls": [
        {"call_id": "ui-1", "tool": "monthly_rainfall",
         "arguments": {"station_id": "RF-LUV-01", "year": 2024}}]},
    {"kind": "final_text",
     "text": "Monthly rainfall statistics for Shisakashanghondo in 2024 are tabulated below."},
    {"kind": "tool_calls", "calls": [
        {"call_id": "ui-2", "tool": "chart_spec",
         "arguments": {"tool": "compare_rainfall",
                       "params": {"station_id": "RF-LUV-01", "year_a": 2023, "year_b": 2024},
                       "chart_kind": "grouped_bar"}}]},
    {"kind": "final_text",
     "text": "The grouped bar chart compares monthly rainfall totals for 2023 and 2024."},
    {"kind": "tool_calls", "calls": [
        {"call_id": "ui-3", "tool": "search_documents",
         "arguments": {"query": "countries sharing the basin and its tributaries", "k": 3}}]},
    {"kind": "final_text",
     "text": "The basin is shared by Botswana, Mozambique, South Africa, and Zimbabwe; "
             "see the referenced documents for detail."},
]

_FIXTURE_README = """Synthetic demonstration fixtures
================================

Everything in this directory is generated, synthetic data for a demonstration
river basin: station locations, observation series, thresholds, documents and
evaluation samples. None of it represents real measurements.

Files:
  stations.csv, series.csv, thresholds.csv  hydrology dataset (see hydro_manifest.json)
  corpus/ + corpus_manifest.json            document corpus for indexing
  eval_dataset.jsonl                        engineered evaluation samples (30, 3 levels)
  config.json                               gateway config (offline echo provider)
  config_scripted.json                      gateway config (scripted provider, ui_script.json)
"""


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def generate_fixtures(out_dir: str | Path, seed: int = 42) -> dict:
    """Write the full fixture set into out_dir; returns summary counts."""
    out = Path(out_dir)
    rng = random.Random(seed)

    stations = build_stations(rng)
    thresholds = build_thresholds(rng, stations)
    series = build_series(rng, stations, thresholds)

    station_lines = ["station_id,name,river,country,lat,lon,kind"]
    station_lines += [f"{s['station_id']},{s['name']},{s['river']},{s['country']},"
                      f"{s['lat']},{s['lon']},{s['kind']}" for s in stations]
    _write(out / "stations.csv", "\n".join(station_lines) + "\n")

    series_lines = ["station_id,date,kind,value,unit,quality"]
    series_lines += [f"{r['station_id']},{r['date']},{r['kind']},{r['value']},"
                     f"{r['unit']},{r['quality']}" for r in series]
    _write(out / "series.csv", "\n".join(series_lines) + "\n")

    threshold_lines = ["site_id,warning_level,critical_level"]
    threshold_lines += [f"{site},{levels[0]},{levels[1]}"
                        for site, levels in sorted(thresholds.items())]
    _write(out / "thresholds.csv", "\n".join(threshold_lines) + "\n")

    _write(out / "hydro_manifest.json", json.dumps({
        "dataset_id": f"synthetic-basin-seed{seed}",
        "stations": "stations.csv",
        "series": "series.csv",
        "thresholds": "thresholds.csv",
    }, indent=2) + "\n")

    manifest = []
    for doc in _DOCS:
        _write(out / doc["path"], doc["body"] + "\n")
        manifest.append({"path": doc["path"], "doc_id": doc["doc_id"],
                         "doc_type": doc["doc_type"], "date": doc["date"],
                         "tags": doc["tags"]})
    _write(out / "corpus_manifest.json", json.dumps(manifest, indent=2) + "\n")

    samples = build_eval_dataset()
    _write(out / "eval_dataset.jsonl",
           "\n".join(json.dumps(s, ensure_ascii=False) for s in samples) + "\n")

    _write(out / "ui_script.json", json.dumps(_UI_SCRIPT, indent=2) + "\n")

    base_config = {
        "index_path": "index.bvi",
        "data_manifest": "hydro_manifest.json",
        "sessions_dir": "sessions",
        "max_rounds": 8,
        "search_k": 5,
        "chat_provider": {"kind": "echo"},
        "embedding_provider": {"kind": "hash", "dimension": 256},
        "judge_provider": {"kind": "rules"},
    }
    _write(out / "config.json", json.dumps(base_config, indent=2) + "\n")
    scripted = dict(base_config)
    scripted["chat_provider"] = {"kind": "scripted", "script": "ui_script.json"}
    _write(out / "config_scripted.json", json.dumps(scripted, indent=2) + "\n")

    _write(out / "README.txt", _FIXTURE_README)

    return {
        "stations": len(stations),
        "series_points": len(series),
        "thresholds": len(thresholds),
        "documents": len(manifest),
        "eval_samples": len(samples),
    }
