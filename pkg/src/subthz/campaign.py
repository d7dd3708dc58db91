"""Measurement campaign data model, file I/O, and per-link path-loss series.

A campaign is a set of Tx-Rx links.  Each link carries either a directional
azimuth scan (path gain per Rx pointing, antenna gains and EIRP already
de-embedded) or a pre-extracted list of multipath components (MPCs).  An MPC
is identified as a local maximum of the azimuth power profile within a
configurable dynamic range below the global peak.

Path-loss series come in three flavours per link:
- directional: loss of the single strongest MPC;
- omnidirectional: loss of the power sum of all MPCs (phases are not
  measured, so "combined across all components" means linear power
  summation here);
- k-th strongest (k in {2, 3}): loss of the k-th strongest MPC.

Campaign JSON schema (canonical field order, as written by save_campaign):
    {"meta": {name, environment, site, rf_band_ghz, tx_height_m,
              rx_height_m, eirp_dbm, azimuth_step_deg,
              link_distance_range_m},
     "links": [{id, distance_m, condition,
                "scan": {azimuth_deg: [...], gain_db: [...]}  -- or --
                "mpcs": [{azimuth_deg, gain_db}, ...]}]}

Campaign CSV schema (MPC payloads only, one row per link):
    id, distance_m, condition, az1, g1, az2, g2, az3, g3
Blank cells mark missing MPCs.  Angles in degrees, gains in dB, distances
in meters.  CSV files carry no campaign metadata.
"""

import csv
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ENVIRONMENTS = ("indoor", "outdoor")
CONDITIONS = ("LoS", "NLoS")

# Table-of-record azimuth step sizes; other steps in (0, 30] are accepted
# with a warning.
_KNOWN_AZIMUTH_STEPS = (5.0, 6.0, 10.0)

DEFAULT_MAX_MPCS = 3
DEFAULT_FLOOR_DB = 25.0


class ParseError(ValueError):
    """Raised when a campaign file cannot be parsed at all."""


class ValidationError(ValueError):
    """Raised when a campaign file parses but violates invariants.

    The message lists every violation, one per line, each naming the
    offending record id where applicable.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("\n".join(self.violations))


@dataclass(frozen=True)
class CampaignMeta:
    """Descriptive metadata of one measurement campaign."""

    name: str
    environment: str                          # "indoor" | "outdoor"
    site: str
    rf_band_ghz: tuple[float, float]          # (low, high)
    tx_height_m: float
    rx_height_m: float
    eirp_dbm: float
    azimuth_step_deg: float
    link_distance_range_m: tuple[float, float]


@dataclass(frozen=True)
class DirectionalScan:
    """Azimuth power profile of one link (gain per Rx pointing)."""

    azimuth_deg: tuple[float, ...]
    gain_db: tuple[float, ...]

    def __post_init__(self):
        az = np.asarray(self.azimuth_deg, dtype=float)
        if az.size == 0:
            raise ValueError("scan is empty")
        if len(self.gain_db) != az.size:
            raise ValueError("azimuth_deg and gain_db lengths differ")
        if np.any(az < 0) or np.any(az >= 360):
            raise ValueError("scan azimuths must lie in [0, 360)")
        if az.size > 1 and np.any(np.diff(az) <= 0):
            raise ValueError("scan azimuths must be strictly increasing")

    @property
    def full_circle(self) -> bool:
        """True when the pointing coverage spans at least 355 degrees."""
        return self.azimuth_deg[-1] - self.azimuth_deg[0] >= 355.0


@dataclass(frozen=True)
class Mpc:
    """One multipath component: arrival azimuth and path gain."""

    azimuth_deg: float
    gain_db: float    # path gain, typically <= 0 (not enforced)

    def __post_init__(self):
        if not 0.0 <= self.azimuth_deg < 360.0:
            raise ValueError(f"MPC azimuth must lie in [0, 360), got {self.azimuth_deg}")


@dataclass(frozen=True)
class LinkRecord:
    """One Tx-Rx link: distance, propagation condition, and payload.

    Exactly one of `scan` / `mpcs` is set.  An MPC payload is kept sorted
    by descending path gain.
    """

    id: str
    distance_m: float        # 3-D Tx-Rx separation
    condition: str           # "LoS" | "NLoS"
    scan: DirectionalScan | None = None
    mpcs: tuple[Mpc, ...] | None = None

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ValueError(f"link {self.id}: distance_m must be positive")
        if self.condition not in CONDITIONS:
            raise ValueError(f"link {self.id}: unknown condition {self.condition!r}")
        if (self.scan is None) == (self.mpcs is None):
            raise ValueError(f"link {self.id}: exactly one of scan/mpcs must be set")
        if self.mpcs is not None:
            if len(self.mpcs) == 0:
                raise ValueError(f"link {self.id}: empty MPC list")
            gains = [m.gain_db for m in self.mpcs]
            if any(g_next > g for g, g_next in zip(gains, gains[1:])):
                raise ValueError(
                    f"link {self.id}: MPC list must be sorted by descending gain"
                )


@dataclass(frozen=True)
class Category:
    """Path-loss modeling category.

    Use the DIRECTIONAL / OMNIDIRECTIONAL constants or kth_strongest(k).
    """

    kind: str            # "directional" | "omnidirectional" | "kth_strongest"
    k: int | None = None

    @property
    def label(self) -> str:
        if self.kind == "kth_strongest":
            return {1: "1st", 2: "2nd", 3: "3rd"}.get(self.k, f"{self.k}th") + "_strongest"
        return self.kind


DIRECTIONAL = Category("directional")
OMNIDIRECTIONAL = Category("omnidirectional")


def kth_strongest(k: int) -> Category:
    """Category selecting the k-th strongest MPC; only k in {2, 3} is modeled."""
    if k not in (2, 3):
        raise ValueError(f"k-th strongest category requires k in {{2, 3}}, got {k}")
    return Category("kth_strongest", k)


@dataclass(frozen=True)
class PathLossSeries:
    """Per-link path loss of one category, as (distance_m, pathloss_db) points."""

    category: Category
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        for d, pl in self.points:
            if d <= 0:
                raise ValueError(f"non-positive distance {d} in series")
            if pl <= 0:
                raise ValueError(f"non-positive path loss {pl} dB in series")


# ---------------------------------------------------------------------------
# MPC extraction and per-link synthesis
# ---------------------------------------------------------------------------

def extract_mpcs(scan: DirectionalScan, max_count: int = DEFAULT_MAX_MPCS,
                 floor_db: float = DEFAULT_FLOOR_DB) -> list[Mpc]:
    """Extract up to max_count MPCs from an azimuth scan.

    An MPC is a local maximum of the gain profile: a sample at least as
    large as both neighbours and strictly larger than one of them.
    Neighbours wrap around for full-circle scans and are clamped at the
    scan edges otherwise.  Maxima more than floor_db below the global
    peak are discarded; survivors are returned sorted by descending gain
    (ties broken by azimuth).

    A scan with no local maximum (all samples equal) degenerates to a
    single MPC at the first sample, with a warning.

    Args:
        scan: Directional scan to process.
        max_count: Maximum number of MPCs to return (>= 1).
        floor_db: Dynamic range below the peak (> 0).
    """
    if max_count < 1:
        raise ValueError(f"max_count must be >= 1, got {max_count}")
    if floor_db <= 0:
        raise ValueError(f"floor_db must be positive, got {floor_db}")

    gain = np.asarray(scan.gain_db, dtype=float)
    npts = gain.size
    if npts == 1:
        return [Mpc(scan.azimuth_deg[0], float(gain[0]))]

    if scan.full_circle:
        left = np.roll(gain, 1)
        right = np.roll(gain, -1)
    else:
        # Clamped edges: compare each endpoint against its single inner
        # neighbour by mirroring that neighbour to the missing side.
        left = np.concatenate(([gain[1]], gain[:-1]))
        right = np.concatenate((gain[1:], [gain[-2]]))

    is_peak = (gain >= left) & (gain >= right) & ((gain > left) | (gain > right))
    idx = np.flatnonzero(is_peak)
    if idx.size == 0:
        warnings.warn("scan has no local maximum; returning first sample as sole MPC")
        return [Mpc(scan.azimuth_deg[0], float(gain[0]))]

    peak = float(gain.max())
    idx = idx[gain[idx] >= peak - floor_db]
    order = sorted(idx, key=lambda i: (-gain[i], scan.azimuth_deg[i]))
    return [Mpc(scan.azimuth_deg[i], float(gain[i])) for i in order[:max_count]]


def synthesize_omnidirectional(mpcs) -> float:
    """Omnidirectional path loss in dB from the power sum of MPC gains.

    Never exceeds the path loss of the strongest MPC.
    """
    if not mpcs:
        raise ValueError("cannot synthesize omnidirectional loss from zero MPCs")
    gains = np.asarray([m.gain_db for m in mpcs], dtype=float)
    return float(-10.0 * np.log10(np.sum(10.0 ** (gains / 10.0))))


def link_mpcs(link: LinkRecord, max_count: int = DEFAULT_MAX_MPCS,
              floor_db: float = DEFAULT_FLOOR_DB) -> list[Mpc]:
    """Resolve a link to its MPC list (extracting from the scan if needed)."""
    if link.mpcs is not None:
        return list(link.mpcs[:max_count])
    return extract_mpcs(link.scan, max_count=max_count, floor_db=floor_db)


def pathloss_series(links, category: Category, max_count: int = DEFAULT_MAX_MPCS,
                    floor_db: float = DEFAULT_FLOOR_DB) -> PathLossSeries:
    """Per-link path-loss points for one modeling category.

    Links that cannot supply enough MPCs for a k-th strongest category are
    skipped (a warning lists their ids); zero-padding would bias the fit.
    Points are ordered by link id, so the result is independent of the
    input ordering.

    Raises:
        ValueError: unknown category or an empty output series.
    """
    if category.kind == "kth_strongest" and category.k not in (1, 2, 3):
        raise ValueError("k-th strongest category requires k in {2, 3}")
    if category.kind not in ("directional", "omnidirectional", "kth_strongest"):
        raise ValueError(f"unknown category kind {category.kind!r}")

    points = []
    skipped = []
    for link in sorted(links, key=lambda li: li.id):
        mpcs = link_mpcs(link, max_count=max_count, floor_db=floor_db)
        if category.kind == "omnidirectional":
            pl = synthesize_omnidirectional(mpcs)
        else:
            k = 1 if category.kind == "directional" else category.k
            if len(mpcs) < k:
                skipped.append(link.id)
                continue
            pl = -mpcs[k - 1].gain_db
        points.append((link.distance_m, pl))

    if skipped:
        warnings.warn(
            f"skipped {len(skipped)} link(s) lacking {category.k} MPCs: "
            + ", ".join(skipped)
        )
    if not points:
        raise ValueError(f"no links produced a {category.label} path-loss point")
    return PathLossSeries(category=category, points=tuple(points))


# ---------------------------------------------------------------------------
# Campaign file I/O
# ---------------------------------------------------------------------------

def _violations_meta(meta: dict) -> list[str]:
    """Collect invariant violations of a raw meta mapping."""
    out = []
    required = ("name", "environment", "site", "rf_band_ghz", "tx_height_m",
                "rx_height_m", "eirp_dbm", "azimuth_step_deg",
                "link_distance_range_m")
    missing = [key for key in required if key not in meta]
    if missing:
        return [f"meta: missing field(s) {', '.join(missing)}"]

    if meta["environment"] not in ENVIRONMENTS:
        out.append(f"meta: environment must be one of {ENVIRONMENTS}")
    band = meta["rf_band_ghz"]
    if not (len(band) == 2 and band[0] < band[1]):
        out.append("meta: rf_band_ghz must be an increasing (low, high) pair")
    elif not (100.0 <= band[0] and band[1] <= 350.0):
        out.append("meta: rf_band_ghz outside the supported 100-350 GHz range")
    step = meta["azimuth_step_deg"]
    if not 0.0 < step <= 30.0:
        out.append(f"meta: azimuth_step_deg {step} outside (0, 30]")
    elif step not in _KNOWN_AZIMUTH_STEPS:
        warnings.warn(
            f"azimuth_step_deg {step} is unusual (expected one of "
            f"{_KNOWN_AZIMUTH_STEPS}); accepting"
        )
    drange = meta["link_distance_range_m"]
    if not (len(drange) == 2 and drange[0] <= drange[1]):
        out.append("meta: link_distance_range_m must be a (low, high) pair")
    elif drange[0] < 1.0:
        out.append("meta: link distances below 1 m are inside the reference distance")
    return out


def _violations_link(link: LinkRecord, meta: CampaignMeta | None) -> list[str]:
    """Collect meta-dependent invariant violations of one parsed link."""
    if meta is None:
        return []
    out = []
    low, high = meta.link_distance_range_m
    if not low <= link.distance_m <= high:
        out.append(
            f"link {link.id}: distance {link.distance_m} m outside campaign "
            f"range [{low}, {high}] m"
        )
    if link.scan is not None and len(link.scan.azimuth_deg) > 1:
        spacing = np.diff(link.scan.azimuth_deg)
        if np.any(np.abs(spacing - meta.azimuth_step_deg) > 1e-6):
            out.append(
                f"link {link.id}: scan spacing differs from campaign azimuth "
                f"step {meta.azimuth_step_deg} deg"
            )
    return out


def _parse_condition(raw: str):
    for cond in CONDITIONS:
        if str(raw).lower() == cond.lower():
            return cond
    return None


def _link_from_json(obj: dict) -> LinkRecord:
    cond = _parse_condition(obj.get("condition", ""))
    if cond is None:
        raise ValueError(f"unknown condition {obj.get('condition')!r}")
    scan = None
    mpcs = None
    if "scan" in obj and "mpcs" in obj:
        raise ValueError("both scan and mpcs present")
    if "scan" in obj:
        scan = DirectionalScan(
            azimuth_deg=tuple(float(a) for a in obj["scan"]["azimuth_deg"]),
            gain_db=tuple(float(g) for g in obj["scan"]["gain_db"]),
        )
    elif "mpcs" in obj:
        mpcs = tuple(
            Mpc(float(m["azimuth_deg"]), float(m["gain_db"])) for m in obj["mpcs"]
        )
    else:
        raise ValueError("neither scan nor mpcs present")
    return LinkRecord(
        id=str(obj["id"]),
        distance_m=float(obj["distance_m"]),
        condition=cond,
        scan=scan,
        mpcs=mpcs,
    )


def _load_json(path: Path) -> tuple[CampaignMeta | None, list[LinkRecord]]:
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "links" not in doc:
        raise ParseError(f"{path}: expected an object with 'meta' and 'links'")

    violations = []
    meta = None
    if "meta" in doc:
        raw_meta = doc["meta"]
        violations += _violations_meta(raw_meta)
        if not violations:
            meta = CampaignMeta(
                name=str(raw_meta["name"]),
                environment=raw_meta["environment"],
                site=str(raw_meta["site"]),
                rf_band_ghz=(float(raw_meta["rf_band_ghz"][0]),
                             float(raw_meta["rf_band_ghz"][1])),
                tx_height_m=float(raw_meta["tx_height_m"]),
                rx_height_m=float(raw_meta["rx_height_m"]),
                eirp_dbm=float(raw_meta["eirp_dbm"]),
                azimuth_step_deg=float(raw_meta["azimuth_step_deg"]),
                link_distance_range_m=(float(raw_meta["link_distance_range_m"][0]),
                                       float(raw_meta["link_distance_range_m"][1])),
            )

    links = []
    for i, obj in enumerate(doc["links"]):
        rid = obj.get("id", f"#{i}")
        try:
            link = _link_from_json(obj)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"{path}: link {rid}: malformed record ({exc})") from exc
        except ValueError as exc:
            violations.append(f"link {rid}: {exc}")
            continue
        violations += _violations_link(link, meta)
        links.append(link)

    if violations:
        raise ValidationError(violations)
    return meta, links


_CSV_COLUMNS = ("id", "distance_m", "condition",
                "az1", "g1", "az2", "g2", "az3", "g3")


def _load_csv(path: Path) -> tuple[None, list[LinkRecord]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != _CSV_COLUMNS:
            raise ParseError(
                f"{path}: expected CSV header {','.join(_CSV_COLUMNS)}"
            )
        rows = list(reader)

    violations = []
    links = []
    for i, row in enumerate(rows):
        rid = row.get("id") or f"#{i}"
        try:
            mpcs = []
            for az_col, g_col in (("az1", "g1"), ("az2", "g2"), ("az3", "g3")):
                az_raw = (row[az_col] or "").strip()
                g_raw = (row[g_col] or "").strip()
                if not az_raw and not g_raw:
                    continue
                if not az_raw or not g_raw:
                    raise ValueError(f"half-empty MPC cell pair {az_col}/{g_col}")
                mpcs.append(Mpc(float(az_raw), float(g_raw)))
            cond = _parse_condition(row["condition"])
            if cond is None:
                raise ValueError(f"unknown condition {row['condition']!r}")
            link = LinkRecord(
                id=rid,
                distance_m=float(row["distance_m"]),
                condition=cond,
                mpcs=tuple(mpcs),
            )
        except ValueError as exc:
            violations.append(f"link {rid}: {exc}")
            continue
        links.append(link)

    if violations:
        raise ValidationError(violations)
    return None, links


def load_campaign(path, format: str | None = None):
    """Load and validate a campaign file.

    Args:
        path: Campaign file path.
        format: "json" or "csv"; inferred from the suffix when omitted.

    Returns:
        (meta, links) tuple.  CSV files carry no metadata, so meta is None
        for them; meta-dependent invariants are then skipped.

    Raises:
        ParseError: the file is malformed beyond record-level repair.
        ValidationError: one or more invariant violations (all listed).
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"{path}: no such file")
    fmt = format or path.suffix.lstrip(".").lower()
    if fmt == "json":
        return _load_json(path)
    if fmt == "csv":
        return _load_csv(path)
    raise ParseError(f"{path}: unsupported campaign format {fmt!r}")


def campaign_to_json(meta: CampaignMeta | None, links) -> str:
    """Serialize a campaign to the canonical JSON form (stable byte-wise)."""
    doc = {}
    if meta is not None:
        doc["meta"] = {
            "name": meta.name,
            "environment": meta.environment,
            "site": meta.site,
            "rf_band_ghz": list(meta.rf_band_ghz),
            "tx_height_m": meta.tx_height_m,
            "rx_height_m": meta.rx_height_m,
            "eirp_dbm": meta.eirp_dbm,
            "azimuth_step_deg": meta.azimuth_step_deg,
            "link_distance_range_m": list(meta.link_distance_range_m),
        }
    doc["links"] = []
    for link in links:
        obj = {
            "id": link.id,
            "distance_m": link.distance_m,
            "condition": link.condition,
        }
        if link.scan is not None:
            obj["scan"] = {
                "azimuth_deg": list(link.scan.azimuth_deg),
                "gain_db": list(link.scan.gain_db),
            }
        else:
            obj["mpcs"] = [
                {"azimuth_deg": m.azimuth_deg, "gain_db": m.gain_db}
                for m in link.mpcs
            ]
        doc["links"].append(obj)
    return json.dumps(doc, indent=2) + "\n"


def save_campaign(meta: CampaignMeta | None, links, path) -> None:
    """Write a campaign to `path` in the canonical JSON form."""
    Path(path).write_text(campaign_to_json(meta, links))
