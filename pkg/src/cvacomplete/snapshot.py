"""Market snapshot ingestion and CSV table IO.

A snapshot directory holds::

    meta.json      label, valuation_date, recovery, roll_tenor, ...
    discount.csv   time_years,zero_rate          overnight curve
    tenor.csv      time_years,zero_rate          tenor (e.g. 6M) curve
    cds.csv        maturity_years,spread_bps
    vols.csv       expiry_years,tenor_years,strike_offset_bps,vol
    scarcity.csv   time_years,scarcity_bps       optional forward scarcity
    fixings.csv    tenor_years,deposit_rate,overnight_rate   optional
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from datetime import date
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .credit import CdsQuoteSet, CreditCurve, bootstrap_hazard
from .curves import CurveSet, DiscountCurve, build_discount_curve
from .errors import InputError, ParseError
from .funding import SpreadCurve
from .volatility import VolCube

DEFAULT_RECOVERY = 0.40
DEFAULT_ROLL_TENOR = 0.5
DEFAULT_PREMIUM_FREQUENCY = 4

CURVE_COLUMNS = ("time_years", "zero_rate")
CDS_COLUMNS = ("maturity_years", "spread_bps")
VOL_COLUMNS = ("expiry_years", "tenor_years", "strike_offset_bps", "vol")
SCARCITY_COLUMNS = ("time_years", "scarcity_bps")
FIXING_COLUMNS = ("tenor_years", "deposit_rate", "overnight_rate")

MANDATORY = ("meta.json", "discount.csv", "tenor.csv", "cds.csv", "vols.csv")


def read_table(path, columns: Sequence[str], text_columns: Sequence[str] = ()) -> list[dict]:
    """Read a headed, comma-separated UTF-8 table.

    Every column in ``columns`` must be present and no others; values are
    parsed as floats unless listed in ``text_columns``.  Errors name the
    file, line and column.
    """
    path = Path(path)
    try:
        handle = path.open(newline="", encoding="utf-8")
    except FileNotFoundError:
        raise ParseError(path, "file not found") from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, "empty file; a header row is required", line=1) from None
        except (csv.Error, UnicodeDecodeError) as exc:
            raise ParseError(path, str(exc), line=1) from None
        header = [h.strip() for h in header]
        missing = [c for c in columns if c not in header]
        extra = [h for h in header if h not in columns]
        if missing or extra or len(set(header)) != len(header):
            raise ParseError(path, f"header must be {','.join(columns)}; got {','.join(header)}", line=1)
        rows = []
        try:
            for record in reader:
                line = reader.line_num
                if not record or all(not cell.strip() for cell in record):
                    continue
                if len(record) != len(header):
                    raise ParseError(path, f"expected {len(header)} fields, found {len(record)}", line=line)
                row = {}
                for name, cell in zip(header, record):
                    cell = cell.strip()
                    if name in text_columns:
                        row[name] = cell
                        continue
                    try:
                        value = float(cell)
                    except ValueError:
                        raise ParseError(path, f"not a number: {cell!r}", line=line, column=name) from None
                    if not math.isfinite(value):
                        raise ParseError(path, f"non-finite value {cell!r}", line=line, column=name)
                    row[name] = value
                rows.append(row)
        except (csv.Error, UnicodeDecodeError) as exc:
            raise ParseError(path, str(exc), line=reader.line_num) from None
    if not rows:
        raise ParseError(path, "no data rows")
    return rows


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def dump_json(data, path=None) -> str:
    text = json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text


def _wrap(path: Path, build):
    """Run a constructor, re-raising its invariant violations against ``path``."""
    try:
        return build()
    except ParseError:
        raise
    except InputError as exc:
        raise ParseError(path, f"invalid data: {exc}") from None


def load_curve(path, curve_id: Optional[str] = None, valuation_date: Optional[date] = None) -> DiscountCurve:
    path = Path(path)
    rows = read_table(path, CURVE_COLUMNS)
    pillars = [(r["time_years"], r["zero_rate"]) for r in rows]
    return _wrap(path, lambda: build_discount_curve(pillars, curve_id or path.stem, valuation_date))


def load_cds(path, recovery: float = DEFAULT_RECOVERY, frequency: int = DEFAULT_PREMIUM_FREQUENCY) -> CdsQuoteSet:
    path = Path(path)
    rows = read_table(path, CDS_COLUMNS)
    return _wrap(path, lambda: CdsQuoteSet.from_bps(
        [(r["maturity_years"], r["spread_bps"]) for r in rows], recovery, frequency))


def load_vols(path) -> VolCube:
    path = Path(path)
    rows = read_table(path, VOL_COLUMNS)
    return _wrap(path, lambda: VolCube.from_points(
        [(r["expiry_years"], r["tenor_years"], r["strike_offset_bps"] * 1e-4, r["vol"]) for r in rows]))


def load_scarcity(path) -> SpreadCurve:
    path = Path(path)
    rows = read_table(path, SCARCITY_COLUMNS)
    return _wrap(path, lambda: SpreadCurve([r["time_years"] for r in rows],
                                           [r["scarcity_bps"] * 1e-4 for r in rows]))


def load_fixings(path) -> list[tuple[float, float, float]]:
    rows = read_table(path, FIXING_COLUMNS)
    return [(r["tenor_years"], r["deposit_rate"], r["overnight_rate"]) for r in rows]


@dataclass
class MarketSnapshot:
    label: str
    discount_curve: DiscountCurve
    tenor_curve: DiscountCurve
    cds: CdsQuoteSet
    cube: VolCube
    roll_tenor: float = DEFAULT_ROLL_TENOR
    valuation_date: Optional[date] = None
    scarcity: Optional[SpreadCurve] = None
    fixings: Optional[list] = None
    funding_constant: Optional[float] = None
    settings: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.label or not self.label.strip():
            raise InputError("snapshot label must be non-empty")

    @property
    def curves(self) -> CurveSet:
        return CurveSet(self.discount_curve, self.tenor_curve)

    @cached_property
    def credit(self) -> CreditCurve:
        return bootstrap_hazard(self.cds, self.discount_curve)


def _read_meta(path: Path) -> dict:
    try:
        meta = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(path, f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(meta, dict):
        raise ParseError(path, "top level must be an object")
    label = meta.get("label")
    if not isinstance(label, str) or not label.strip():
        raise ParseError(path, "invariant violated: label must be a non-empty string", column="label")
    for key in ("recovery", "roll_tenor", "premium_frequency", "funding_constant_bps"):
        if key in meta and not isinstance(meta[key], (int, float)):
            raise ParseError(path, f"{key} must be a number", column=key)
    return meta


def bundled_snapshot(label: str) -> Path:
    return Path(str(resources.files("cvacomplete") / "data" / "snapshots" / label))


def resolve_snapshot(ref) -> Path:
    """A directory path, or the label of a bundled snapshot."""
    path = Path(ref)
    if path.is_dir():
        return path
    bundled = bundled_snapshot(str(ref))
    if bundled.is_dir():
        return bundled
    return path


def load_snapshot(directory, recovery: Optional[float] = None, roll_tenor: Optional[float] = None) -> MarketSnapshot:
    """Load and validate a snapshot; explicit arguments override meta.json."""
    directory = resolve_snapshot(directory)
    if not directory.is_dir():
        raise ParseError(directory, "snapshot directory not found")
    for name in MANDATORY:
        if not (directory / name).is_file():
            raise ParseError(directory / name, f"missing mandatory snapshot file {name}")
    meta = _read_meta(directory / "meta.json")

    settings = {}

    def pick(key, override, default):
        if override is not None:
            settings[key] = (override, "flag")
            return override
        if key in meta:
            settings[key] = (meta[key], "meta.json")
            return meta[key]
        settings[key] = (default, "default")
        return default

    rec = float(pick("recovery", recovery, DEFAULT_RECOVERY))
    tau = float(pick("roll_tenor", roll_tenor, DEFAULT_ROLL_TENOR))
    freq = pick("premium_frequency", None, DEFAULT_PREMIUM_FREQUENCY)
    if not 0.0 <= rec < 1.0:
        raise InputError(f"recovery must lie in [0, 1), got {rec}")
    if not tau > 0.0:
        raise InputError(f"roll tenor must be positive, got {tau}")
    if int(freq) != freq or freq < 1:
        raise ParseError(directory / "meta.json", "premium_frequency must be a positive integer",
                         column="premium_frequency")
    freq = int(freq)
    valuation = None
    if "valuation_date" in meta:
        try:
            valuation = date.fromisoformat(meta["valuation_date"])
        except (TypeError, ValueError):
            raise ParseError(directory / "meta.json", "valuation_date must be YYYY-MM-DD",
                             column="valuation_date") from None

    optional = {}
    if (directory / "scarcity.csv").is_file():
        optional["scarcity"] = load_scarcity(directory / "scarcity.csv")
    if (directory / "fixings.csv").is_file():
        optional["fixings"] = load_fixings(directory / "fixings.csv")
    funding_constant = meta.get("funding_constant_bps")

    return MarketSnapshot(
        label=meta["label"],
        discount_curve=load_curve(directory / "discount.csv", "overnight", valuation),
        tenor_curve=load_curve(directory / "tenor.csv", "tenor", valuation),
        cds=load_cds(directory / "cds.csv", rec, freq),
        cube=load_vols(directory / "vols.csv"),
        roll_tenor=tau,
        valuation_date=valuation,
        funding_constant=None if funding_constant is None else funding_constant * 1e-4,
        settings=settings,
        **optional,
    )
