"""File formats: CSV quote tables, JSON models and reports.

CSV inputs are header-addressed so column order never matters; readers
raise WrongSpec naming the missing column otherwise.  Models serialize
to JSON dictionaries tagged with a ``type`` field and round-trip
through ``load_model``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .cosh import CoshLiborModel
from .errors import WrongSpec
from .inflation import InflationModel, MarketSnapshot

__all__ = [
    "read_curve",
    "read_caplet_vols",
    "read_zciis",
    "read_inflation_options",
    "read_snapshot",
    "save_model",
    "load_model",
    "save_json",
    "load_json",
    "write_rows",
]


def _read_table(path, columns: tuple[str, ...], what: str) -> list[tuple]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or ()
        missing = [c for c in columns if c not in header]
        if missing:
            raise WrongSpec(f"{what} file {path} lacks columns {missing}")
        rows = []
        for line in reader:
            rows.append(tuple(line[c] for c in columns))
    return rows


def read_curve(path) -> tuple[tuple[float, float], ...]:
    """maturity_years,discount_factor rows for MarketSnapshot.curve."""
    rows = _read_table(path, ("maturity_years", "discount_factor"), "curve")
    return tuple((float(t), float(d)) for t, d in rows)


def read_caplet_vols(path) -> tuple[tuple[float, float, float], ...]:
    """expiry_years,strike,vol rows for MarketSnapshot.caplet_vols."""
    rows = _read_table(path, ("expiry_years", "strike", "vol"), "caplet vol")
    return tuple((float(e), float(k), float(v)) for e, k, v in rows)


def read_zciis(path) -> tuple[tuple[float, float], ...]:
    """maturity_years,rate rows for MarketSnapshot.zciis."""
    rows = _read_table(path, ("maturity_years", "rate"), "ZCIIS")
    return tuple((float(m), float(r)) for m, r in rows)


def read_inflation_options(path) -> tuple[tuple[float, float, str, float], ...]:
    """maturity_years,strike,kind,price_bps rows (kind cap|floor)."""
    rows = _read_table(
        path, ("maturity_years", "strike", "kind", "price_bps"), "inflation option"
    )
    return tuple((float(m), float(k), s.strip(), float(p)) for m, k, s, p in rows)


def read_snapshot(
    curve_path,
    zciis_path=None,
    caplet_vols_path=None,
    inflation_options_path=None,
) -> MarketSnapshot:
    """Assemble a snapshot from whichever quote files are present."""
    return MarketSnapshot(
        curve=read_curve(curve_path),
        zciis=read_zciis(zciis_path) if zciis_path else (),
        caplet_vols=read_caplet_vols(caplet_vols_path) if caplet_vols_path else (),
        infl_options=(
            read_inflation_options(inflation_options_path)
            if inflation_options_path
            else ()
        ),
    )


def save_json(payload: dict, path) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def save_model(model, path) -> None:
    save_json(model.to_dict(), path)


def load_model(path):
    """Rebuild a saved model, dispatching on the ``type`` tag."""
    data = load_json(path)
    kind = data.get("type")
    if kind == "cosh_libor":
        return CoshLiborModel.from_dict(data)
    if kind == "inflation_market":
        return InflationModel.from_dict(data)
    raise WrongSpec(f"unknown model type {kind!r} in {path}")


def write_rows(path, header: tuple[str, ...], rows) -> None:
    """CSV writer for result tables (prices, vol surfaces, bounds)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
