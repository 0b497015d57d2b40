"""Tabular solubility records: CSV ingestion, protocol filtering, emission.

Every input row either becomes a record or is written to a rejection
sidecar with its row number and reason; nothing is silently dropped.
Values are log10 mol/L throughout; no unit conversion happens here.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

from .standardize import StructureKey

logger = logging.getLogger(__name__)


class DatasetError(ValueError):
    pass


class MissingColumn(DatasetError):
    pass


class EmptyFile(DatasetError):
    pass


class UnreadableRow(DatasetError):
    def __init__(self, row_index: int, cause: str):
        super().__init__(f"row {row_index}: {cause}")
        self.row_index = row_index


class IoFailure(DatasetError):
    pass


class MissingKey(DatasetError):
    """Record lacks a structure key required by this stage."""


@dataclass(frozen=True)
class SolubilityRecord:
    """One measurement: structure, log10 solubility, weight, provenance."""

    raw_smiles: str
    value: float
    set_id: str
    weight: float = 1.0
    key: StructureKey | None = None
    source_id: str | None = None
    temperature_c: float | None = None
    ph: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"value must be finite, got {self.value!r}")
        if not (0.0 < self.weight <= 1.0):
            raise ValueError(f"weight must be in (0, 1], got {self.weight!r}")
        if not self.set_id:
            raise ValueError("set_id must be non-empty")


@dataclass(frozen=True)
class DataTable:
    """Ordered, immutable record collection; ingestion order is preserved."""

    name: str
    records: tuple[SolubilityRecord, ...]

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class ColumnMap:
    """Names of the CSV columns to read; smiles and value are required,
    the rest are used only when present in the header."""

    smiles: str = "smiles"
    value: str = "log_s"
    weight: str = "weight"
    set_id: str = "set_id"
    source_id: str = "source_id"
    temperature: str = "temperature_c"
    ph: str = "ph"
    plain_key: str = "plain_key"
    stereo_key: str = "stereo_key"


# emitted column order; also the default ingest mapping, so
# ingest(emit(t)) round-trips with no configuration
_COLUMNS = (
    "smiles", "log_s", "weight", "set_id", "source_id",
    "temperature_c", "ph", "plain_key", "stereo_key",
)


def _parse_optional_float(text: str | None, what: str) -> tuple[float | None, str | None]:
    if text is None or text.strip() == "":
        return None, None
    try:
        v = float(text)
    except ValueError:
        return None, f"unparseable {what}"
    if not math.isfinite(v):
        return None, f"non-finite {what}"
    return v, None


def ingest_csv(
    path: str | Path,
    mapping: ColumnMap | None = None,
    *,
    name: str | None = None,
    rejected_path: str | Path | None = None,
) -> DataTable:
    """Read a solubility CSV into a :class:`DataTable`.

    Rows with a missing/non-finite value, empty SMILES, or out-of-range
    weight are logged to ``<stem>.rejected.csv`` next to the input (or to
    ``rejected_path``) and counted; the sidecar is only written when at
    least one row was rejected. Raises :class:`MissingColumn`,
    :class:`EmptyFile`, or :class:`UnreadableRow`.
    """
    path = Path(path)
    mapping = mapping or ColumnMap()
    table_name = name if name is not None else path.stem

    records: list[SolubilityRecord] = []
    rejections: list[tuple[int, str, str, str]] = []  # row, reason, smiles, value

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyFile(f"{path} has no header row")
        header = set(reader.fieldnames)
        for required in (mapping.smiles, mapping.value):
            if required not in header:
                raise MissingColumn(f"{path} lacks required column {required!r}")

        row_index = 0
        while True:
            try:
                row = next(reader)
            except StopIteration:
                break
            except csv.Error as exc:
                raise UnreadableRow(row_index + 1, str(exc)) from exc
            row_index += 1

            smiles = (row.get(mapping.smiles) or "").strip()
            value_text = (row.get(mapping.value) or "").strip()

            def reject(reason: str) -> None:
                rejections.append((row_index, reason, smiles, value_text))

            if not smiles:
                reject("empty SMILES")
                continue
            if not value_text:
                reject("missing value")
                continue
            try:
                value = float(value_text)
            except ValueError:
                reject("unparseable value")
                continue
            if not math.isfinite(value):
                reject("non-finite value")
                continue

            weight = 1.0
            if mapping.weight in header:
                w, err = _parse_optional_float(row.get(mapping.weight), "weight")
                if err:
                    reject(err)
                    continue
                if w is not None:
                    if not (0.0 < w <= 1.0):
                        reject("weight out of range")
                        continue
                    weight = w

            temperature, err = (
                _parse_optional_float(row.get(mapping.temperature), "temperature")
                if mapping.temperature in header else (None, None)
            )
            if err:
                reject(err)
                continue
            ph, err = (
                _parse_optional_float(row.get(mapping.ph), "pH")
                if mapping.ph in header else (None, None)
            )
            if err:
                reject(err)
                continue

            set_id = table_name
            if mapping.set_id in header and (row.get(mapping.set_id) or "").strip():
                set_id = row[mapping.set_id].strip()
            source = None
            if mapping.source_id in header and (row.get(mapping.source_id) or "") != "":
                source = row[mapping.source_id]

            key = None
            if (mapping.plain_key in header and mapping.stereo_key in header
                    and (row.get(mapping.plain_key) or "").strip()):
                key = StructureKey(
                    stereo_key=(row.get(mapping.stereo_key) or "").strip(),
                    plain_key=row[mapping.plain_key].strip(),
                )

            records.append(SolubilityRecord(
                raw_smiles=smiles, value=value, set_id=set_id, weight=weight,
                key=key, source_id=source, temperature_c=temperature, ph=ph,
            ))

    logger.info("%s: ingested %d records, rejected %d rows", path, len(records), len(rejections))
    if rejections:
        sidecar = Path(rejected_path) if rejected_path is not None else path.with_suffix(".rejected.csv")
        with sidecar.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "reason", "smiles", "value"])
            writer.writerows(rejections)
        logger.info("%s: wrote %d rejections to %s", path, len(rejections), sidecar)

    return DataTable(name=table_name, records=tuple(records))


def protocol_filter(t: DataTable) -> DataTable:
    """Drop records measured outside 25 +- 5 C or pH 7 +- 1.

    Records without the metadata pass through untouched.
    """
    kept = tuple(
        r for r in t.records
        if (r.temperature_c is None or 20.0 <= r.temperature_c <= 30.0)
        and (r.ph is None or 6.0 <= r.ph <= 8.0)
    )
    return DataTable(name=t.name, records=kept)


def _format_float(v: float | None) -> str:
    return "" if v is None else repr(v)


def emit_csv(t: DataTable, path: str | Path) -> None:
    """Write a table losslessly: repr-exact floats, RFC-4180 quoting,
    fixed column order. ``ingest_csv`` on the output reproduces the table
    field-by-field."""
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(_COLUMNS)
            for r in t.records:
                writer.writerow([
                    r.raw_smiles,
                    repr(r.value),
                    repr(r.weight),
                    r.set_id,
                    "" if r.source_id is None else r.source_id,
                    _format_float(r.temperature_c),
                    _format_float(r.ph),
                    "" if r.key is None else r.key.plain_key,
                    "" if r.key is None else r.key.stereo_key,
                ])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
