"""Clean-set construction: standardize, filter, deduplicate, weight.

The pipeline per record is parse -> desalt -> (neutralize) -> organic
filter -> canonical key -> drop repeats of an already-seen record key
(first occurrence wins, in ingestion order). Intra-set weighting then makes
every molecule's records sum to weight 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from .dataset import DataTable, MissingKey, SolubilityRecord
from .standardize import record_key, standardize_smiles

logger = logging.getLogger(__name__)


@dataclass
class CleanReport:
    """Counts for one cleaning run, one row in the Table-1-style summary.

    ``rejections`` is the audit trail behind the counts: one
    (row index, smiles, reason) triple per removed record.
    """

    dataset: str = ""
    input_records: int = 0
    parse_failures: int = 0
    metals_removed: int = 0
    single_atom_removed: int = 0
    duplicates_removed: int = 0
    output_records: int = 0
    unique_molecules_stereo: int = 0
    unique_molecules_plain: int = 0
    rejections: list[tuple[int, str, str]] = field(default_factory=list, repr=False)

    CSV_HEADER = (
        "dataset", "input_records", "parse_failures", "metals_removed",
        "single_atom_removed", "duplicates_removed", "output_records",
        "unique_molecules_stereo", "unique_molecules_plain",
    )

    def csv_row(self) -> list:
        return [getattr(self, name) for name in self.CSV_HEADER]

    def as_text(self) -> str:
        lines = [f"clean report for {self.dataset}:"]
        for name in self.CSV_HEADER[1:]:
            lines.append(f"  {name.replace('_', ' ')}: {getattr(self, name)}")
        return "\n".join(lines)


def clean_set(t: DataTable, *, neutralize: bool = True) -> tuple[DataTable, CleanReport]:
    """Standardize and deduplicate one table.

    Failures are counted and recorded, never raised: a record is kept only
    if it parses, survives the organic filter, and its record key (plain key
    plus value rounded to 0.01) has not been seen before. Records that have
    values differing by at least 0.01 log units for the same molecule are
    all kept.
    """
    report = CleanReport(dataset=t.name, input_records=len(t.records))
    seen: set[str] = set()
    kept: list[SolubilityRecord] = []

    for idx, rec in enumerate(t.records, start=1):
        graph, key, std = standardize_smiles(rec.raw_smiles, neutralize_charges=neutralize)
        if std.rejected_reason == "parse-error":
            report.parse_failures += 1
            report.rejections.append((idx, rec.raw_smiles, "parse-error"))
            continue
        if std.rejected_reason == "metal":
            report.metals_removed += 1
            report.rejections.append((idx, rec.raw_smiles, "metal"))
            continue
        if std.rejected_reason == "single-heavy-atom":
            report.single_atom_removed += 1
            report.rejections.append((idx, rec.raw_smiles, "single-heavy-atom"))
            continue
        rk = record_key(key, rec.value)
        if rk in seen:
            report.duplicates_removed += 1
            report.rejections.append((idx, rec.raw_smiles, "duplicate"))
            continue
        seen.add(rk)
        kept.append(replace(rec, key=key))

    report.output_records = len(kept)
    report.unique_molecules_stereo = len({r.key.stereo_key for r in kept})
    report.unique_molecules_plain = len({r.key.plain_key for r in kept})
    logger.info(
        "%s: %d in -> %d out (%d parse failures, %d metal, %d single-atom, %d duplicates)",
        t.name, report.input_records, report.output_records, report.parse_failures,
        report.metals_removed, report.single_atom_removed, report.duplicates_removed,
    )
    return DataTable(name=t.name, records=tuple(kept)), report


def assign_intra_weights(t: DataTable) -> DataTable:
    """Weight each record 1/(records of its molecule), so every molecule
    carries total weight 1. Requires structure keys on every record."""
    counts: dict[str, int] = {}
    for r in t.records:
        if r.key is None:
            raise MissingKey(f"record {r.raw_smiles!r} has no structure key")
        counts[r.key.plain_key] = counts.get(r.key.plain_key, 0) + 1
    weighted = tuple(
        replace(r, weight=1.0 / counts[r.key.plain_key]) for r in t.records
    )
    return DataTable(name=t.name, records=weighted)
