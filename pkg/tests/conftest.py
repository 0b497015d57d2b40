from __future__ import annotations

import csv
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import CORPUS  # noqa: E402

from solcurate.dataset import DataTable, SolubilityRecord  # noqa: E402
from solcurate.molparse import parse_smiles  # noqa: E402


@pytest.fixture(scope="session")
def corpus_smiles() -> list[str]:
    return list(CORPUS)


@pytest.fixture(scope="session")
def corpus_graphs():
    return [parse_smiles(s) for s in CORPUS]


@pytest.fixture
def write_csv(tmp_path):
    """Write rows to a temp CSV and return its path."""

    def _write(name: str, header: list[str], rows: list[list]) -> Path:
        path = tmp_path / name
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        return path

    return _write


def make_table(entries, name="test") -> DataTable:
    """Entries are (smiles, value) or (smiles, value, set_id) tuples."""
    records = []
    for entry in entries:
        smiles, value = entry[0], entry[1]
        set_id = entry[2] if len(entry) > 2 else name
        records.append(SolubilityRecord(raw_smiles=smiles, value=value, set_id=set_id))
    return DataTable(name=name, records=tuple(records))
