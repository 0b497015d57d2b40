"""Cross-set curation: extend a target set with other sets' records for the
same molecules, merge values closer than the experimental-accuracy
threshold, and weight records by dataset quality.

The merge combination rule is an interpretation, flagged as such: the
source procedure states that close values "were merged and the weight of
the merged record was updated" without giving the arithmetic. Here a
cluster's value is the quality-weighted mean of its members and its weight
is min(1, sum of member weights) -- monotone in every quality weight,
bounded by 1, and equal to the single-record case when nothing merges.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .dataset import DataTable, MissingKey, SolubilityRecord

logger = logging.getLogger(__name__)

# per-dataset quality weights: high quality AQUA/PHYSP/ESOL at 1.0 and
# OCHEM at 0.85; low quality AQSOL at 0.4 and CHEMBL at 0.8
DEFAULT_QUALITY_WEIGHTS: dict[str, float] = {
    "AQUA": 1.0,
    "PHYSP": 1.0,
    "ESOL": 1.0,
    "OCHEM": 0.85,
    "AQSOL": 0.4,
    "CHEMBL": 0.8,
}


class UnknownSetId(KeyError):
    """A record's set_id has no quality weight."""


@dataclass
class CurationConfig:
    """Merge threshold (log units) and per-set quality weights."""

    d: float = 0.5
    qualities: dict[str, float] = field(
        default_factory=lambda: dict(DEFAULT_QUALITY_WEIGHTS)
    )

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError(f"merge threshold d must be positive, got {self.d}")

    def quality(self, set_id: str) -> float:
        try:
            return self.qualities[set_id]
        except KeyError:
            raise UnknownSetId(set_id) from None


@dataclass(frozen=True)
class CurationSummary:
    records_before: int
    records_after: int
    mean_weight: float
    no_op: bool


def _cluster(members: list[tuple[float, float, SolubilityRecord]], d: float):
    """Greedy left-to-right single-linkage over value-sorted records.

    ``members`` are (value, quality weight, record) sorted by value; a new
    cluster starts when the next value sits at least ``d`` from the current
    cluster's weighted mean.
    """
    clusters: list[list[tuple[float, float, SolubilityRecord]]] = []
    current: list[tuple[float, float, SolubilityRecord]] = []
    wsum = vsum = 0.0
    for value, weight, rec in members:
        if current and abs(value - vsum / wsum) >= d:
            clusters.append(current)
            current, wsum, vsum = [], 0.0, 0.0
        current.append((value, weight, rec))
        wsum += weight
        vsum += weight * value
    clusters.append(current)
    return clusters


def curate_target(
    target: DataTable, others: list[DataTable], cfg: CurationConfig | None = None
) -> DataTable:
    """Build the curated version of ``target``.

    For every molecule of the target, records from target and all other
    tables are gathered and re-weighted by their set's quality; values
    within ``cfg.d`` of a running weighted mean are merged into one record
    (value = weighted mean, weight = min(1, summed weight)); farther values
    stay separate with their set's quality weight. Molecules absent from
    the target are never added. Output is ordered by plain key for
    determinism. Raises :class:`UnknownSetId` for sets without a quality
    weight and :class:`MissingKey` for unkeyed records.
    """
    cfg = cfg or CurationConfig()

    pool: dict[str, list[tuple[float, float, SolubilityRecord]]] = {}
    target_keys: set[str] = set()
    anchor: dict[str, SolubilityRecord] = {}

    for table in [target, *others]:
        for rec in table.records:
            if rec.key is None:
                raise MissingKey(f"record {rec.raw_smiles!r} in {table.name} has no key")
            plain = rec.key.plain_key
            if table is target:
                target_keys.add(plain)
                anchor.setdefault(plain, rec)
            pool.setdefault(plain, []).append(
                (rec.value, cfg.quality(rec.set_id), rec)
            )

    out: list[SolubilityRecord] = []
    for plain in sorted(target_keys):
        members = sorted(pool[plain], key=lambda m: (m[0], m[2].set_id))
        for cluster in _cluster(members, cfg.d):
            wsum = sum(w for _, w, _ in cluster)
            value = sum(w * v for v, w, _ in cluster) / wsum
            sources = ";".join(sorted({rec.set_id for _, _, rec in cluster}))
            base = anchor[plain]
            out.append(SolubilityRecord(
                raw_smiles=base.raw_smiles,
                value=value,
                set_id=target.name,
                weight=min(1.0, wsum),
                key=base.key,
                source_id=sources,
            ))
    return DataTable(name=target.name, records=tuple(out))


def curation_summary(before: DataTable, after: DataTable) -> CurationSummary:
    """Record counts plus the after-table's mean weight.

    ``no_op`` flags byte-equivalent before/after tables; callers should
    surface it, since identical input and output data with a changed score
    is exactly the inconsistency this toolkit exists to catch.
    """
    weights = [r.weight for r in after.records]
    mean_weight = sum(weights) / len(weights) if weights else 0.0
    no_op = before.records == after.records
    if no_op:
        logger.warning("%s: curation was a no-op (output identical to input)", after.name)
    return CurationSummary(
        records_before=len(before.records),
        records_after=len(after.records),
        mean_weight=mean_weight,
        no_op=no_op,
    )
