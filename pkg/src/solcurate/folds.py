"""Molecule-coherent cross-validation plans with 81/9/10 internal geometry.

Splitting is by plain structure key, so records that differ only in stereo
marks (or duplicate measurements of one molecule) always land in the same
fold with the same internal role. Each molecule carries one (fold, role)
pair: its fold is where it is evaluated, and its role says whether it
trains or early-stops the other folds' models. Marking 10% of every fold
as early-stop makes each complement split 81/9 of the whole set.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .dataset import DataTable, MissingKey
from .rng import shuffled

TRAIN = "train"
EARLYSTOP = "earlystop"


class FewerMoleculesThanFolds(ValueError):
    pass


class BadFoldIndex(IndexError):
    pass


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of molecules to folds and internal train/early-stop roles."""

    k: int
    seed: int
    assignment: dict[str, int]  # plain_key -> fold index
    role: dict[str, str]        # plain_key -> train | earlystop

    def molecules_in_fold(self, fold: int) -> list[str]:
        return sorted(key for key, f in self.assignment.items() if f == fold)


def _plain_keys(t: DataTable) -> list[str]:
    keys = set()
    for r in t.records:
        if r.key is None:
            raise MissingKey(f"record {r.raw_smiles!r} has no structure key")
        keys.add(r.key.plain_key)
    return sorted(keys)


def assign_folds(t: DataTable, k: int = 10, seed: int = 0) -> FoldPlan:
    """Deal molecules into ``k`` folds and mark internal roles.

    Unique plain keys are sorted, shuffled by the documented splitmix64
    Fisher-Yates shuffle, and dealt round-robin (fold sizes differ by at
    most one). The last 10% (rounded half up) of each fold's deal order is
    marked early-stop. Identical (table, k, seed) always produces the
    identical plan.
    """
    keys = _plain_keys(t)
    if len(keys) < k:
        raise FewerMoleculesThanFolds(
            f"{len(keys)} molecules cannot fill {k} folds"
        )
    order = shuffled(keys, seed)
    assignment = {key: i % k for i, key in enumerate(order)}
    role: dict[str, str] = {}
    for f in range(k):
        members = order[f::k]
        n_earlystop = int(len(members) * 0.1 + 0.5)
        cut = len(members) - n_earlystop
        for key in members[:cut]:
            role[key] = TRAIN
        for key in members[cut:]:
            role[key] = EARLYSTOP
    return FoldPlan(k=k, seed=seed, assignment=assignment, role=role)


def materialize_split(
    t: DataTable, plan: FoldPlan, fold_index: int
) -> tuple[DataTable, DataTable, DataTable]:
    """Disjoint (train, earlystop, eval) tables for one fold; their union
    is the input table, and no molecule spans two of them."""
    if not 0 <= fold_index < plan.k:
        raise BadFoldIndex(f"fold {fold_index} not in [0, {plan.k})")
    train, early, evaluation = [], [], []
    for r in t.records:
        key = r.key.plain_key if r.key else None
        if key is None or key not in plan.assignment:
            raise MissingKey(f"record {r.raw_smiles!r} is not covered by the plan")
        if plan.assignment[key] == fold_index:
            evaluation.append(r)
        elif plan.role[key] == TRAIN:
            train.append(r)
        else:
            early.append(r)
    prefix = f"{t.name}.fold{fold_index}"
    return (
        DataTable(name=f"{prefix}.train", records=tuple(train)),
        DataTable(name=f"{prefix}.earlystop", records=tuple(early)),
        DataTable(name=f"{prefix}.eval", records=tuple(evaluation)),
    )


def write_plan_csv(plan: FoldPlan, path: str | Path) -> None:
    """Serialize as (plain_key, fold, role) rows so external model code can
    train on identical splits."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["plain_key", "fold", "role"])
        for key in sorted(plan.assignment):
            writer.writerow([key, plan.assignment[key], plan.role[key]])


def read_plan_csv(path: str | Path) -> FoldPlan:
    """Load a serialized plan; the seed is unknowable from the file and is
    recorded as -1."""
    assignment: dict[str, int] = {}
    role: dict[str, str] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            assignment[row["plain_key"]] = int(row["fold"])
            role[row["plain_key"]] = row["role"]
    if not assignment:
        raise ValueError(f"{path} contains no fold assignments")
    return FoldPlan(
        k=max(assignment.values()) + 1, seed=-1, assignment=assignment, role=role
    )
