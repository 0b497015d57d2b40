"""Canonical structure keys: desalting, neutralization, organic filtering,
and Morgan-style canonical SMILES.

The stereo-stripped canonical SMILES (``plain_key``) plays the role that the
non-stereo part of a hashed structure identifier plays in molecule-indexed
databases: one string per molecule regardless of atom numbering or recorded
stereo marks. Stereo marks are carried as opaque annotations into
``stereo_key``; no stereo chemistry is interpreted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .elements import DEFAULT_VALENCES, atomic_weight
from .molparse import (
    BondOrder,
    MolGraph,
    attached_hydrogens,
    components,
    write_smiles,
)
from .rounding import format_fixed


class NonFiniteValue(ValueError):
    """Record value is NaN or infinite."""


@dataclass(frozen=True)
class StructureKey:
    """Canonical SMILES pair: with stereo marks and with them stripped."""

    stereo_key: str
    plain_key: str


@dataclass
class StandardizeReport:
    """Per-record audit of what standardization did or why it rejected."""

    removed_fragments: int = 0
    neutralized_atoms: int = 0
    rejected_reason: str | None = None  # metal | single-heavy-atom | parse-error


class Classification(Enum):
    ACCEPTED = "accepted"
    REJECTED_METAL = "metal"
    REJECTED_SINGLE_ATOM = "single-heavy-atom"


# all metals and metalloids are excluded except B, Si, Se
ORGANIC_ALLOWED = frozenset(
    {"H", "B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "Se", "Br", "I"}
)


# ---------------------------------------------------------------------------
# desalting / neutralization / filtering
# ---------------------------------------------------------------------------

def _fragment_mass(g: MolGraph) -> float:
    total = 0.0
    for i, atom in enumerate(g.atoms):
        total += atomic_weight(atom.element)
        total += attached_hydrogens(g, i) * atomic_weight("H")
    return total


def strip_salts(g: MolGraph) -> MolGraph:
    """Keep the major fragment: most heavy atoms, then largest mass, then
    lexicographically smallest plain key."""
    frags = components(g)
    if len(frags) == 1:
        return frags[0]
    scored = [(f.heavy_atom_count, _fragment_mass(f)) for f in frags]
    best_score = max(scored)
    tied = [f for f, s in zip(frags, scored) if s == best_score]
    if len(tied) == 1:
        return tied[0]
    return min(tied, key=lambda f: canonical_key(f).plain_key)


def _used_valence(g: MolGraph, i: int) -> int:
    used = 0
    for _, bi in g.adjacency[i]:
        order = g.bonds[bi].order
        used += 1 if order == BondOrder.AROMATIC else int(order)
    atom = g.atoms[i]
    if atom.aromatic and atom.element in ("B", "C", "N", "P"):
        used += 1
    return used


def neutralize(g: MolGraph) -> tuple[MolGraph, int]:
    """Discharge +1 atoms carrying a hydrogen and N/O/S -1 atoms.

    Atoms adjacent to an opposite charge (charge-separated nitro and
    friends) are left alone, as are changes that would exceed the element's
    largest fixed valence. Returns the new graph and the changed-atom count.
    """
    new_atoms = list(g.atoms)
    changed = 0
    for i, atom in enumerate(g.atoms):
        if atom.formal_charge not in (1, -1):
            continue
        paired = any(
            g.atoms[j].formal_charge * atom.formal_charge < 0
            for j, _ in g.adjacency[i]
        )
        if paired:
            continue
        h = attached_hydrogens(g, i)
        if atom.formal_charge == 1:
            if h >= 1:
                new_atoms[i] = replace(atom, formal_charge=0, explicit_h=h - 1)
                changed += 1
        else:
            if atom.element not in ("N", "O", "S"):
                continue
            max_valence = max(DEFAULT_VALENCES[atom.element])
            if _used_valence(g, i) + h + 1 <= max_valence:
                new_atoms[i] = replace(atom, formal_charge=0, explicit_h=h + 1)
                changed += 1
    if changed == 0:
        return g, 0
    return MolGraph(tuple(new_atoms), g.bonds, g.source_text), changed


def classify_organic(g: MolGraph) -> Classification:
    """Reject metal-containing and single-heavy-atom molecules."""
    for atom in g.atoms:
        if atom.element not in ORGANIC_ALLOWED:
            return Classification.REJECTED_METAL
    if g.heavy_atom_count < 2:
        return Classification.REJECTED_SINGLE_ATOM
    return Classification.ACCEPTED


# ---------------------------------------------------------------------------
# canonical ranking
# ---------------------------------------------------------------------------

def _initial_classes(g: MolGraph) -> list[int]:
    invariants = []
    for i, atom in enumerate(g.atoms):
        invariants.append((
            atom.element,
            g.degree(i),
            atom.formal_charge,
            attached_hydrogens(g, i),
            atom.aromatic,
            atom.isotope or 0,
        ))
    ids = {inv: k for k, inv in enumerate(sorted(set(invariants)))}
    return [ids[inv] for inv in invariants]


def _refine(neighbors: list[list[tuple[int, int]]], classes: list[int]) -> list[int]:
    """Iterate neighbor-multiset refinement until the partition is stable.

    Class ids are always reassigned in sorted signature order, which keeps
    them invariant under atom renumbering.
    """
    n = len(neighbors)
    n_classes = len(set(classes))
    if n_classes == n:
        return classes
    while True:
        sigs = [
            (classes[i], tuple(sorted((order, classes[j]) for order, j in nbrs)))
            for i, nbrs in enumerate(neighbors)
        ]
        ids = {s: k for k, s in enumerate(sorted(set(sigs)))}
        new = [ids[s] for s in sigs]
        if len(ids) == n_classes or len(ids) == n:
            return new
        n_classes = len(ids)
        classes = new


def _canonical_strings(g: MolGraph) -> tuple[str, str]:
    """(plain, stereo) canonical SMILES pair for one fragment.

    Refinement starts from (element, degree, charge, H count, aromatic)
    invariants; remaining ties are broken by trying each tied atom and
    keeping the lexicographically smallest (plain, stereo) output,
    recursively.
    """
    n = len(g.atoms)
    neighbors: list[list[tuple[int, int]]] = [
        [(int(g.bonds[bi].order), j) for j, bi in g.adjacency[i]] for i in range(n)
    ]
    has_stereo = any(a.stereo_mark for a in g.atoms) or any(
        b.stereo_mark for b in g.bonds
    )
    best: tuple[str, str] | None = None

    def search(classes: list[int]) -> None:
        nonlocal best
        cells: dict[int, list[int]] = {}
        for i, c in enumerate(classes):
            cells.setdefault(c, []).append(i)
        tied = sorted(c for c, members in cells.items() if len(members) > 1)
        if not tied:
            plain = write_smiles(g, classes, include_stereo=False)
            stereo = write_smiles(g, classes, include_stereo=True) if has_stereo else plain
            candidate = (plain, stereo)
            if best is None or candidate < best:
                best = candidate
            return
        target = tied[0]
        for i in cells[target]:
            promoted = [c * 2 for c in classes]
            promoted[i] = target * 2 - 1
            search(_refine(neighbors, promoted))

    search(_refine(neighbors, _initial_classes(g)))
    assert best is not None
    return best


def canonical_key(g: MolGraph) -> StructureKey:
    """Canonical structure key, invariant under any atom renumbering.

    Multi-fragment graphs are keyed fragment-by-fragment with sorted,
    dot-joined parts (normal pipelines desalt first).
    """
    frags = components(g)
    if len(frags) == 1:
        plain, stereo = _canonical_strings(g)
        return StructureKey(stereo_key=stereo, plain_key=plain)
    pairs = sorted(_canonical_strings(f) for f in frags)
    return StructureKey(
        stereo_key=".".join(p[1] for p in pairs),
        plain_key=".".join(p[0] for p in pairs),
    )


def record_key(key: StructureKey, value: float) -> str:
    """Duplicate-detection key: plain key plus the value at 0.01 precision.

    Rounding is half away from zero, so records are duplicates exactly when
    their rounded values coincide (key equality, not pairwise distance).
    """
    if not math.isfinite(value):
        raise NonFiniteValue(f"log-solubility value {value!r} is not finite")
    return f"{key.plain_key}|{format_fixed(value, 2)}"


# ---------------------------------------------------------------------------
# one-call pipeline
# ---------------------------------------------------------------------------

def standardize_smiles(
    text: str, *, neutralize_charges: bool = True
) -> tuple[MolGraph | None, StructureKey | None, StandardizeReport]:
    """Parse, desalt, optionally neutralize, filter, and key one SMILES.

    Returns ``(graph, key, report)``; graph and key are None when the record
    is rejected, with the reason recorded in the report.
    """
    from .molparse import PARSE_ERRORS, parse_smiles

    report = StandardizeReport()
    try:
        g = parse_smiles(text)
    except PARSE_ERRORS:
        report.rejected_reason = "parse-error"
        return None, None, report

    n_frags = len(components(g))
    report.removed_fragments = n_frags - 1
    g = strip_salts(g)
    if neutralize_charges:
        g, report.neutralized_atoms = neutralize(g)
    verdict = classify_organic(g)
    if verdict is not Classification.ACCEPTED:
        report.rejected_reason = verdict.value
        return None, None, report
    return g, canonical_key(g), report
