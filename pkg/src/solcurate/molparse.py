"""SMILES parsing and writing over a minimal molecular graph.

The grammar covers what aqueous-solubility collections actually contain:
organic-subset atoms, bracket atoms with isotope/charge/H-count/stereo,
single/double/triple/aromatic bonds, branches, ring closures (including
``%nn``), dot-separated fragments, and ``/``/``\\`` bond marks. Aromaticity
is taken from lowercase input and never re-perceived; stereo marks are
recorded but not interpreted. Wildcards (``*``) and reaction arrows are
rejected.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, replace
from enum import IntEnum
from functools import cached_property

from .elements import (
    AROMATIC_ELEMENTS,
    BARE_AROMATIC,
    DEFAULT_VALENCES,
    ORGANIC_SUBSET,
    PERIODIC_TABLE,
)


class SmilesError(ValueError):
    """Base class for SMILES syntax errors; carries the byte offset."""

    def __init__(self, message: str, text: str, offset: int):
        super().__init__(f"{message} at offset {offset}: {text!r}")
        self.text = text
        self.offset = offset


class EmptyInput(SmilesError):
    """Input string is empty or whitespace-only."""


class UnbalancedBranch(SmilesError):
    """Unmatched parenthesis or unterminated bracket atom."""


class UnclosedRing(SmilesError):
    """Dangling ring digit or other ring-notation defect."""


class UnknownElement(SmilesError):
    """Token is not a recognized atom (also raised for off-grammar tokens)."""


PARSE_ERRORS = (EmptyInput, UnbalancedBranch, UnclosedRing, UnknownElement)

# atom stereo marks as written ('@' = counterclockwise, '@@' = clockwise);
# bond marks '/' (up) and '\' (down) are stored relative to endpoint order.
COUNTERCLOCKWISE = "@"
CLOCKWISE = "@@"
BOND_UP = "/"
BOND_DOWN = "\\"

# aromatic lowercase consumes one valence slot for these elements (pi
# electron from the atom itself); chalcogens contribute lone pairs instead.
_AROMATIC_VALENCE_USERS = frozenset({"B", "C", "N", "P"})


class BondOrder(IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4


@dataclass(frozen=True)
class Atom:
    """One atom: element symbol, charge, aromatic flag, bracket-H, stereo.

    ``explicit_h is None`` means the hydrogen count is implicit and resolved
    by the fixed valence table; a bracket atom always carries the exact
    bracket count.
    """

    element: str
    formal_charge: int = 0
    aromatic: bool = False
    explicit_h: int | None = None
    stereo_mark: str | None = None
    isotope: int | None = None


@dataclass(frozen=True)
class Bond:
    """Bond between two atom indices; stereo mark is relative to a -> b."""

    a: int
    b: int
    order: BondOrder = BondOrder.SINGLE
    stereo_mark: str | None = None


@dataclass(frozen=True)
class MolGraph:
    """Immutable molecular graph; atoms keep first-appearance order."""

    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    source_text: str = ""

    def __post_init__(self):
        n = len(self.atoms)
        seen: set[tuple[int, int]] = set()
        for bond in self.bonds:
            if bond.a == bond.b:
                raise ValueError(f"bond endpoints identical: {bond}")
            if not (0 <= bond.a < n and 0 <= bond.b < n):
                raise ValueError(f"bond endpoint out of range: {bond}")
            pair = (min(bond.a, bond.b), max(bond.a, bond.b))
            if pair in seen:
                raise ValueError(f"duplicate bond between atoms {pair}")
            seen.add(pair)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per atom: tuple of (neighbor index, bond index)."""
        adj: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
        for bi, bond in enumerate(self.bonds):
            adj[bond.a].append((bond.b, bi))
            adj[bond.b].append((bond.a, bi))
        return tuple(tuple(entries) for entries in adj)

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def heavy_atom_count(self) -> int:
        return sum(1 for a in self.atoms if a.element != "H")


def implicit_hydrogens(g: MolGraph, i: int) -> int:
    """Hydrogen count by the fixed valence rules, ignoring any bracket count.

    Aromatic bonds contribute 1 to the used valence; aromatic B/C/N/P use one
    extra slot for the ring pi electron (so benzene carbons get one hydrogen
    and pyridine-type nitrogens none, while thiophene sulfur stays bare).
    Charged atoms and elements outside the valence table get 0.
    """
    atom = g.atoms[i]
    if atom.formal_charge != 0:
        return 0
    valences = DEFAULT_VALENCES.get(atom.element)
    if valences is None:
        return 0
    used = 0
    for _, bi in g.adjacency[i]:
        order = g.bonds[bi].order
        used += 1 if order == BondOrder.AROMATIC else int(order)
    if atom.aromatic and atom.element in _AROMATIC_VALENCE_USERS:
        used += 1
    for v in valences:
        if used <= v:
            return v - used
    return 0


def attached_hydrogens(g: MolGraph, i: int) -> int:
    """Total hydrogens on atom i: bracket count if given, else implicit."""
    atom = g.atoms[i]
    return atom.explicit_h if atom.explicit_h is not None else implicit_hydrogens(g, i)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.atoms: list[Atom] = []
        self.bonds: list[Bond] = []
        self.bond_pairs: set[tuple[int, int]] = set()
        self.prev: int | None = None
        self.branch_stack: list[tuple[int, int]] = []  # (atom, '(' offset)
        # ring number -> (atom, pending order, pending stereo, open offset)
        self.open_rings: dict[int, tuple[int, BondOrder | None, str | None, int]] = {}
        self.pending_order: BondOrder | None = None
        self.pending_stereo: str | None = None

    def error(self, cls: type[SmilesError], message: str, offset: int | None = None):
        raise cls(message, self.text, self.pos if offset is None else offset)

    def peek(self) -> str | None:
        return self.text[self.pos] if self.pos < len(self.text) else None

    def take(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        return ch

    def read_digits(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return self.text[start:self.pos]

    # -- atoms --------------------------------------------------------------

    def add_atom(self, atom: Atom) -> None:
        self.atoms.append(atom)
        idx = len(self.atoms) - 1
        if self.prev is not None:
            self.add_bond(self.prev, idx)
        else:
            self.pending_order = None
            self.pending_stereo = None
        self.prev = idx

    def add_bond(self, a: int, b: int, *, closing_offset: int | None = None) -> None:
        if a == b:
            self.error(UnclosedRing, "ring bond to the same atom", closing_offset)
        pair = (min(a, b), max(a, b))
        if pair in self.bond_pairs:
            where = closing_offset if closing_offset is not None else self.pos
            self.error(UnclosedRing, "duplicate bond between one atom pair", where)
        order = self.pending_order
        if order is None:
            both_aromatic = self.atoms[a].aromatic and self.atoms[b].aromatic
            order = BondOrder.AROMATIC if both_aromatic else BondOrder.SINGLE
        self.bonds.append(Bond(a, b, order, self.pending_stereo))
        self.bond_pairs.add(pair)
        self.pending_order = None
        self.pending_stereo = None

    def parse_organic_atom(self) -> None:
        start = self.pos
        ch = self.take()
        if ch.isupper():
            nxt = self.peek()
            symbol = ch
            if nxt is not None and ch + nxt in ("Cl", "Br"):
                symbol = ch + self.take()
            if symbol not in ORGANIC_SUBSET:
                self.error(UnknownElement, f"'{symbol}' is not a bare-atom symbol", start)
            self.add_atom(Atom(symbol))
        else:
            if ch not in BARE_AROMATIC:
                self.error(UnknownElement, f"'{ch}' is not a bare aromatic symbol", start)
            self.add_atom(Atom(ch.upper(), aromatic=True))

    def parse_bracket_atom(self) -> None:
        open_offset = self.pos
        self.take()  # '['

        isotope: int | None = None
        digits = self.read_digits()
        if digits:
            isotope = int(digits)

        ch = self.peek()
        if ch is None:
            self.error(UnbalancedBranch, "unterminated bracket atom", open_offset)
        sym_offset = self.pos
        if ch.isupper():
            symbol = self.take()
            nxt = self.peek()
            if nxt is not None and nxt.islower() and (symbol + nxt) in PERIODIC_TABLE:
                symbol += self.take()
            aromatic = False
        elif ch.islower():
            symbol = self.take()
            nxt = self.peek()
            if nxt is not None and nxt.islower() and (symbol + nxt).capitalize() in AROMATIC_ELEMENTS:
                symbol += self.take()
            symbol = symbol.capitalize()
            if symbol not in AROMATIC_ELEMENTS:
                self.error(UnknownElement, f"'{symbol.lower()}' cannot be aromatic", sym_offset)
            aromatic = True
        else:
            self.error(UnknownElement, f"expected element symbol, got '{ch}'", sym_offset)
        if symbol not in PERIODIC_TABLE:
            self.error(UnknownElement, f"unknown element '{symbol}'", sym_offset)

        stereo: str | None = None
        if self.peek() == "@":
            self.take()
            if self.peek() == "@":
                self.take()
                stereo = CLOCKWISE
            else:
                stereo = COUNTERCLOCKWISE

        h_count = 0
        if self.peek() == "H":
            self.take()
            digits = self.read_digits()
            h_count = int(digits) if digits else 1

        charge = 0
        ch = self.peek()
        if ch in ("+", "-"):
            sign = 1 if ch == "+" else -1
            count = 0
            while self.peek() == ch:
                self.take()
                count += 1
            digits = self.read_digits()
            if digits:
                if count > 1:
                    self.error(UnknownElement, "malformed charge", self.pos - 1)
                charge = sign * int(digits)
            else:
                charge = sign * count

        if self.peek() != "]":
            if self.peek() is None:
                self.error(UnbalancedBranch, "unterminated bracket atom", open_offset)
            self.error(UnknownElement, f"unexpected '{self.peek()}' in bracket atom")
        self.take()  # ']'
        self.add_atom(
            Atom(symbol, formal_charge=charge, aromatic=aromatic,
                 explicit_h=h_count, stereo_mark=stereo, isotope=isotope)
        )

    # -- rings --------------------------------------------------------------

    def parse_ring_closure(self) -> None:
        start = self.pos
        if self.prev is None:
            self.error(UnclosedRing, "ring digit before any atom", start)
        ch = self.take()
        if ch == "%":
            d = self.text[self.pos:self.pos + 2]
            if len(d) != 2 or not d.isdigit():
                self.error(UnclosedRing, "'%' must be followed by two digits", start)
            self.pos += 2
            number = int(d)
        else:
            number = int(ch)

        if number in self.open_rings:
            other, open_order, open_stereo, _ = self.open_rings.pop(number)
            if (open_order is not None and self.pending_order is not None
                    and open_order != self.pending_order):
                self.error(UnclosedRing, f"conflicting orders for ring bond {number}", start)
            if self.pending_order is None:
                self.pending_order = open_order
            if self.pending_stereo is None:
                self.pending_stereo = open_stereo
            self.add_bond(other, self.prev, closing_offset=start)
        else:
            self.open_rings[number] = (self.prev, self.pending_order, self.pending_stereo, start)
            self.pending_order = None
            self.pending_stereo = None

    # -- main loop ----------------------------------------------------------

    def parse(self) -> MolGraph:
        bond_chars = {"-": BondOrder.SINGLE, "=": BondOrder.DOUBLE,
                      "#": BondOrder.TRIPLE, ":": BondOrder.AROMATIC}
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == ".":
                if self.pending_order is not None or self.pending_stereo is not None:
                    self.error(UnknownElement, "bond symbol before fragment separator")
                self.take()
                self.prev = None
            elif ch in bond_chars:
                if self.pending_order is not None:
                    self.error(UnknownElement, "two consecutive bond symbols")
                self.take()
                self.pending_order = bond_chars[ch]
            elif ch in (BOND_UP, BOND_DOWN):
                if self.pending_order is not None and self.pending_order != BondOrder.SINGLE:
                    self.error(UnknownElement, "stereo mark on a non-single bond")
                self.take()
                self.pending_order = BondOrder.SINGLE
                self.pending_stereo = ch
            elif ch == "(":
                if self.prev is None:
                    self.error(UnbalancedBranch, "branch with no preceding atom")
                self.branch_stack.append((self.prev, self.pos))
                self.take()
            elif ch == ")":
                if not self.branch_stack:
                    self.error(UnbalancedBranch, "unmatched ')'")
                self.take()
                self.prev, _ = self.branch_stack.pop()
            elif ch.isdigit() or ch == "%":
                self.parse_ring_closure()
            elif ch == "[":
                self.parse_bracket_atom()
            elif ch.isalpha():
                self.parse_organic_atom()
            else:
                self.error(UnknownElement, f"unexpected character '{ch}'")

        if self.pending_order is not None or self.pending_stereo is not None:
            self.error(UnknownElement, "dangling bond symbol at end of input")
        if self.branch_stack:
            self.error(UnbalancedBranch, "unmatched '('", self.branch_stack[-1][1])
        if self.open_rings:
            number, (_, _, _, offset) = min(self.open_rings.items())
            self.error(UnclosedRing, f"ring bond {number} never closed", offset)
        return MolGraph(tuple(self.atoms), tuple(self.bonds), self.text)


def parse_smiles(text: str) -> MolGraph:
    """Parse a SMILES string into a :class:`MolGraph`.

    Atoms appear in first-appearance order; implicit hydrogens stay symbolic
    (``explicit_h=None``) and are resolved on demand by the valence table.
    Raises :class:`EmptyInput`, :class:`UnbalancedBranch`,
    :class:`UnclosedRing`, or :class:`UnknownElement`, each carrying the byte
    offset of the defect.
    """
    stripped = text.strip()
    if not stripped:
        raise EmptyInput("empty SMILES", text, 0)
    return _Parser(stripped).parse()


# ---------------------------------------------------------------------------
# writer
# ---------------------------------------------------------------------------

def _charge_token(charge: int) -> str:
    if charge == 0:
        return ""
    if charge == 1:
        return "+"
    if charge == -1:
        return "-"
    return f"+{charge}" if charge > 0 else f"-{-charge}"


def _atom_token(g: MolGraph, i: int, include_stereo: bool) -> str:
    atom = g.atoms[i]
    show_stereo = include_stereo and atom.stereo_mark is not None
    bare_symbol_ok = (
        atom.element in ORGANIC_SUBSET
        and (not atom.aromatic or atom.element.lower() in BARE_AROMATIC)
    )
    if (bare_symbol_ok and atom.formal_charge == 0 and atom.isotope is None
            and not show_stereo
            and (atom.explicit_h is None or atom.explicit_h == implicit_hydrogens(g, i))):
        return atom.element.lower() if atom.aromatic else atom.element

    h = attached_hydrogens(g, i)
    h_token = "" if h == 0 else ("H" if h == 1 else f"H{h}")
    symbol = atom.element.lower() if atom.aromatic else atom.element
    isotope = "" if atom.isotope is None else str(atom.isotope)
    stereo = atom.stereo_mark if show_stereo else ""
    return f"[{isotope}{symbol}{stereo}{h_token}{_charge_token(atom.formal_charge)}]"


def _bond_token(g: MolGraph, bi: int, from_atom: int, include_stereo: bool) -> str:
    bond = g.bonds[bi]
    a_arom = g.atoms[bond.a].aromatic
    b_arom = g.atoms[bond.b].aromatic
    if bond.order == BondOrder.AROMATIC:
        return "" if (a_arom and b_arom) else ":"
    if bond.order == BondOrder.DOUBLE:
        return "="
    if bond.order == BondOrder.TRIPLE:
        return "#"
    if include_stereo and bond.stereo_mark is not None:
        # marks are stored relative to a -> b; flip when written b -> a
        if from_atom == bond.a:
            return bond.stereo_mark
        return BOND_DOWN if bond.stereo_mark == BOND_UP else BOND_UP
    return "-" if (a_arom and b_arom) else ""


def write_smiles(g: MolGraph, ranks: list[int] | None = None,
                 include_stereo: bool = True) -> str:
    """Write a deterministic SMILES for ``g`` under a per-atom total order.

    ``ranks[i]`` is the priority of atom ``i`` (lower writes earlier); it
    must be a permutation of the atom indices. Traversal starts at the
    lowest-ranked atom of each fragment and visits neighbors in rank order,
    so equal ranks imply byte-identical output. ``include_stereo=False``
    omits every atom and bond stereo mark.
    """
    n = len(g.atoms)
    if n == 0:
        return ""
    if ranks is None:
        ranks = list(range(n))
    elif len(ranks) != n or len(set(ranks)) != n or min(ranks) != 0 or max(ranks) != n - 1:
        raise ValueError("ranks must be a permutation of atom indices")

    visited = [False] * n
    used_bonds = [False] * len(g.bonds)
    # fragment roots in rank order
    roots = sorted(range(n), key=lambda i: ranks[i])
    fragments: list[str] = []

    for root in roots:
        if visited[root]:
            continue
        # pass 1: DFS tree (children attached at pop time, so a node reached
        # first through another path never ends up in two child lists) plus
        # back edges in discovery order
        order: list[int] = []
        children: dict[int, list[tuple[int, int]]] = {}
        back_edges: dict[int, list[int]] = {}
        edge_digit: dict[int, int] = {}
        stack: list[tuple[int, int, int]] = [(root, -1, -1)]
        while stack:
            node, via, parent = stack.pop()
            if visited[node]:
                continue
            visited[node] = True
            if via >= 0:
                used_bonds[via] = True
                children[parent].append((node, via))
            order.append(node)
            children[node] = []
            nbrs = sorted(g.adjacency[node], key=lambda e: ranks[e[0]])
            pending_kids: list[tuple[int, int]] = []
            for nbr, bi in nbrs:
                if visited[nbr]:
                    if not used_bonds[bi]:
                        used_bonds[bi] = True
                        back_edges.setdefault(node, []).append(bi)
                        back_edges.setdefault(nbr, []).append(bi)
                else:
                    pending_kids.append((nbr, bi))
            # push in reverse so lower ranks are emitted first
            for nbr, bi in reversed(pending_kids):
                stack.append((nbr, bi, node))

        # pass 2: emit, allocating ring digits at first sight of a back edge
        free_digits = list(range(1, 100))
        emitted: list[str] = []

        def emit(node: int, via_bond: int) -> None:
            if via_bond >= 0:
                emitted.append(_bond_token(g, via_bond, _other(g, via_bond, node), include_stereo))
            emitted.append(_atom_token(g, node, include_stereo))
            for bi in back_edges.get(node, ()):
                if bi in edge_digit:
                    digit = edge_digit.pop(bi)
                    free_digits.append(digit)
                    free_digits.sort()
                    emitted.append(_bond_token(g, bi, _other(g, bi, node), include_stereo))
                else:
                    digit = free_digits.pop(0)
                    edge_digit[bi] = digit
                    emitted.append(_bond_token(g, bi, node, include_stereo))
                emitted.append(str(digit) if digit < 10 else f"%{digit:02d}")
            kids = children[node]
            for pos, (kid, bi) in enumerate(kids):
                last = pos == len(kids) - 1
                if not last:
                    emitted.append("(")
                emit(kid, bi)
                if not last:
                    emitted.append(")")

        # recursion depth equals the longest chain; lift the limit for
        # unusually long backbones instead of crashing
        if n + 10 > sys.getrecursionlimit():
            sys.setrecursionlimit(n + 100)
        emit(order[0], -1)
        fragments.append("".join(emitted))

    return ".".join(fragments)


def _other(g: MolGraph, bi: int, node: int) -> int:
    bond = g.bonds[bi]
    return bond.b if bond.a == node else bond.a


# ---------------------------------------------------------------------------
# fragments and permutations
# ---------------------------------------------------------------------------

def components(g: MolGraph) -> list[MolGraph]:
    """Split a graph into connected components, preserving atom order.

    A single-component graph is returned as-is (same object). Component
    ``source_text`` is a freshly written SMILES of the fragment.
    """
    n = len(g.atoms)
    if n == 0:
        return []
    label = [-1] * n
    count = 0
    for start in range(n):
        if label[start] >= 0:
            continue
        stack = [start]
        label[start] = count
        while stack:
            node = stack.pop()
            for nbr, _ in g.adjacency[node]:
                if label[nbr] < 0:
                    label[nbr] = count
                    stack.append(nbr)
        count += 1
    if count == 1:
        return [g]

    out: list[MolGraph] = []
    for c in range(count):
        members = [i for i in range(n) if label[i] == c]
        remap = {old: new for new, old in enumerate(members)}
        atoms = tuple(g.atoms[i] for i in members)
        bonds = tuple(
            Bond(remap[b.a], remap[b.b], b.order, b.stereo_mark)
            for b in g.bonds if label[b.a] == c
        )
        sub = MolGraph(atoms, bonds)
        out.append(replace(sub, source_text=write_smiles(sub)))
    return out


def permute_atoms(g: MolGraph, perm: list[int]) -> MolGraph:
    """Relabel atoms so atom ``i`` moves to index ``perm[i]``."""
    if sorted(perm) != list(range(len(g.atoms))):
        raise ValueError("perm must be a permutation of atom indices")
    atoms: list[Atom | None] = [None] * len(g.atoms)
    for i, atom in enumerate(g.atoms):
        atoms[perm[i]] = atom
    bonds = tuple(replace(b, a=perm[b.a], b=perm[b.b]) for b in g.bonds)
    return MolGraph(tuple(atoms), bonds, g.source_text)
