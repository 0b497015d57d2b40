"""Independent oracles used by the tests.

These deliberately avoid the library's own code paths wherever the library
result is what's being checked: the isomorphism checker does its own
refinement + backtracking, cycle enumeration is brute force, heavy atoms
are counted by scanning SMILES text, and the ridge oracle solves the
normal equations with an explicit pseudo-inverse.
"""

from __future__ import annotations

import numpy as np

from solcurate.molparse import MolGraph, attached_hydrogens


# ---------------------------------------------------------------------------
# exact graph isomorphism (refinement + backtracking), for <= 30 atoms
# ---------------------------------------------------------------------------

def _atom_label(g: MolGraph, i: int):
    a = g.atoms[i]
    return (a.element, a.formal_charge, a.aromatic, attached_hydrogens(g, i),
            a.isotope or 0)


def _bond_orders(g: MolGraph):
    return [
        [(int(g.bonds[bi].order), j) for j, bi in g.adjacency[i]]
        for i in range(len(g.atoms))
    ]


def _refine_colors(nbrs1, nbrs2, colors1, colors2):
    while True:
        sig1 = [(colors1[i], tuple(sorted((o, colors1[j]) for o, j in nb)))
                for i, nb in enumerate(nbrs1)]
        sig2 = [(colors2[i], tuple(sorted((o, colors2[j]) for o, j in nb)))
                for i, nb in enumerate(nbrs2)]
        if sorted(sig1) != sorted(sig2):
            return None, None
        ids = {s: k for k, s in enumerate(sorted(set(sig1)))}
        new1 = [ids[s] for s in sig1]
        new2 = [ids[s] for s in sig2]
        if len(ids) == len(set(colors1)):
            return new1, new2
        colors1, colors2 = new1, new2


def isomorphic(g1: MolGraph, g2: MolGraph) -> bool:
    """Exact isomorphism on (element, charge, aromatic, H, isotope) atom
    labels and bond orders. Stereo marks are representation detail and are
    not compared."""
    n = len(g1.atoms)
    if n != len(g2.atoms) or len(g1.bonds) != len(g2.bonds):
        return False
    labels1 = [_atom_label(g1, i) for i in range(n)]
    labels2 = [_atom_label(g2, i) for i in range(n)]
    if sorted(labels1) != sorted(labels2):
        return False

    ids = {lab: k for k, lab in enumerate(sorted(set(labels1)))}
    nbrs1, nbrs2 = _bond_orders(g1), _bond_orders(g2)
    colors1, colors2 = _refine_colors(
        nbrs1, nbrs2, [ids[l] for l in labels1], [ids[l] for l in labels2]
    )
    if colors1 is None:
        return False

    bonds1 = {}
    for b in g1.bonds:
        bonds1[(b.a, b.b)] = int(b.order)
        bonds1[(b.b, b.a)] = int(b.order)
    bonds2 = {}
    for b in g2.bonds:
        bonds2[(b.a, b.b)] = int(b.order)
        bonds2[(b.b, b.a)] = int(b.order)

    candidates = [
        [j for j in range(n) if colors2[j] == colors1[i]] for i in range(n)
    ]
    order = sorted(range(n), key=lambda i: len(candidates[i]))
    mapping = [-1] * n
    used = [False] * n

    def extend(pos: int) -> bool:
        if pos == n:
            return True
        i = order[pos]
        for j in candidates[i]:
            if used[j]:
                continue
            ok = True
            for k, v in enumerate(mapping):
                if v < 0:
                    continue
                if bonds1.get((i, k)) != bonds2.get((j, v)):
                    ok = False
                    break
            if ok:
                mapping[i] = j
                used[j] = True
                if extend(pos + 1):
                    return True
                mapping[i] = -1
                used[j] = False
        return False

    return extend(0)


# ---------------------------------------------------------------------------
# brute-force simple-cycle enumeration
# ---------------------------------------------------------------------------

def simple_cycles(g: MolGraph) -> set[frozenset[tuple[int, int]]]:
    """Every simple cycle, as a frozenset of (lo, hi) edges."""
    adj = [[j for j, _ in g.adjacency[i]] for i in range(len(g.atoms))]
    found: set[frozenset[tuple[int, int]]] = set()

    def walk(start: int, node: int, path: list[int]) -> None:
        for nxt in adj[node]:
            if nxt == start and len(path) >= 3:
                edges = frozenset(
                    (min(a, b), max(a, b))
                    for a, b in zip(path, path[1:] + [start])
                )
                found.add(edges)
            elif nxt not in path and nxt > start:
                walk(start, nxt, path + [nxt])

    for s in range(len(g.atoms)):
        walk(s, s, [s])
    return found


# ---------------------------------------------------------------------------
# textual heavy-atom count (independent of the parser)
# ---------------------------------------------------------------------------

def heavy_atoms_in_text(fragment: str) -> int:
    """Count non-hydrogen atoms by scanning one dot-free SMILES fragment."""
    count = 0
    i = 0
    while i < len(fragment):
        ch = fragment[i]
        if ch == "[":
            j = fragment.index("]", i)
            body = fragment[i + 1:j]
            k = 0
            while k < len(body) and body[k].isdigit():
                k += 1
            symbol = body[k]
            if k + 1 < len(body) and body[k + 1].islower():
                symbol += body[k + 1]
            if symbol.capitalize() != "H":
                count += 1
            i = j + 1
        elif ch.isalpha():
            if ch + fragment[i + 1:i + 2] in ("Cl", "Br"):
                i += 1
            count += 1
            i += 1
        else:
            i += 1
    return count


# ---------------------------------------------------------------------------
# normal-equations ridge oracle (explicit pseudo-inverse)
# ---------------------------------------------------------------------------

def ridge_oracle_predict(X, y, X_new, sample_weights=None, lam=0.0):
    """Solve min sum s_i (y_i - x_i.b - c)^2 + lam ||b||^2 by pinv of the
    penalized normal equations; intercept unpenalized."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = X.shape
    s = np.ones(n) if sample_weights is None else np.asarray(sample_weights, dtype=float)
    design = np.hstack([X, np.ones((n, 1))])
    penalty = lam * np.diag(np.r_[np.ones(p), 0.0])
    gram = design.T @ (s[:, None] * design) + penalty
    beta = np.linalg.pinv(gram) @ design.T @ (s * y)
    return np.asarray(X_new, dtype=float) @ beta[:p] + beta[p]
