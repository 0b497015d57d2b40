"""Parser, writer, and fragment tests."""

from __future__ import annotations

import random

import pytest

from oracles import heavy_atoms_in_text, isomorphic, simple_cycles
from solcurate.molparse import (
    BondOrder,
    EmptyInput,
    MolGraph,
    PARSE_ERRORS,
    UnbalancedBranch,
    UnclosedRing,
    UnknownElement,
    attached_hydrogens,
    components,
    parse_smiles,
    permute_atoms,
    write_smiles,
)


class TestBasicParsing:
    def test_single_oxygen(self):
        g = parse_smiles("O")
        assert len(g.atoms) == 1
        assert g.atoms[0].element == "O"
        assert g.atoms[0].formal_charge == 0
        assert len(g.bonds) == 0

    def test_bracket_methane(self):
        g = parse_smiles("[CH4]")
        assert len(g.atoms) == 1
        assert g.atoms[0].element == "C"
        assert g.atoms[0].explicit_h == 4
        assert len(g.bonds) == 0

    def test_benzene_is_one_six_cycle(self):
        g = parse_smiles("c1ccccc1")
        assert len(g.atoms) == 6
        assert all(a.element == "C" and a.aromatic for a in g.atoms)
        assert len(g.bonds) == 6
        assert all(b.order == BondOrder.AROMATIC for b in g.bonds)
        cycles = simple_cycles(g)
        assert len(cycles) == 1
        (cycle,) = cycles
        assert len(cycle) == 6

    def test_hand_counted_atoms_and_bonds(self):
        for smiles, atoms, bonds in [("c1ccccc1", 6, 6), ("CC(=O)O", 4, 3), ("C#N", 2, 1)]:
            g = parse_smiles(smiles)
            assert (len(g.atoms), len(g.bonds)) == (atoms, bonds)

    def test_atoms_in_first_appearance_order(self):
        g = parse_smiles("NC(=O)CBr")
        assert [a.element for a in g.atoms] == ["N", "C", "O", "C", "Br"]

    def test_branching(self):
        g = parse_smiles("CC(C)(C)C")
        degrees = sorted(g.degree(i) for i in range(5))
        assert degrees == [1, 1, 1, 1, 4]

    def test_ring_digit_reuse_and_percent(self):
        g = parse_smiles("C1CC1C1CC1")
        assert len(g.bonds) == 7
        g = parse_smiles("C%10CCCCCCCCC%10")
        assert len(g.atoms) == 10
        assert len(g.bonds) == 10

    def test_charges(self):
        assert parse_smiles("[Mg+2]").atoms[0].formal_charge == 2
        assert parse_smiles("[O-2]").atoms[0].formal_charge == -2
        assert parse_smiles("[Fe+++]").atoms[0].formal_charge == 3
        assert parse_smiles("[NH4+]").atoms[0].explicit_h == 4
        assert parse_smiles("[CH3-]").atoms[0].formal_charge == -1

    def test_isotopes(self):
        assert parse_smiles("[13C]").atoms[0].isotope == 13
        assert parse_smiles("[2H]").atoms[0].isotope == 2

    def test_stereo_marks_recorded(self):
        g = parse_smiles("C[C@H](N)C(=O)O")
        assert g.atoms[1].stereo_mark == "@"
        g = parse_smiles("F/C=C\\F")
        marks = [b.stereo_mark for b in g.bonds]
        assert "/" in marks and "\\" in marks

    def test_explicit_single_between_aromatics(self):
        g = parse_smiles("c1ccccc1-c1ccccc1")
        orders = [b.order for b in g.bonds]
        assert orders.count(BondOrder.SINGLE) == 1
        assert orders.count(BondOrder.AROMATIC) == 12


class TestParseErrors:
    def test_unclosed_ring(self):
        with pytest.raises(UnclosedRing) as exc:
            parse_smiles("C1CC")
        assert exc.value.offset == 1

    def test_unbalanced_branch(self):
        with pytest.raises(UnbalancedBranch):
            parse_smiles("CC(C")
        with pytest.raises(UnbalancedBranch):
            parse_smiles("CC)C")
        with pytest.raises(UnbalancedBranch):
            parse_smiles("[CH4")

    def test_unknown_element(self):
        with pytest.raises(UnknownElement):
            parse_smiles("CQ")
        with pytest.raises(UnknownElement):
            parse_smiles("[Zz]")

    def test_wildcard_and_reaction_rejected(self):
        with pytest.raises(UnknownElement) as exc:
            parse_smiles("*")
        assert exc.value.offset == 0
        with pytest.raises(UnknownElement):
            parse_smiles("CC>CC")

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            parse_smiles("")
        with pytest.raises(EmptyInput):
            parse_smiles("   ")

    def test_ring_defects(self):
        with pytest.raises(UnclosedRing):
            parse_smiles("C11")
        with pytest.raises(UnclosedRing):
            parse_smiles("C12CC12")
        with pytest.raises(UnclosedRing):
            parse_smiles("C=1CCCC-1")

    def test_garbage_always_raises_declared_errors(self):
        rng = random.Random(20240811)
        alphabet = "CNOPSFIclnos()[]=#+-123456789%./\\@Hq*>"
        for _ in range(500):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 18)))
            try:
                parse_smiles(text)
            except PARSE_ERRORS as exc:
                assert exc.offset >= 0


class TestImplicitHydrogens:
    @pytest.mark.parametrize("smiles,index,expected", [
        ("CCO", 0, 3), ("CCO", 1, 2), ("CCO", 2, 1),
        ("c1ccccc1", 0, 1),        # benzene carbon
        ("c1ccncc1", 3, 0),        # pyridine nitrogen
        ("c1ccsc1", 3, 0),         # thiophene sulfur
        ("c1ccoc1", 3, 0),         # furan oxygen
        ("C#N", 1, 0),
        ("CS(=O)C", 1, 0),
        ("[NH4+]", 0, 4),
    ])
    def test_resolutions(self, smiles, index, expected):
        g = parse_smiles(smiles)
        assert attached_hydrogens(g, index) == expected

    def test_pyrrole_needs_bracket_h(self):
        g = parse_smiles("c1cc[nH]c1")
        n_index = next(i for i, a in enumerate(g.atoms) if a.element == "N")
        assert attached_hydrogens(g, n_index) == 1


class TestWriter:
    def test_single_atom(self):
        assert write_smiles(parse_smiles("O")) == "O"

    def test_ethanol_two_rank_orders(self):
        g = parse_smiles("CCO")
        a = write_smiles(g, [0, 1, 2])
        b = write_smiles(g, [2, 1, 0])
        assert a != b
        assert isomorphic(parse_smiles(a), g)
        assert isomorphic(parse_smiles(b), g)

    def test_benzene_round_trip(self):
        g = parse_smiles("c1ccccc1")
        back = parse_smiles(write_smiles(g))
        assert len(back.atoms) == 6
        assert all(a.aromatic for a in back.atoms)
        assert len(simple_cycles(back)) == 1

    def test_bad_ranks_rejected(self):
        g = parse_smiles("CCO")
        with pytest.raises(ValueError):
            write_smiles(g, [0, 0, 1])

    def test_round_trip_corpus(self, corpus_graphs):
        rng = random.Random(7)
        for g in corpus_graphs:
            n = len(g.atoms)
            rank_choices = [list(range(n))]
            for _ in range(3):
                ranks = list(range(n))
                rng.shuffle(ranks)
                rank_choices.append(ranks)
            for ranks in rank_choices:
                text = write_smiles(g, ranks)
                assert isomorphic(parse_smiles(text), g), (g.source_text, text)

    def test_stereo_strippable(self):
        g = parse_smiles("F/C=C\\F")
        plain = write_smiles(g, include_stereo=False)
        assert "/" not in plain and "\\" not in plain
        g2 = parse_smiles("C[C@H](N)C(=O)O")
        plain2 = write_smiles(g2, include_stereo=False)
        assert "@" not in plain2


class TestComponents:
    def test_single_component_is_input(self):
        g = parse_smiles("CCO")
        assert components(g) == [g]

    def test_dot_splits(self):
        frags = components(parse_smiles("CCO.Cl"))
        assert sorted(f.heavy_atom_count for f in frags) == [1, 3]

    def test_inorganic_complex(self):
        frags = components(parse_smiles("[O-2].[O-2].[Mg+2].[Ca+2]"))
        assert len(frags) == 4
        assert all(len(f.atoms) == 1 for f in frags)

    def test_heavy_atom_counts_match_text_oracle(self, corpus_smiles):
        for smiles in corpus_smiles:
            g = parse_smiles(smiles)
            expected = sum(heavy_atoms_in_text(part) for part in smiles.split("."))
            assert g.heavy_atom_count == expected, smiles


class TestGraphInvariants:
    def test_duplicate_bond_rejected(self):
        from solcurate.molparse import Atom, Bond
        atoms = (Atom("C"), Atom("C"))
        with pytest.raises(ValueError):
            MolGraph(atoms, (Bond(0, 1), Bond(1, 0)))

    def test_permute_atoms_preserves_structure(self, corpus_graphs):
        rng = random.Random(3)
        for g in corpus_graphs[:40]:
            perm = list(range(len(g.atoms)))
            rng.shuffle(perm)
            assert isomorphic(permute_atoms(g, perm), g)
