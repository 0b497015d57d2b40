"""Hand-written SMILES corpus used across the test suite.

All strings parse under the package grammar; the mix covers chains, rings,
fused aromatics, heteroaromatics, charges, isotopes, stereo marks, and a
few multi-fragment salts.
"""

CORPUS = [
    # alkanes and simple chains
    "C", "CC", "CCC", "CCCC", "CC(C)C", "CC(C)(C)C", "CCCCC", "CCCCCC",
    "CC(C)CC", "CCCCCCCC",
    # alcohols, ethers, diols
    "CO", "CCO", "CCCO", "CC(O)C", "OCC(O)CO", "COC", "CCOC", "CCOCC",
    "OCCO", "OCCCO", "CC(C)O", "COCCOC",
    # acids, esters, aldehydes, ketones
    "C(=O)O", "CC(=O)O", "CCC(=O)O", "OC(=O)C(=O)O", "CC(=O)OC",
    "CC(=O)OCC", "C=O", "CC=O", "CCC=O", "CC(=O)C", "CC(=O)CC",
    "CCOC(=O)C", "OC(=O)CCC(=O)O",
    # amines, amides, nitriles
    "CN", "CCN", "CCCN", "CN(C)C", "CCNCC", "NCCO", "CC(=O)N", "CC(=O)NC",
    "C#N", "CC#N", "CCC#N", "NCCN",
    # alkenes, alkynes, conjugation
    "C=C", "CC=C", "C#C", "CC#C", "C=CC=C", "CC=CC", "C=CCC=C", "CC=C(C)C",
    # halides
    "CCl", "CCCl", "CBr", "CCBr", "CI", "CF", "FC(F)F", "ClC(Cl)Cl",
    "FC(F)(F)C", "ClCCCl", "BrCCBr", "FCC(F)F",
    # benzenoids
    "c1ccccc1", "Cc1ccccc1", "CCc1ccccc1", "Oc1ccccc1", "Nc1ccccc1",
    "Clc1ccccc1", "c1ccccc1C(=O)O", "c1ccccc1C=O", "C=Cc1ccccc1",
    "COc1ccccc1", "[O-][N+](=O)c1ccccc1", "Cc1ccc(C)cc1", "Cc1ccccc1C",
    "Fc1ccccc1", "Brc1ccccc1", "Cc1ccc(O)cc1", "Oc1ccccc1O",
    # polycyclics and biphenyl
    "c1ccc2ccccc2c1", "C1Cc2ccccc2C1", "C1CCc2ccccc2C1",
    "c1ccccc1-c1ccccc1", "c1ccc2cc3ccccc3cc2c1",
    # heteroaromatics
    "c1ccncc1", "c1cncnc1", "c1cc[nH]c1", "c1ccoc1", "c1ccsc1",
    "c1cnc[nH]1", "c1ccc2ncccc2c1", "Cc1ccncc1", "c1ccc2[nH]ccc2c1",
    "c1cnccn1",
    # saturated rings
    "C1CC1", "C1CCC1", "C1CCCC1", "C1CCCCC1", "C1CCCCCC1", "C1CCOC1",
    "C1CCOCC1", "C1CCNCC1", "O1CCNCC1", "C1CNCCN1", "O=C1CCCCC1",
    "OC1CCCCC1", "CC1CCCCC1", "C1CCSCC1",
    # sulfur and phosphorus
    "CS", "CCS", "CSC", "CS(=O)C", "CS(=O)(=O)C", "CCSSCC", "CSCC",
    "COP(=O)(OC)OC", "CP(C)C",
    # small drugs
    "CC(=O)Oc1ccccc1C(=O)O", "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "CC(=O)Nc1ccc(O)cc1", "CCOC(=O)c1ccc(N)cc1", "OC(=O)c1ccccc1O",
    "CN1CCCC1c1cccnc1", "OCC1OC(O)C(O)C(O)C1O",
    # isotopes and stereo
    "C[13CH2]O", "[2H]C([2H])([2H])C(=O)O", "C[C@H](N)C(=O)O",
    "C[C@@H](O)CC", "F/C=C/F", "F/C=C\\F", "C/C=C/C", "C/C=C\\C",
    # charged single fragments
    "CC(=O)[O-]", "C[N+](C)(C)C", "CC[NH3+]", "[O-]c1ccccc1",
    # salts and mixtures
    "CC(=O)[O-].[Na+]", "[Na+].[Cl-]", "C(=O)(O)[O-].[Na+]",
    "CCN.Cl", "[O-2].[O-2].[Mg+2].[Ca+2]",
]
