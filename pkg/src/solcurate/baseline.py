"""Desk-scale learner and hyperparameter-selection bias harness.

The model is deliberately small: hashed circular-substructure count
features plus ridge regression, deterministic and closed-form, so that
selection experiments can run thousands of fits in seconds. The point of
the harness is protocol-level, not model-level: reporting the same number
that hyperparameter selection minimized is biased low, and the bias grows
with the number of configurations tried. ``overfit_gap_experiment``
measures that gap on zero-signal synthetic data; ``hpo_select`` runs the
naive and nested protocols on real tables.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .dataset import DataTable, SolubilityRecord
from .folds import EARLYSTOP, TRAIN, FoldPlan
from .metrics import EvalPair
from .molparse import MolGraph, attached_hydrogens, parse_smiles
from .rng import SplitMix64, shuffled
from .standardize import strip_salts
from .elements import atomic_number

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
# FNV-1a 64-bit over whole integers (one step per value, not per byte):
# stable across processes, unlike Python's salted hash()
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
# multiply-shift folding constant (odd, golden-gamma)
_FOLD_MULT = 0x9E3779B97F4A7C15


def _mix(*values: int) -> int:
    h = _FNV_OFFSET
    for v in values:
        h = ((h ^ (v & _MASK64)) * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Hashed circular-substructure counts for one molecule."""

    counts: np.ndarray
    radius: int
    n_bits: int


@dataclass(frozen=True)
class BaselineConfig:
    """One hyperparameter point: ridge strength, fingerprint radius, bits."""

    lam: float
    radius: int
    n_bits: int

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if not 0 <= self.radius <= 3:
            raise ValueError("radius must be in 0..3")
        if self.n_bits <= 0 or self.n_bits & (self.n_bits - 1):
            raise ValueError("n_bits must be a power of two")


@dataclass(frozen=True)
class HpoConfigSpace:
    configs: tuple[BaselineConfig, ...]

    def __post_init__(self):
        if not self.configs:
            raise ValueError("config space must be non-empty")
        if len(set(self.configs)) != len(self.configs):
            raise ValueError("config space contains duplicates")

    @classmethod
    def grid(cls, lambdas, radii, bit_sizes) -> "HpoConfigSpace":
        return cls(tuple(
            BaselineConfig(lam, r, b)
            for lam in lambdas for r in radii for b in bit_sizes
        ))


class DimensionMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# featurization
# ---------------------------------------------------------------------------

def featurize(g: MolGraph, radius: int = 2, n_bits: int = 256) -> FeatureVector:
    """Count-fingerprint a molecule.

    Every atom contributes one identifier per shell r = 0..radius. The
    radius-0 identifier mixes the same invariants the canonicalizer starts
    from (element, degree, charge, attached H, aromatic flag); each larger
    shell mixes the previous identifier with the sorted (bond order,
    neighbor identifier) multiset. Identifiers fold into the ``n_bits``
    buckets by multiply-shift; collisions are accepted.
    """
    if n_bits <= 0 or n_bits & (n_bits - 1):
        raise ValueError("n_bits must be a power of two")
    shift = 64 - n_bits.bit_length() + 1  # top log2(n_bits) bits
    counts = np.zeros(n_bits, dtype=np.int64)

    ids = [
        _mix(
            atomic_number(a.element),
            g.degree(i),
            a.formal_charge,
            attached_hydrogens(g, i),
            int(a.aromatic),
        )
        for i, a in enumerate(g.atoms)
    ]
    neighbor_orders = [
        [(int(g.bonds[bi].order), j) for j, bi in g.adjacency[i]]
        for i in range(len(g.atoms))
    ]
    for r in range(radius + 1):
        if r > 0:
            ids = [
                _mix(ids[i], *sorted(_mix(order, ids[j]) for order, j in nbrs))
                for i, nbrs in enumerate(neighbor_orders)
            ]
        for ident in ids:
            counts[((ident * _FOLD_MULT) & _MASK64) >> shift] += 1
    return FeatureVector(counts=counts, radius=radius, n_bits=n_bits)


# ---------------------------------------------------------------------------
# ridge regression
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RidgeModel:
    coefficients: np.ndarray
    intercept: float
    lam: float
    rank_deficient: bool = False

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.coefficients + self.intercept


def fit_ridge(
    X: np.ndarray,
    y: np.ndarray,
    sample_weights: np.ndarray | None = None,
    lam: float = 0.0,
) -> RidgeModel:
    """Weighted ridge with unregularized intercept, solved by augmented-row
    least squares (SVD-backed lstsq, never an explicit inverse).

    Minimizes sum s_i (y_i - x_i.beta - b)^2 + lam * ||beta||^2. A singular
    system is only possible at lam = 0; it is reported on the model, not
    raised, and the minimum-norm solution is returned.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch("X must be 2-D")
    n, p = X.shape
    if y.shape != (n,):
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({n},)")
    if sample_weights is None:
        s = np.ones(n)
    else:
        s = np.asarray(sample_weights, dtype=float)
        if s.shape != (n,):
            raise DimensionMismatch(f"weights have shape {s.shape}, expected ({n},)")
        if np.any(s < 0):
            raise ValueError("sample weights must be non-negative")
    if lam < 0:
        raise ValueError("lam must be >= 0")

    root = np.sqrt(s)
    top = np.hstack([root[:, None] * X, root[:, None]])
    bottom = np.hstack([np.sqrt(lam) * np.eye(p), np.zeros((p, 1))])
    a = np.vstack([top, bottom])
    b = np.concatenate([root * y, np.zeros(p)])
    solution, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)

    deficient = rank < p + 1
    if deficient:
        logger.warning("ridge system is rank-deficient (lam=%g); minimum-norm fit", lam)
    return RidgeModel(
        coefficients=solution[:p],
        intercept=float(solution[p]),
        lam=lam,
        rank_deficient=bool(deficient),
    )


# ---------------------------------------------------------------------------
# cross-validated evaluation
# ---------------------------------------------------------------------------

FeatureCache = dict[tuple[str, int, int], np.ndarray]


def _molecule_counts(
    rec: SolubilityRecord, radius: int, n_bits: int, cache: FeatureCache
) -> np.ndarray:
    key = rec.key.plain_key if rec.key is not None else rec.raw_smiles
    cached = cache.get((key, radius, n_bits))
    if cached is None:
        g = strip_salts(parse_smiles(rec.raw_smiles))
        cached = featurize(g, radius, n_bits).counts.astype(float)
        cache[(key, radius, n_bits)] = cached
    return cached


def _design(records, radius, n_bits, cache) -> np.ndarray:
    return np.vstack([_molecule_counts(r, radius, n_bits, cache) for r in records])


def _fit_records(records, config: BaselineConfig, cache: FeatureCache) -> RidgeModel:
    X = _design(records, config.radius, config.n_bits, cache)
    y = np.array([r.value for r in records])
    w = np.array([r.weight for r in records])
    return fit_ridge(X, y, w, config.lam)


def _predict_records(model, records, config, cache) -> list[EvalPair]:
    X = _design(records, config.radius, config.n_bits, cache)
    preds = model.predict(X)
    return [
        EvalPair(
            molecule_key=r.key.plain_key if r.key else r.raw_smiles,
            predicted=float(p),
            observed=r.value,
            weight=r.weight,
        )
        for r, p in zip(records, preds)
    ]


def evaluate_cv(
    t: DataTable,
    plan: FoldPlan,
    config: BaselineConfig,
    feature_cache: FeatureCache | None = None,
) -> list[list[EvalPair]]:
    """Per-fold out-of-fold predictions.

    Fold models fit on the complement's train-role records only; the
    early-stop slice is held out untouched (ridge needs no early stopping,
    but keeping the geometry means exported splits match what a deep model
    would see). Concatenating the per-fold lists covers every record
    exactly once.
    """
    cache: FeatureCache = feature_cache if feature_cache is not None else {}
    out: list[list[EvalPair]] = []
    for f in range(plan.k):
        train, eval_recs = [], []
        for r in t.records:
            fold = plan.assignment[r.key.plain_key]
            if fold == f:
                eval_recs.append(r)
            elif plan.role[r.key.plain_key] == TRAIN:
                train.append(r)
        if not eval_recs:
            out.append([])
            continue
        model = _fit_records(train, config, cache)
        out.append(_predict_records(model, eval_recs, config, cache))
    return out


def _pooled_rmse(per_fold: list[list[EvalPair]]) -> float:
    deltas = np.array([
        p.predicted - p.observed for pairs in per_fold for p in pairs
    ])
    return float(np.sqrt(np.mean(deltas * deltas)))


# ---------------------------------------------------------------------------
# hyperparameter selection protocols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HpoResult:
    protocol: str
    chosen: BaselineConfig
    reported_rmse: float
    holdout_rmse: float
    fold_choices: tuple[BaselineConfig, ...] | None = None


def _restrict_plan(plan: FoldPlan, keys: set[str]) -> FoldPlan:
    return FoldPlan(
        k=plan.k,
        seed=plan.seed,
        assignment={k: f for k, f in plan.assignment.items() if k in keys},
        role={k: r for k, r in plan.role.items() if k in keys},
    )


def hpo_select(
    t: DataTable,
    plan: FoldPlan,
    space: HpoConfigSpace,
    protocol: str = "naive",
    seed: int = 0,
    feature_cache: FeatureCache | None = None,
) -> HpoResult:
    """Select a configuration and report its error, two ways.

    A 20% molecule slice (splitmix64-shuffled tail) is carved off first and
    never touches selection; both protocols report ``holdout_rmse`` from a
    model fit on the full remaining slice with the chosen config.

    naive: pick the config whose cross-validated pooled RMSE on the
    remaining 80% is smallest and report THAT SAME NUMBER. This is the
    biased protocol under study.

    nested: per outer fold, pick a config by pooled inner CV over the nine
    remaining folds, predict the outer fold with it, and report the pooled
    RMSE of those outer predictions; the config reported as chosen (and
    used on the holdout) is the most frequent per-fold choice.
    """
    if protocol not in ("naive", "nested"):
        raise ValueError(f"unknown protocol {protocol!r}")
    cache: FeatureCache = feature_cache if feature_cache is not None else {}

    keys = sorted({r.key.plain_key for r in t.records})
    order = shuffled(keys, seed)
    n_hold = max(1, int(len(order) * 0.2 + 0.5))
    hold_keys = set(order[len(order) - n_hold:])
    select_keys = set(order[:len(order) - n_hold])

    selection = DataTable(
        name=f"{t.name}.selection",
        records=tuple(r for r in t.records if r.key.plain_key in select_keys),
    )
    holdout = tuple(r for r in t.records if r.key.plain_key in hold_keys)
    rplan = _restrict_plan(plan, select_keys)

    if protocol == "naive":
        scores = [
            _pooled_rmse(evaluate_cv(selection, rplan, cfg, cache))
            for cfg in space.configs
        ]
        best = int(np.argmin(scores))
        chosen = space.configs[best]
        reported = scores[best]
        fold_choices = None
    else:
        outer_pairs: list[list[EvalPair]] = []
        choices: list[BaselineConfig] = []
        by_fold: dict[int, list[SolubilityRecord]] = {f: [] for f in range(rplan.k)}
        train_by_fold: dict[int, list[SolubilityRecord]] = {f: [] for f in range(rplan.k)}
        for r in selection.records:
            f = rplan.assignment[r.key.plain_key]
            by_fold[f].append(r)
            if rplan.role[r.key.plain_key] == TRAIN:
                train_by_fold[f].append(r)
        for f in range(rplan.k):
            if not by_fold[f]:
                continue
            inner_folds = [g for g in range(rplan.k) if g != f and by_fold[g]]
            inner_scores = []
            for cfg in space.configs:
                pairs: list[list[EvalPair]] = []
                for g in inner_folds:
                    train = [r for h in inner_folds if h != g for r in by_fold[h]]
                    model = _fit_records(train, cfg, cache)
                    pairs.append(_predict_records(model, by_fold[g], cfg, cache))
                inner_scores.append(_pooled_rmse(pairs))
            cfg = space.configs[int(np.argmin(inner_scores))]
            choices.append(cfg)
            outer_train = [r for g in range(rplan.k) if g != f for r in train_by_fold[g]]
            model = _fit_records(outer_train, cfg, cache)
            outer_pairs.append(_predict_records(model, by_fold[f], cfg, cache))
        reported = _pooled_rmse(outer_pairs)
        counted = Counter(choices)
        top = max(counted.values())
        chosen = next(c for c in space.configs if counted.get(c, 0) == top)
        fold_choices = tuple(choices)

    final_model = _fit_records(list(selection.records), chosen, cache)
    holdout_pairs = _predict_records(final_model, list(holdout), chosen, cache)
    holdout_rmse = _pooled_rmse([holdout_pairs])
    return HpoResult(
        protocol=protocol,
        chosen=chosen,
        reported_rmse=reported,
        holdout_rmse=holdout_rmse,
        fold_choices=fold_choices,
    )


# ---------------------------------------------------------------------------
# zero-signal gap experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapRow:
    config_count: int
    mean_gap: float
    se_gap: float
    trials: int


def overfit_gap_experiment(
    n_samples: int = 200,
    n_features: int = 50,
    config_counts: list[int] = (1, 4, 16, 64),
    trials: int = 50,
    seed: int = 0,
) -> list[GapRow]:
    """Measure selection bias as a function of configuration count.

    Each trial draws pure-noise targets (no signal at all), carves a 20%
    holdout, scores every config of one master list by 5-fold CV on the
    rest, and for each requested count c takes the best config among the
    first c. The gap is (fresh-holdout RMSE of the chosen config, refit on
    the full selection slice) minus (the naive reported CV minimum). With
    one config there is no selection pressure and the gap is centered on
    zero; with many it goes positive.

    Configs differ in ridge strength and in which half of the features they
    see (a deterministic per-config pseudo-random mask), which keeps their
    CV estimates from being perfectly correlated. Count lists are nested
    prefixes, so the per-trial gaps are paired across counts.
    """
    if trials < 20:
        raise ValueError("trials must be >= 20")
    counts = sorted(set(int(c) for c in config_counts))
    if counts[0] < 1:
        raise ValueError("config counts must be >= 1")
    c_max = counts[-1]
    lam_grid = (1e-4, 1e-2, 1.0, 100.0)

    half = max(1, n_features // 2)
    masks = []
    for ci in range(c_max):
        picked = shuffled(list(range(n_features)), _mix(seed, ci))[:half]
        masks.append(np.array(sorted(picked)))
    lams = [lam_grid[ci % len(lam_grid)] for ci in range(c_max)]

    rng = np.random.default_rng(seed)
    n_hold = int(n_samples * 0.2 + 0.5)
    n_sel = n_samples - n_hold
    fold_edges = np.linspace(0, n_sel, 6, dtype=int)

    gaps = {c: np.empty(trials) for c in counts}
    for trial in range(trials):
        X = rng.standard_normal((n_samples, n_features))
        y = rng.standard_normal(n_samples)
        Xs, ys = X[:n_sel], y[:n_sel]
        Xh, yh = X[n_sel:], y[n_sel:]

        cv_scores = np.empty(c_max)
        hold_scores = np.empty(c_max)
        for ci in range(c_max):
            cols = masks[ci]
            sq_sum = 0.0
            for f in range(5):
                lo, hi = fold_edges[f], fold_edges[f + 1]
                test = slice(lo, hi)
                train_rows = np.r_[0:lo, hi:n_sel]
                model = fit_ridge(Xs[train_rows][:, cols], ys[train_rows], lam=lams[ci])
                resid = model.predict(Xs[test][:, cols]) - ys[test]
                sq_sum += float(np.sum(resid * resid))
            cv_scores[ci] = np.sqrt(sq_sum / n_sel)
            full = fit_ridge(Xs[:, cols], ys, lam=lams[ci])
            resid = full.predict(Xh[:, cols]) - yh
            hold_scores[ci] = np.sqrt(np.mean(resid * resid))

        for c in counts:
            best = int(np.argmin(cv_scores[:c]))
            gaps[c][trial] = hold_scores[best] - cv_scores[best]

    rows = []
    for c in counts:
        g = gaps[c]
        rows.append(GapRow(
            config_count=c,
            mean_gap=float(np.mean(g)),
            se_gap=float(np.std(g, ddof=1) / np.sqrt(trials)),
            trials=trials,
        ))
    return rows
