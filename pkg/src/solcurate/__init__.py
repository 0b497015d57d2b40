"""solcurate: curation and evaluation toolkit for solubility datasets."""

__version__ = "0.1.0"

from .dataset import ColumnMap, DataTable, SolubilityRecord, emit_csv, ingest_csv, protocol_filter
from .dedupe import CleanReport, assign_intra_weights, clean_set
from .curate import CurationConfig, DEFAULT_QUALITY_WEIGHTS, curate_target, curation_summary
from .folds import FoldPlan, assign_folds, materialize_split
from .metrics import (
    EvalPair,
    MetricReport,
    bootstrap_ci,
    cu_rmse,
    cu_rmse_error_weighted,
    format_report,
    rmse,
)
from .molparse import MolGraph, components, parse_smiles, write_smiles
from .standardize import (
    Classification,
    StructureKey,
    canonical_key,
    classify_organic,
    neutralize,
    record_key,
    standardize_smiles,
    strip_salts,
)

__all__ = [
    "__version__",
    "ColumnMap", "DataTable", "SolubilityRecord", "emit_csv", "ingest_csv", "protocol_filter",
    "CleanReport", "assign_intra_weights", "clean_set",
    "CurationConfig", "DEFAULT_QUALITY_WEIGHTS", "curate_target", "curation_summary",
    "FoldPlan", "assign_folds", "materialize_split",
    "EvalPair", "MetricReport", "bootstrap_ci", "cu_rmse", "cu_rmse_error_weighted",
    "format_report", "rmse",
    "MolGraph", "components", "parse_smiles", "write_smiles",
    "Classification", "StructureKey", "canonical_key", "classify_organic",
    "neutralize", "record_key", "standardize_smiles", "strip_salts",
]
