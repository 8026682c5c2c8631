"""Human-steered data-quality improvement for tabular ML datasets.

The package scores data-quality dimensions, runs reversible improvement
procedures (imputation, outlier treatment, deletion, standardization,
deduplication, feature selection), tests procedure outputs for
distribution drift, evaluates model impact with built-in learners, and
drives it all through an interactive session engine exposed over HTTP
and a batch CLI.
"""

__version__ = "0.1.0"

from .dimensions import (DimensionScores, QualityConfig, QualityReport,
                         completeness, consistency, outlier_freedom,
                         quality_report, uniqueness, validity)
from .drift import (CategoricalDrift, KsResult, StructuralChange,
                    drift_report, ks_pvalue, ks_statistic)
from .errors import DqError
from .modeling import EvalConfig, EvalReport, compare_performance, cross_validate
from .procedures import (ProcedureResult, ProcedureSpec, method_schema,
                         run_procedure, validate_spec)
from .session import (RankedCandidate, Session, SessionConfig, load_session,
                      save_session)
from .tabular import (MISSING, ColumnSchema, Dataset, IngestWarning,
                      column_stats, ingest_csv, snapshot_hash)

__all__ = [
    "__version__", "MISSING", "ColumnSchema", "Dataset", "IngestWarning",
    "column_stats", "ingest_csv", "snapshot_hash", "DqError",
    "DimensionScores", "QualityConfig", "QualityReport", "completeness",
    "consistency", "outlier_freedom", "quality_report", "uniqueness",
    "validity", "CategoricalDrift", "KsResult", "StructuralChange",
    "drift_report", "ks_pvalue", "ks_statistic", "EvalConfig", "EvalReport",
    "compare_performance", "cross_validate", "ProcedureResult",
    "ProcedureSpec", "method_schema", "run_procedure", "validate_spec",
    "RankedCandidate", "Session", "SessionConfig", "load_session",
    "save_session",
]
