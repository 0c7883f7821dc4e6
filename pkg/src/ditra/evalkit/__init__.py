from ditra.evalkit.curves import (
    PRECISION_THRESHOLDS,
    SUCCESS_THRESHOLDS,
    auc,
    precision_curve,
    success_curve,
)
from ditra.evalkit.ope import (
    EvalResult,
    SequenceResult,
    aggregate,
    evaluate_traces,
    run_ope,
    score_sequence,
)
from ditra.evalkit.report import (
    attribute_breakdown,
    delta_table,
    plot_attention_maps,
    plot_curves,
    report,
    write_results_csv,
)

__all__ = [
    "EvalResult",
    "PRECISION_THRESHOLDS",
    "SUCCESS_THRESHOLDS",
    "SequenceResult",
    "aggregate",
    "attribute_breakdown",
    "auc",
    "delta_table",
    "evaluate_traces",
    "plot_attention_maps",
    "plot_curves",
    "precision_curve",
    "report",
    "run_ope",
    "score_sequence",
    "success_curve",
    "write_results_csv",
]
