"""Sharpened Neymanian inference for 2x2 factorial experiments with binary outcomes."""

__version__ = "0.1.0"

from .contrasts import EFFECTS, Contrast, contrast, model_matrix  # noqa: E402
from .estimators import (  # noqa: E402
    Design,
    EffectReport,
    ObservedSummary,
    classic_variance,
    confidence_interval,
    effect_report,
    estimate_effect,
    expected_overestimation,
    gamma,
    improved_variance,
    population_effect,
    sharp_lower_bound,
    true_sampling_variance,
)
from .outcomes import (  # noqa: E402
    JointDistribution,
    PotentialOutcomeTable,
    monotonicity_status,
    s2_tau_direct,
    s2_tau_from_counts,
    subset_count,
    to_joint,
    to_table,
)

__all__ = [
    "EFFECTS",
    "Contrast",
    "Design",
    "EffectReport",
    "JointDistribution",
    "ObservedSummary",
    "PotentialOutcomeTable",
    "classic_variance",
    "confidence_interval",
    "contrast",
    "effect_report",
    "estimate_effect",
    "expected_overestimation",
    "gamma",
    "improved_variance",
    "model_matrix",
    "monotonicity_status",
    "population_effect",
    "s2_tau_direct",
    "s2_tau_from_counts",
    "sharp_lower_bound",
    "subset_count",
    "to_joint",
    "to_table",
    "true_sampling_variance",
]
