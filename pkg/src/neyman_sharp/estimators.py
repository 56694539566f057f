"""Factorial-effect estimation and Neymanian variance estimation.

The count-level helpers (``effect_from_means``, ``classic_from_counts``,
``lower_bound_correction``) broadcast over leading axes so the Monte Carlo code
can evaluate thousands of replicates at once; the summary-level functions wrap
them for single experiments.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from statistics import NormalDist

import numpy as np

from .contrasts import check_effect, contrast, model_matrix
from .outcomes import JointDistribution, s2_tau_from_counts

Z_95 = 1.959964


def _as_counts(values, name: str) -> tuple[int, int, int, int]:
    vals = tuple(values)
    if len(vals) != 4:
        raise ValueError(f"{name} must have 4 entries, got {len(vals)}")
    out = []
    for v in vals:
        if isinstance(v, float) and not v.is_integer():
            raise ValueError(f"{name} must be integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


@dataclass(frozen=True)
class Design:
    """Complete randomization with fixed arm sizes n_1..n_4."""

    arm_sizes: tuple[int, int, int, int]

    def __post_init__(self):
        sizes = _as_counts(self.arm_sizes, "arm_sizes")
        if any(n < 2 for n in sizes):
            raise ValueError(f"every arm needs at least 2 units, got {sizes}")
        object.__setattr__(self, "arm_sizes", sizes)

    @classmethod
    def balanced(cls, per_arm: int) -> "Design":
        return cls((per_arm,) * 4)

    @property
    def N(self) -> int:
        return sum(self.arm_sizes)


@dataclass(frozen=True)
class ObservedSummary:
    """Per-arm sizes and success counts; every estimator is a function of these."""

    arm_sizes: tuple[int, int, int, int]
    successes: tuple[int, int, int, int]

    def __post_init__(self):
        n = _as_counts(self.arm_sizes, "arm_sizes")
        s = _as_counts(self.successes, "successes")
        if any(v < 1 for v in n):
            raise ValueError(f"arm sizes must be positive, got {n}")
        if any(not 0 <= sj <= nj for sj, nj in zip(s, n)):
            raise ValueError(f"need 0 <= n_obs <= n per arm, got n={n}, n_obs={s}")
        object.__setattr__(self, "arm_sizes", n)
        object.__setattr__(self, "successes", s)

    @property
    def N(self) -> int:
        return sum(self.arm_sizes)

    @property
    def arm_means(self) -> np.ndarray:
        return np.array(self.successes, dtype=float) / np.array(self.arm_sizes, dtype=float)


@dataclass(frozen=True)
class EffectReport:
    effect: int
    point: float
    var_classic: float
    var_improved: float
    ci_classic: tuple[float, float]
    ci_improved: tuple[float, float]
    gamma: float
    ci_level: float = 0.95

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ci_classic"] = list(self.ci_classic)
        d["ci_improved"] = list(self.ci_improved)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EffectReport":
        d = dict(d)
        d["ci_classic"] = tuple(d["ci_classic"])
        d["ci_improved"] = tuple(d["ci_improved"])
        return cls(**d)


# -- count-level, broadcasting helpers ------------------------------------


def effect_from_means(p, l: int):
    """Half the l-th contrast of arm means; ``p`` has shape (..., 4)."""
    return np.asarray(p, dtype=float) @ contrast(l).vector() / 2.0


def classic_from_counts(n, n_obs):
    n = np.asarray(n, dtype=float)
    p = np.asarray(n_obs, dtype=float) / n
    return (p * (1.0 - p) / (n - 1.0)).sum(axis=-1) / 4.0


def lower_bound_correction(tau_hat, N: int):
    """Plug-in S^2_LB / N subtracted by the improved estimator."""
    t = np.abs(np.asarray(tau_hat, dtype=float))
    return np.maximum(t * (0.5 - t), 0.0) / (N - 1)


# -- single-experiment API ------------------------------------------------


def population_effect(p, l: int) -> float:
    check_effect(l)
    p = np.asarray(p, dtype=float)
    if p.shape != (4,) or np.any((p < 0) | (p > 1)):
        raise ValueError(f"arm means must be a 4-vector in [0, 1], got {p}")
    return float(effect_from_means(p, l))


def estimate_effect(obs: ObservedSummary, l: int) -> float:
    check_effect(l)
    return float(effect_from_means(obs.arm_means, l))


def _require_estimable(obs: ObservedSummary) -> None:
    if any(n < 2 for n in obs.arm_sizes):
        raise ValueError(f"variance estimation needs n_j >= 2 in every arm, got {obs.arm_sizes}")


def classic_variance(obs: ObservedSummary) -> float:
    """Classic Neymanian estimate; identical for all three effects."""
    _require_estimable(obs)
    return float(classic_from_counts(obs.arm_sizes, obs.successes))


def sharp_lower_bound(tau: float, N: int) -> float:
    """Sharp lower bound of S^2(tau_l) given only the arm marginals."""
    if N < 2:
        raise ValueError("N must be at least 2")
    t = abs(tau)
    return N / (N - 1) * max(t * (0.5 - t), 0.0)


def improved_variance(obs: ObservedSummary, l: int) -> float:
    """Classic estimate minus the plug-in bound correction, floored at zero."""
    check_effect(l)
    classic = classic_variance(obs)
    corr = float(lower_bound_correction(estimate_effect(obs, l), obs.N))
    return max(classic - corr, 0.0)


def gamma(obs: ObservedSummary, l: int) -> float:
    """Relative variance reduction 1 - improved / classic (0 when classic is 0)."""
    classic = classic_variance(obs)
    if classic == 0.0:
        return 0.0
    return 1.0 - improved_variance(obs, l) / classic


def normal_quantile(level: float) -> float:
    """Two-sided critical value for a ``level`` confidence interval."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level!r}")
    if level == 0.95:
        return Z_95
    return NormalDist().inv_cdf((1.0 + level) / 2.0)


def confidence_interval(point: float, variance: float, level: float = 0.95) -> tuple[float, float]:
    if variance < 0:
        raise ValueError(f"variance must be non-negative, got {variance!r}")
    half = normal_quantile(level) * math.sqrt(variance)
    return (point - half, point + half)


def effect_report(obs: ObservedSummary, l: int, level: float = 0.95) -> EffectReport:
    point = estimate_effect(obs, l)
    vc = classic_variance(obs)
    vi = improved_variance(obs, l)
    return EffectReport(
        effect=l,
        point=point,
        var_classic=vc,
        var_improved=vi,
        ci_classic=confidence_interval(point, vc, level),
        ci_improved=confidence_interval(point, vi, level),
        gamma=0.0 if vc == 0.0 else 1.0 - vi / vc,
        ci_level=level,
    )


# -- population quantities ------------------------------------------------


def arm_variances(joint: JointDistribution) -> np.ndarray:
    """S_j^2 = N/(N-1) p_j (1 - p_j)."""
    N = joint.N
    if N < 2:
        raise ValueError("N must be at least 2")
    p = joint.arm_means()
    return N / (N - 1) * p * (1 - p)


def _check_design(joint: JointDistribution, design: Design) -> None:
    if joint.N != design.N:
        raise ValueError(f"table has {joint.N} units but the design assigns {design.N}")


def true_sampling_variance(joint: JointDistribution, design: Design, l: int) -> float:
    """Randomization variance of the effect estimator under complete randomization."""
    check_effect(l)
    _check_design(joint, design)
    n = np.array(design.arm_sizes, dtype=float)
    return float((arm_variances(joint) / n).sum() / 4 - s2_tau_from_counts(joint, l) / joint.N)


def expected_overestimation(
    joint: JointDistribution, design: Design, l: int
) -> tuple[float, float | None]:
    """Average bias of the classic estimator: absolute and relative to the truth.

    The relative value is ``None`` when the true sampling variance is zero.
    """
    true = true_sampling_variance(joint, design, l)
    absolute = s2_tau_from_counts(joint, l) / joint.N
    relative = None if true == 0.0 else absolute / true
    return absolute, relative


__all__ = [
    "Design",
    "EffectReport",
    "ObservedSummary",
    "Z_95",
    "arm_variances",
    "classic_from_counts",
    "classic_variance",
    "confidence_interval",
    "effect_from_means",
    "effect_report",
    "estimate_effect",
    "expected_overestimation",
    "gamma",
    "improved_variance",
    "lower_bound_correction",
    "model_matrix",
    "normal_quantile",
    "population_effect",
    "sharp_lower_bound",
    "true_sampling_variance",
]
