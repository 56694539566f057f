"""Monte Carlo evaluation of the classic and improved variance estimators.

A case fixes one science table (drawn from a generator or given explicitly),
then repeatedly draws complete randomizations and records, per replicate, the
point estimate and both variance estimates. Every replicate owns a random
substream keyed by ``(master_seed, case_id, replicate)``, so results do not
depend on how replicates are split across worker processes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Union

import numpy as np

from .contrasts import check_effect
from .estimators import (
    Design,
    ObservedSummary,
    classic_from_counts,
    effect_from_means,
    lower_bound_correction,
    normal_quantile,
    sharp_lower_bound,
    true_sampling_variance,
)
from .outcomes import JointDistribution, PotentialOutcomeTable, s2_tau_from_counts, to_joint, to_table

THREADS_ENV = "NEYMAN_SHARP_THREADS"
_TABLE_STREAM = 0
_REPLICATE_STREAM = 1
_BLOCK = 2000


# -- generators --------------------------------------------------------------


@dataclass(frozen=True)
class LatentNormal:
    """Threshold a latent equicorrelated normal vector at zero."""

    mu: tuple[float, float, float, float]
    rho: float
    kind: str = field(default="latent_normal", init=False)

    def __post_init__(self):
        mu = tuple(float(v) for v in self.mu)
        if len(mu) != 4:
            raise ValueError("mu must have 4 entries")
        # -1/3 is the singular boundary of the equicorrelation matrix
        if not (-1.0 / 3.0 - 1e-12 <= self.rho < 1.0):
            raise ValueError(f"rho must lie in [-1/3, 1), got {self.rho!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "rho", float(self.rho))


@dataclass(frozen=True)
class SparseMultinomial:
    """Dirichlet-like cell weights with a heavy all-zero cell, then a multinomial draw."""

    lambda1: float = 30.0
    kind: str = field(default="sparse_multinomial", init=False)

    def __post_init__(self):
        if not self.lambda1 > 0:
            raise ValueError(f"lambda1 must be positive, got {self.lambda1!r}")


@dataclass(frozen=True)
class ExplicitJoint:
    counts: tuple[int, ...]
    kind: str = field(default="explicit_joint", init=False)

    def __post_init__(self):
        object.__setattr__(self, "counts", JointDistribution(self.counts).counts)


GeneratorSpec = Union[LatentNormal, SparseMultinomial, ExplicitJoint]


def generator_to_dict(gen: GeneratorSpec) -> dict:
    return asdict(gen) | {"kind": gen.kind}


def generator_from_dict(d: dict) -> GeneratorSpec:
    d = dict(d)
    kind = d.pop("kind", None)
    d.pop("n", None)
    if kind == "latent_normal":
        return LatentNormal(tuple(d["mu"]), d["rho"])
    if kind == "sparse_multinomial":
        return SparseMultinomial(float(d.get("lambda1", 30.0)))
    if kind == "explicit_joint":
        return ExplicitJoint(tuple(d["counts"]))
    raise ValueError(f"unknown generator kind {kind!r}")


def latent_sqrt_cov(rho: float) -> np.ndarray:
    """Symmetric square root of (1 - rho) I + rho J for 4 arms.

    The equicorrelation matrix has eigenvalue 1 + 3 rho on the all-ones
    direction (projector P = J / 4) and 1 - rho on its complement.
    """
    P = np.full((4, 4), 0.25)
    return math.sqrt(max(1.0 + 3.0 * rho, 0.0)) * P + math.sqrt(1.0 - rho) * (np.eye(4) - P)


def gen_latent_normal(N: int, mu, rho: float, rng: np.random.Generator) -> PotentialOutcomeTable:
    spec = LatentNormal(tuple(mu), rho)
    eta = np.asarray(spec.mu) + rng.standard_normal((N, 4)) @ latent_sqrt_cov(spec.rho)
    return PotentialOutcomeTable((eta >= 0).astype(np.int8))


def gen_sparse_multinomial(N: int, lambda1: float, rng: np.random.Generator) -> JointDistribution:
    spec = SparseMultinomial(lambda1)
    weights = np.concatenate([[spec.lambda1], rng.uniform(0.0, 1.0, size=15)])
    return JointDistribution(tuple(rng.multinomial(N, weights / weights.sum())))


def materialize(gen: GeneratorSpec, N: int, rng: np.random.Generator) -> JointDistribution:
    if isinstance(gen, ExplicitJoint):
        joint = JointDistribution(gen.counts)
        if joint.N != N:
            raise ValueError(f"explicit joint has {joint.N} units but the design assigns {N}")
        return joint
    if isinstance(gen, LatentNormal):
        return to_joint(gen_latent_normal(N, gen.mu, gen.rho, rng))
    if isinstance(gen, SparseMultinomial):
        return gen_sparse_multinomial(N, gen.lambda1, rng)
    raise TypeError(f"not a generator spec: {gen!r}")


# -- assignment ----------------------------------------------------------------


def assign(design: Design, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random complete randomization: arm label (0..3) per unit."""
    return rng.permutation(np.repeat(np.arange(4), design.arm_sizes))


def observe(table: PotentialOutcomeTable, assignment) -> ObservedSummary:
    labels = np.asarray(assignment)
    if labels.shape != (table.N,):
        raise ValueError(f"assignment has shape {labels.shape}, table has {table.N} units")
    if labels.min() < 0 or labels.max() > 3:
        raise ValueError("arm labels must be 0..3")
    y = table.rows[np.arange(table.N), labels].astype(np.int64)
    n = np.bincount(labels, minlength=4)
    n_obs = np.bincount(labels, weights=y, minlength=4).astype(np.int64)
    return ObservedSummary(tuple(n), tuple(n_obs))


def replicate_rng(master_seed: int, case_id: int, replicate: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(case_id, _REPLICATE_STREAM, replicate))
    return np.random.Generator(np.random.PCG64(ss))


def table_rng(master_seed: int, case_id: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(case_id, _TABLE_STREAM))
    return np.random.Generator(np.random.PCG64(ss))


def _replicate_block(args) -> np.ndarray:
    rows, arm_sizes, master_seed, case_id, start, stop = args
    N = rows.shape[0]
    base = np.repeat(np.arange(4), arm_sizes)
    idx = np.arange(N)
    out = np.empty((stop - start, 4), dtype=np.int64)
    for k, r in enumerate(range(start, stop)):
        labels = replicate_rng(master_seed, case_id, r).permutation(base)
        out[k] = np.bincount(labels, weights=rows[idx, labels], minlength=4)
    return out


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


def simulate_counts(
    joint: JointDistribution,
    design: Design,
    replicates: int,
    master_seed: int = 0,
    case_id: int = 0,
    workers: int | None = None,
) -> np.ndarray:
    """Observed success counts per arm, one row per replicate, in replicate order."""
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    rows = to_table(joint).rows.astype(np.int64)
    jobs = [
        (rows, design.arm_sizes, master_seed, case_id, s, min(s + _BLOCK, replicates))
        for s in range(0, replicates, _BLOCK)
    ]
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(jobs) == 1:
        blocks = [_replicate_block(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_replicate_block, jobs))
    return np.concatenate(blocks, axis=0)


# -- summaries -----------------------------------------------------------------


@dataclass(frozen=True)
class ReplicateEstimates:
    tau_hat: np.ndarray
    var_classic: np.ndarray
    var_improved: np.ndarray
    z: float

    @property
    def half_classic(self) -> np.ndarray:
        return self.z * np.sqrt(self.var_classic)

    @property
    def half_improved(self) -> np.ndarray:
        return self.z * np.sqrt(self.var_improved)


def replicate_estimates(counts: np.ndarray, design: Design, l: int, level: float = 0.95) -> ReplicateEstimates:
    n = np.array(design.arm_sizes, dtype=float)
    tau_hat = effect_from_means(counts / n, l)
    vc = classic_from_counts(n, counts)
    vi = np.maximum(vc - lower_bound_correction(tau_hat, design.N), 0.0)
    return ReplicateEstimates(tau_hat, vc, vi, normal_quantile(level))


@dataclass(frozen=True)
class CaseSummary:
    case_id: int
    label: str
    effect: int
    tau: float
    s2_tau: float
    s2_lb: float
    true_variance: float
    voe_classic: float | None
    voe_improved: float | None
    len_classic: float
    len_improved: float
    cover_classic: float
    cover_improved: float
    se_cover_classic: float
    se_cover_improved: float
    replicates: int
    dominance_violations: int
    counts: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["counts"] = list(self.counts)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CaseSummary":
        d = dict(d)
        d["counts"] = tuple(d.get("counts", ()))
        return cls(**d)


def _mean(x: np.ndarray) -> float:
    return math.fsum(x.tolist()) / len(x)


def summarize(
    joint: JointDistribution,
    design: Design,
    est: ReplicateEstimates,
    l: int,
    case_id: int = 0,
    label: str = "",
) -> CaseSummary:
    N = joint.N
    tau = float(effect_from_means(joint.arm_means(), l))
    s2 = s2_tau_from_counts(joint, l)
    truth = true_sampling_variance(joint, design, l)
    R = len(est.tau_hat)

    hc, hi = est.half_classic, est.half_improved
    cov_c = (est.tau_hat - hc <= tau) & (tau <= est.tau_hat + hc)
    cov_i = (est.tau_hat - hi <= tau) & (tau <= est.tau_hat + hi)
    # improved interval shares the center, so dominance reduces to the variances
    violations = int(np.sum(est.var_improved > est.var_classic))
    cc, ci = _mean(cov_c.astype(float)), _mean(cov_i.astype(float))

    def voe(v):
        return None if truth == 0.0 else 100.0 * (_mean(v) / truth - 1.0)

    return CaseSummary(
        case_id=case_id,
        label=label,
        effect=l,
        tau=tau,
        s2_tau=s2,
        s2_lb=sharp_lower_bound(tau, N),
        true_variance=truth,
        voe_classic=voe(est.var_classic),
        voe_improved=voe(est.var_improved),
        len_classic=_mean(2 * hc),
        len_improved=_mean(2 * hi),
        cover_classic=cc,
        cover_improved=ci,
        se_cover_classic=math.sqrt(cc * (1 - cc) / R),
        se_cover_improved=math.sqrt(ci * (1 - ci) / R),
        replicates=R,
        dominance_violations=violations,
        counts=joint.counts,
    )


@dataclass(frozen=True)
class SimulationConfig:
    generator: GeneratorSpec
    design: Design = Design((200, 200, 200, 200))
    replicates: int = 10_000
    ci_level: float = 0.95
    master_seed: int = 0
    effects: tuple[int, ...] = (1,)
    case_id: int = 0
    label: str = ""

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        for l in self.effects:
            check_effect(l)
        normal_quantile(self.ci_level)


def run_case(config: SimulationConfig, workers: int | None = None) -> list[CaseSummary]:
    """Draw (or take) the science table, replicate assignments, summarize per effect."""
    joint = materialize(config.generator, config.design.N, table_rng(config.master_seed, config.case_id))
    counts = simulate_counts(
        joint, config.design, config.replicates, config.master_seed, config.case_id, workers
    )
    return [
        summarize(
            joint,
            config.design,
            replicate_estimates(counts, config.design, l, config.ci_level),
            l,
            config.case_id,
            config.label,
        )
        for l in config.effects
    ]


# -- campaigns -------------------------------------------------------------------


@dataclass(frozen=True)
class Campaign:
    cases: tuple[tuple[str, GeneratorSpec], ...]
    design: Design = Design((200, 200, 200, 200))
    replicates: int = 10_000
    ci_level: float = 0.95
    master_seed: int = 0
    effects: tuple[int, ...] = (1,)

    def configs(self) -> list[SimulationConfig]:
        return [
            SimulationConfig(gen, self.design, self.replicates, self.ci_level, self.master_seed, self.effects, i, label)
            for i, (label, gen) in enumerate(self.cases)
        ]

    def to_dict(self) -> dict:
        return {
            "design": list(self.design.arm_sizes),
            "replicates": self.replicates,
            "ci_level": self.ci_level,
            "master_seed": self.master_seed,
            "effects": list(self.effects),
            "cases": [{"label": label, "generator": generator_to_dict(g)} for label, g in self.cases],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Campaign":
        cases = []
        for i, c in enumerate(d["cases"]):
            repeat = int(c.get("repeat", 1))
            label = c.get("label", f"case{i + 1}")
            gen = generator_from_dict(c["generator"])
            for k in range(repeat):
                cases.append((label if repeat == 1 else f"{label}-{k + 1}", gen))
        if not cases:
            raise ValueError("a campaign needs at least one case")
        return cls(
            cases=tuple(cases),
            design=Design(tuple(d.get("design", (200, 200, 200, 200)))),
            replicates=int(d.get("replicates", 10_000)),
            ci_level=float(d.get("ci_level", 0.95)),
            master_seed=int(d.get("master_seed", 0)),
            effects=tuple(int(l) for l in d.get("effects", (1,))),
        )


def run_campaign(campaign: Campaign, workers: int | None = None) -> list[CaseSummary]:
    out = []
    for cfg in campaign.configs():
        out.extend(run_case(cfg, workers))
    return out


def latent_campaign(replicates: int = 10_000, master_seed: int = 0) -> Campaign:
    """The 18 published latent-normal science tables as explicit joints."""
    from .datasets import LATENT_CASES

    return Campaign(
        cases=tuple((c.id, ExplicitJoint(c.counts)) for c in LATENT_CASES),
        replicates=replicates,
        master_seed=master_seed,
    )


def fresh_latent_campaign(replicates: int = 10_000, master_seed: int = 0) -> Campaign:
    """Redraw the six mean vectors x three correlations from the latent model."""
    from .datasets import LATENT_CASES, RHO_VALUES

    return Campaign(
        cases=tuple((c.id, LatentNormal(c.mu, RHO_VALUES[c.rho])) for c in LATENT_CASES),
        replicates=replicates,
        master_seed=master_seed,
    )


def sparse_campaign(n_cases: int = 50, lambda1: float = 30.0, replicates: int = 10_000, master_seed: int = 0) -> Campaign:
    return Campaign(
        cases=tuple((f"sparse-{i + 1}", SparseMultinomial(lambda1)) for i in range(n_cases)),
        replicates=replicates,
        master_seed=master_seed,
    )


# -- variance-reduction scan ---------------------------------------------------


def gamma_scan(
    design: Design = Design((100, 100, 100, 100)),
    draws: int = 5000,
    rng: np.random.Generator | None = None,
    effect: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw n_obs_j ~ floor(Uniform(0, n_j)) and return (tau_hat, gamma) per draw.

    The floor means n_obs_j never equals n_j.
    """
    check_effect(effect)
    rng = rng if rng is not None else np.random.default_rng(0)
    n = np.array(design.arm_sizes, dtype=float)
    counts = np.floor(rng.uniform(0.0, 1.0, size=(draws, 4)) * n)
    tau_hat = effect_from_means(counts / n, effect)
    vc = classic_from_counts(n, counts)
    vi = np.maximum(vc - lower_bound_correction(tau_hat, design.N), 0.0)
    g = np.divide(vc - vi, vc, out=np.zeros_like(vc), where=vc > 0)
    return tau_hat, g


def gamma_summary(gammas: np.ndarray) -> dict:
    g = np.asarray(gammas)
    return {
        "draws": int(g.size),
        "frac_below_1pct": float(np.mean(g < 0.01)),
        "frac_above_10pct": float(np.mean(g > 0.10)),
        "max": float(g.max()),
    }
