"""Science tables, the 16-cell joint distribution and the effect-variance identities.

A science table holds the four binary potential outcomes of every unit. Its
sufficient summary is the joint distribution vector ``D``: the number of units
with each outcome profile ``(k1, k2, k3, k4)``, indexed by the integer whose
binary digits are ``k1 k2 k3 k4`` (``k1`` most significant).
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .contrasts import contrast

#: Row k is the outcome profile of joint-distribution cell k.
PROFILES = np.array([[(k >> (3 - j)) & 1 for j in range(4)] for k in range(16)], dtype=np.int64)
PROFILES.setflags(write=False)

ARMS = (1, 2, 3, 4)


def profile_index(profile: Sequence[int]) -> int:
    k1, k2, k3, k4 = (int(v) for v in profile)
    return 8 * k1 + 4 * k2 + 2 * k3 + k4


def cell_label(k: int) -> str:
    return "D" + "".join(str(int(v)) for v in PROFILES[k])


@dataclass(frozen=True, eq=False)
class PotentialOutcomeTable:
    """N x 4 binary matrix; row i holds Y_i(z_1), ..., Y_i(z_4)."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows)
        if rows.ndim != 2 or rows.shape[1] != 4:
            raise ValueError(f"expected an N x 4 matrix, got shape {rows.shape}")
        if rows.shape[0] < 1:
            raise ValueError("a science table needs at least one unit")
        if not np.isin(rows, (0, 1)).all():
            raise ValueError("potential outcomes must be binary")
        rows = rows.astype(np.int8)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "PotentialOutcomeTable":
        return cls(np.array([list(r) for r in rows]))

    @property
    def N(self) -> int:
        return int(self.rows.shape[0])

    def arm_means(self) -> np.ndarray:
        return self.rows.mean(axis=0)

    def __eq__(self, other):
        if not isinstance(other, PotentialOutcomeTable):
            return NotImplemented
        return np.array_equal(self.rows, other.rows)

    def __len__(self):
        return self.N


@dataclass(frozen=True)
class JointDistribution:
    """Counts D_0000 .. D_1111 of units per outcome profile."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != 16:
            raise ValueError(f"a joint distribution has 16 cells, got {len(counts)}")
        if any(c < 0 for c in counts):
            raise ValueError("joint-distribution counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def N(self) -> int:
        return sum(self.counts)

    def as_array(self) -> np.ndarray:
        return np.array(self.counts, dtype=np.int64)

    def marginals(self) -> tuple[int, int, int, int]:
        """N_1 .. N_4: units with outcome 1 under each arm."""
        m = self.as_array() @ PROFILES
        return tuple(int(v) for v in m)

    def arm_means(self) -> np.ndarray:
        return np.array(self.marginals(), dtype=float) / self.N

    def __iter__(self):
        return iter(self.counts)


def to_joint(table: PotentialOutcomeTable) -> JointDistribution:
    idx = table.rows.astype(np.int64) @ np.array([8, 4, 2, 1])
    return JointDistribution(tuple(np.bincount(idx, minlength=16)))


def to_table(joint: JointDistribution) -> PotentialOutcomeTable:
    """Expand a joint distribution into rows, cells in ascending index order."""
    if joint.N < 1:
        raise ValueError("cannot expand an empty joint distribution")
    return PotentialOutcomeTable(np.repeat(PROFILES, joint.as_array(), axis=0))


def _as_subset(subset: Iterable[int]) -> tuple[int, ...]:
    s = tuple(sorted(set(int(j) for j in subset)))
    if not s:
        raise ValueError("subset must be non-empty")
    if any(j not in ARMS for j in s):
        raise ValueError(f"arms are numbered 1..4, got {s}")
    return s


def subset_count(joint: JointDistribution, subset: Iterable[int]) -> int:
    """N_{j1..js}: units whose outcome is 1 under every arm of ``subset``."""
    cols = [j - 1 for j in _as_subset(subset)]
    mask = PROFILES[:, cols].all(axis=1)
    return int(joint.as_array()[mask].sum())


def subset_counts(joint: JointDistribution) -> dict[tuple[int, ...], int]:
    """All 15 subset counts keyed by sorted arm tuples."""
    out = {}
    for s in range(1, 5):
        for sub in combinations(ARMS, s):
            out[sub] = subset_count(joint, sub)
    return out


def unit_effects(table: PotentialOutcomeTable, l: int) -> np.ndarray:
    """tau_il = h_l' Y_i / 2 for every unit."""
    return table.rows.astype(np.int64) @ contrast(l).vector() / 2.0


def s2_tau_direct(table: PotentialOutcomeTable, l: int) -> float:
    """Sample variance (divisor N - 1) of the unit-level effects."""
    if table.N < 2:
        raise ValueError("S^2 needs at least two units")
    tau = unit_effects(table, l)
    return float(((tau - tau.mean()) ** 2).sum() / (table.N - 1))


def count_terms(joint: JointDistribution, l: int) -> tuple[int, int]:
    """Integer pieces of the count form of S^2(tau_l).

    Returns ``(q, a)`` with ``q = sum_j N_j + sum_{j != j'} h_j h_j' N_jj'`` and
    ``a = sum_j h_j N_j``. Then ``S^2 = (N q - a^2) / (4 N (N - 1))`` and the
    inclusion-exclusion inequality reads ``q >= |a|``.
    """
    h = contrast(l).h
    q = sum(subset_count(joint, (j,)) for j in ARMS)
    for j, jp in combinations(ARMS, 2):
        q += 2 * h[j - 1] * h[jp - 1] * subset_count(joint, (j, jp))
    a = sum(h[j - 1] * subset_count(joint, (j,)) for j in ARMS)
    return q, a


def s2_tau_from_counts(joint: JointDistribution, l: int) -> float:
    """S^2(tau_l) from single and pairwise subset counts."""
    N = joint.N
    if N < 2:
        raise ValueError("S^2 needs at least two units")
    q, a = count_terms(joint, l)
    # one division on exact integers
    return (N * q - a * a) / (4 * N * (N - 1))


@dataclass(frozen=True)
class Monotonicity:
    """Which of the two generalized monotonicity chains hold for every unit."""

    form1: bool
    form2: bool

    @property
    def neither(self) -> bool:
        return not (self.form1 or self.form2)

    def label(self) -> str:
        if self.form1 and self.form2:
            return "both"
        if self.form1:
            return "form1"
        if self.form2:
            return "form2"
        return "neither"


def monotonicity_status(table: PotentialOutcomeTable, l: int) -> Monotonicity:
    c = contrast(l)
    rows = table.rows.astype(np.int64)
    s_plus = rows[:, [j - 1 for j in c.plus]].sum(axis=1)
    s_minus = rows[:, [j - 1 for j in c.minus]].sum(axis=1)
    form1 = bool(np.all((s_plus - 1 <= s_minus) & (s_minus <= s_plus)))
    form2 = bool(np.all((s_plus <= s_minus) & (s_minus <= s_plus + 1)))
    return Monotonicity(form1, form2)
