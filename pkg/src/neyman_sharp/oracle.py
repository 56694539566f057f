"""Brute-force ground truth at desk scale.

Everything here enumerates instead of reasoning: all joint distributions of a
given size, all joints sharing a set of arm marginals, and every complete
randomization of a small table. Results are folded with exact integer
accumulators and returned as ``Fraction`` so agreement checks can be exact.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .contrasts import EFFECTS, contrast
from .estimators import Design
from .outcomes import (
    PROFILES,
    JointDistribution,
    PotentialOutcomeTable,
    count_terms,
    monotonicity_status,
    to_joint,
    unit_effects,
)

JOINT_GUARD = 12
MARGINAL_GUARD = 16
ASSIGNMENT_GUARD = 10**7


class GuardExceeded(ValueError):
    """Raised when an enumeration would exceed its configured size guard."""


# -- joint distributions ---------------------------------------------------


def n_joints(N: int) -> int:
    return math.comb(N + 15, 15)


def _check_joint_guard(N: int, guard: int) -> None:
    if N < 0:
        raise ValueError("N must be non-negative")
    if N > guard:
        raise GuardExceeded(
            f"enumerating joints for N={N} needs {n_joints(N):,} iterations; guard is N <= {guard}"
        )


def enumerate_joints(N: int, guard: int = JOINT_GUARD) -> Iterator[JointDistribution]:
    """Every 16-cell count vector summing to N, in ascending lexicographic order."""
    _check_joint_guard(N, guard)

    def rec(cells_left: int, remaining: int):
        if cells_left == 1:
            yield (remaining,)
            return
        for v in range(remaining + 1):
            for rest in rec(cells_left - 1, remaining - v):
                yield (v,) + rest

    for counts in rec(16, N):
        yield JointDistribution(counts)


def compositions(total: int, parts: int) -> np.ndarray:
    """Every way to write ``total`` as ``parts`` ordered non-negative integers,
    one per row, in ascending lexicographic order.

    Built from stars-and-bars bar positions; lexicographic order of the bar
    positions is lexicographic order of the counts.
    """
    k = parts - 1
    bars = np.array(list(combinations(range(total + k), k)), dtype=np.int64).reshape(-1, k)
    rows = bars.shape[0]
    edges = np.concatenate(
        [np.full((rows, 1), -1, dtype=np.int64), bars, np.full((rows, 1), total + k, dtype=np.int64)],
        axis=1,
    )
    return np.diff(edges, axis=1) - 1


def joint_matrix(N: int, guard: int = JOINT_GUARD) -> np.ndarray:
    """All joints of size N as rows of an int64 array, same order as ``enumerate_joints``."""
    _check_joint_guard(N, guard)
    return compositions(N, 16)


def joints_with_marginals_matrix(
    N: int, marginals: Sequence[int], guard: int = MARGINAL_GUARD
) -> np.ndarray:
    """Every joint of size N with arm marginals N_1..N_4, one per row.

    Cells 8..15 (outcome 1 under arm 1) must hold exactly N_1 units and cells
    0..7 the other N - N_1. Each half is enumerated in full and the halves are
    paired whenever their counts for arms 2..4 add up to the target.
    """
    m = tuple(int(v) for v in marginals)
    if len(m) != 4 or any(not 0 <= v <= N for v in m):
        raise ValueError(f"marginals must be 4 integers in [0, {N}], got {marginals}")
    if N > guard:
        raise GuardExceeded(f"marginal-constrained enumeration is limited to N <= {guard}, got N={N}")
    hi = compositions(m[0], 8)
    lo = compositions(N - m[0], 8)
    rest = PROFILES[:8, 1:]  # arms 2..4 share the same pattern in both halves
    hi_m, lo_m = hi @ rest, lo @ rest
    by_key: dict[tuple[int, ...], list[int]] = {}
    for i, row in enumerate(lo_m):
        by_key.setdefault(tuple(int(v) for v in row), []).append(i)
    target = np.array(m[1:], dtype=np.int64)
    blocks = []
    for i, row in enumerate(hi_m):
        match = by_key.get(tuple(int(v) for v in target - row))
        if match:
            lo_rows = lo[match]
            hi_rows = np.broadcast_to(hi[i], lo_rows.shape)
            blocks.append(np.concatenate([lo_rows, hi_rows], axis=1))
    if not blocks:
        return np.empty((0, 16), dtype=np.int64)
    return np.concatenate(blocks, axis=0)


def enumerate_joints_with_marginals(
    N: int, marginals: Sequence[int], guard: int = MARGINAL_GUARD
) -> Iterator[JointDistribution]:
    """Joints of size N whose arm marginals N_1..N_4 equal ``marginals``."""
    for row in joints_with_marginals_matrix(N, marginals, guard):
        yield JointDistribution(tuple(row))


def sharp_bound_exact(a: int, N: int) -> Fraction:
    """Sharp lower bound on S^2(tau_l) as an exact fraction of ``a = sum_j h_j N_j``."""
    a = abs(a)
    return Fraction(max(a * (N - a), 0), 4 * N * (N - 1))


def attainable_bound(a: int, N: int) -> Fraction:
    """Exact marginal-constrained minimum of S^2(tau_l), including |tau| > 1/2.

    For |tau| <= 1/2 this equals ``sharp_bound_exact``. Beyond 1/2 the unit effects
    can only mix the lattice points 1/2 and 1, giving N/(N-1)(|tau|-1/2)(1-|tau|).
    """
    a = abs(a)
    if a <= N:
        return sharp_bound_exact(a, N)
    return Fraction((a - N) * (2 * N - a), 4 * N * (N - 1))


def min_s2_given_marginals(
    N: int, marginals: Sequence[int], guard: int = MARGINAL_GUARD
) -> dict[int, Fraction]:
    """Minimum of S^2(tau_l) over every joint with the given marginals, for l = 1, 2, 3."""
    if N < 2:
        raise ValueError("N must be at least 2")
    D = joints_with_marginals_matrix(N, marginals, guard)
    if D.shape[0] == 0:
        raise ValueError(f"no joint distribution has marginals {tuple(marginals)}")
    best = {}
    for l in EFFECTS:
        h = contrast(l).vector()
        a = int(np.asarray(marginals, dtype=np.int64) @ h)
        q = D @ ((PROFILES @ h) ** 2)
        best[l] = Fraction(int(N * q.min() - a * a), 4 * N * (N - 1))
    return best


# -- exhaustive sharpness pass ---------------------------------------------


@dataclass
class SharpnessScan:
    """Per-profile minima from one pass over every joint of size N.

    ``min_num[l][k]`` is the minimum of ``N q - a^2`` (so S^2 times 4N(N-1)) over
    joints whose marginal profile has base-(N+1) key ``k``; ``a[l][k]`` is the
    profile's contrast ``sum_j h_j N_j``.
    """

    N: int
    n_joints: int
    marginals: np.ndarray
    a: dict[int, np.ndarray]
    min_num: dict[int, np.ndarray]

    def minimum(self, l: int, k: int) -> Fraction:
        return Fraction(int(self.min_num[l][k]), 4 * self.N * (self.N - 1))


def sharpness_scan(N: int = 8, guard: int = JOINT_GUARD) -> SharpnessScan:
    D = joint_matrix(N, guard)
    M = D @ PROFILES
    base = N + 1
    keys = M @ np.array([base**3, base**2, base, 1], dtype=np.int64)
    n_profiles = base**4
    marg = np.array(
        [[(k // base**p) % base for p in (3, 2, 1, 0)] for k in range(n_profiles)], dtype=np.int64
    )
    a_out, min_out = {}, {}
    for l in EFFECTS:
        h = contrast(l).vector()
        a = M @ h
        # sum_i (h' Y_i)^2 equals q from count_terms
        q = D @ ((PROFILES @ h) ** 2)
        num = N * q - a * a
        mn = np.full(n_profiles, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(mn, keys, num)
        a_out[l] = marg @ h
        min_out[l] = mn
    return SharpnessScan(N, int(D.shape[0]), marg, a_out, min_out)


@dataclass
class Certificate:
    name: str
    passed: bool
    checked: int
    counterexamples: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "counterexamples": self.counterexamples,
            "details": self.details,
        }


def certify_sharpness(
    N: int = 8,
    bound: Callable[[int, int], Fraction] = sharp_bound_exact,
    guard: int = JOINT_GUARD,
    max_examples: int = 20,
) -> Certificate:
    """Check ``bound`` against the exhaustive per-profile minimum of S^2.

    The bound must never exceed the minimum, and must equal it wherever
    |tau_l| <= 1/2. Profiles with |tau_l| > 1/2 where the bound is valid but not
    attained are counted in ``details`` rather than failing the certificate.
    """
    scan = sharpness_scan(N, guard)
    counter, loose_beyond_half, attained_all = [], 0, True
    checked = 0
    for l in EFFECTS:
        for k in range(len(scan.marginals)):
            checked += 1
            a = int(scan.a[l][k])
            lo = bound(a, N)
            mn = scan.minimum(l, k)
            if mn != lo:
                attained_all = False
            if lo > mn or (abs(a) <= N and lo != mn):
                counter.append(
                    {
                        "effect": l,
                        "marginals": [int(v) for v in scan.marginals[k]],
                        "tau": float(Fraction(a, 2 * N)),
                        "minimum": float(mn),
                        "bound": float(lo),
                    }
                )
            elif lo != mn:
                loose_beyond_half += 1
    return Certificate(
        name="sharpness",
        passed=not counter,
        checked=checked,
        counterexamples=counter[:max_examples],
        details={
            "N": N,
            "joints_enumerated": scan.n_joints,
            "profiles": len(scan.marginals),
            "n_counterexamples": len(counter),
            "not_attained_beyond_half": loose_beyond_half,
            "attained_everywhere": attained_all,
        },
    )


# -- exact randomization distribution -------------------------------------


def n_assignments(arm_sizes: Sequence[int]) -> int:
    out = math.factorial(sum(arm_sizes))
    for n in arm_sizes:
        out //= math.factorial(n)
    return out


def assignments(arm_sizes: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Stream every distinct arrangement of arm labels 0..3 (label j repeated n_j times)."""
    remaining = [int(n) for n in arm_sizes]
    total = sum(remaining)
    current: list[int] = []

    def rec():
        if len(current) == total:
            yield tuple(current)
            return
        for j in range(4):
            if remaining[j]:
                remaining[j] -= 1
                current.append(j)
                yield from rec()
                current.pop()
                remaining[j] += 1

    yield from rec()


@dataclass(frozen=True)
class Moments:
    mean: Fraction
    variance: Fraction
    classic_ev: Fraction
    n_assignments: int


def exact_randomization_moments(
    table: PotentialOutcomeTable,
    design: Design,
    l: int,
    guard: int = ASSIGNMENT_GUARD,
    chunk: int = 65536,
) -> Moments:
    """Exact mean and variance of the effect estimator, and the exact mean of
    the classic variance estimate, over every complete randomization."""
    if table.N != design.N:
        raise ValueError(f"table has {table.N} units but the design assigns {design.N}")
    total = n_assignments(design.arm_sizes)
    if total > guard:
        raise GuardExceeded(f"{total:,} assignments exceeds the guard of {guard:,}")

    n = np.array(design.arm_sizes, dtype=np.int64)
    h = np.array(contrast(l).h, dtype=np.int64)
    # 2 L tau_hat = sum_j h_j o_j (L / n_j)
    L = math.lcm(*design.arm_sizes)
    w_tau = h * (L // n)
    # 4 M classic = sum_j o_j (n_j - o_j) (M / (n_j^2 (n_j - 1)))
    dens = [int(nj) ** 2 * (int(nj) - 1) for nj in n]
    M = math.lcm(*dens)
    w_cls = np.array([M // d for d in dens], dtype=object)

    Y = table.rows.astype(np.int64)
    s_t = s_t2 = s_c = 0
    count = 0
    buf: list[tuple[int, ...]] = []

    def flush():
        nonlocal s_t, s_t2, s_c, count
        A = np.array(buf, dtype=np.int64)
        obs = np.stack([((A == j) * Y[:, j]).sum(axis=1) for j in range(4)], axis=1)
        t = obs @ w_tau
        s_t += int(t.sum())
        s_t2 += int((t * t).sum())
        c = (obs * (n - obs)).astype(object) @ w_cls
        s_c += int(sum(c))
        count += len(buf)
        buf.clear()

    for a in assignments(design.arm_sizes):
        buf.append(a)
        if len(buf) >= chunk:
            flush()
    if buf:
        flush()

    scale = 2 * L
    mean = Fraction(s_t, scale * count)
    var = Fraction(count * s_t2 - s_t * s_t, scale * scale * count * count)
    return Moments(mean, var, Fraction(s_c, 4 * M * count), count)


def exact_population_moments(table: PotentialOutcomeTable, design: Design, l: int) -> dict:
    """Exact-rational versions of tau_l, the sampling-variance formula and its parts."""
    N = table.N
    joint = to_joint(table)
    q, a = count_terms(joint, l)
    marg = joint.marginals()
    tau = Fraction(a, 2 * N)
    s2_tau = Fraction(N * q - a * a, 4 * N * (N - 1))
    s2_arms = [Fraction(m * (N - m), N * (N - 1)) for m in marg]
    plug = sum(s / nj for s, nj in zip(s2_arms, design.arm_sizes)) / 4
    return {"tau": tau, "s2_tau": s2_tau, "classic_target": plug, "variance": plug - s2_tau / N}


def certify_exact_moments(
    n_tables: int = 100, N: int = 8, seed: int = 0, design: Design | None = None
) -> Certificate:
    """Random N-unit tables: enumeration moments equal the closed forms exactly."""
    design = design or Design((N // 4,) * 4)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(7,)))
    counter, checked = [], 0
    for t in range(n_tables):
        table = PotentialOutcomeTable(rng.integers(0, 2, size=(design.N, 4)))
        for l in EFFECTS:
            checked += 1
            mom = exact_randomization_moments(table, design, l)
            ref = exact_population_moments(table, design, l)
            ok = (
                mom.mean == ref["tau"]
                and mom.variance == ref["variance"]
                and mom.classic_ev - mom.variance == ref["s2_tau"] / design.N
            )
            if not ok:
                counter.append({"table": t, "effect": l, "rows": table.rows.tolist()})
    return Certificate(
        "exact_moments",
        not counter,
        checked,
        counter[:10],
        {"tables": n_tables, "design": list(design.arm_sizes)},
    )


# -- inclusion-exclusion chain ---------------------------------------------


@dataclass(frozen=True)
class ChainLink:
    """One inequality ``lhs <= rhs``; ``witnesses`` counts units in the set
    that must be empty for the link to be tight."""

    name: str
    lhs: int
    rhs: int
    witnesses: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def tight(self) -> bool:
        return self.lhs == self.rhs


@dataclass(frozen=True)
class ChainReport:
    effect: int
    first: tuple[ChainLink, ...]
    second: tuple[ChainLink, ...]

    @property
    def all_hold(self) -> bool:
        return all(link.holds for link in self.first + self.second)

    @property
    def first_tight(self) -> bool:
        return all(link.tight for link in self.first)

    @property
    def second_tight(self) -> bool:
        return all(link.tight for link in self.second)

    @property
    def consistent(self) -> bool:
        """Each link is tight exactly when its witness set is empty."""
        return all(link.tight == (link.witnesses == 0) for link in self.first + self.second)


def _chain(Y: np.ndarray, x: tuple[int, int], y: tuple[int, int]) -> tuple[ChainLink, ...]:
    """Four-link chain proving sum_{x,y} N_xy <= N_x1 + N_x2 + N_x1x2 + N_y1y2.

    ``x`` and ``y`` are 0-based arm pairs; summing the links gives the chain's
    inequality, and every link is tight iff no unit falls in its witness set.
    """
    x1, x2 = x
    y1, y2 = y

    def N(*arms):
        return int(Y[:, list(arms)].all(axis=1).sum())

    sx = Y[:, x1] + Y[:, x2]
    sy = Y[:, y1] + Y[:, y2]
    lab = lambda *arms: "".join(str(a + 1) for a in sorted(arms))  # noqa: E731
    return (
        ChainLink(
            f"N{lab(x1, x2, y1, y2)} <= N{lab(x1, x2)}",
            N(x1, x2, y1, y2),
            N(x1, x2),
            int(((sx == 2) & (sy < 2)).sum()),
        ),
        ChainLink(
            f"N{lab(x1, y1)} + N{lab(x1, y2)} - N{lab(x1, y1, y2)} <= N{lab(x1)}",
            N(x1, y1) + N(x1, y2) - N(x1, y1, y2),
            N(x1),
            int(((Y[:, x1] == 1) & (sy == 0)).sum()),
        ),
        ChainLink(
            f"N{lab(x2, y1)} + N{lab(x2, y2)} - N{lab(x2, y1, y2)} <= N{lab(x2)}",
            N(x2, y1) + N(x2, y2) - N(x2, y1, y2),
            N(x2),
            int(((Y[:, x2] == 1) & (sy == 0)).sum()),
        ),
        ChainLink(
            f"N{lab(x1, y1, y2)} + N{lab(x2, y1, y2)} - N{lab(x1, x2, y1, y2)} <= N{lab(y1, y2)}",
            N(x1, y1, y2) + N(x2, y1, y2) - N(x1, x2, y1, y2),
            N(y1, y2),
            int(((sx == 0) & (sy == 2)).sum()),
        ),
    )


def verify_inclusion_exclusion(table: PotentialOutcomeTable, l: int) -> ChainReport:
    """Evaluate both inclusion-exclusion chains for effect ``l`` on concrete data.

    The first chain runs over the arms with coefficient -1 and is tight iff the
    first monotonicity form holds; the second swaps the roles of the two groups.
    """
    c = contrast(l)
    minus = tuple(j - 1 for j in c.minus)
    plus = tuple(j - 1 for j in c.plus)
    Y = table.rows.astype(np.int64)
    return ChainReport(l, _chain(Y, minus, plus), _chain(Y, plus, minus))


def all_tables(N: int) -> Iterator[PotentialOutcomeTable]:
    """One table per multiset of outcome profiles (row order is irrelevant here)."""
    for joint in enumerate_joints(N, guard=max(N, JOINT_GUARD)):
        yield PotentialOutcomeTable(np.repeat(PROFILES, joint.as_array(), axis=0))


def certify_inclusion_exclusion(max_N: int = 3, n_random: int = 1000, seed: int = 0) -> Certificate:
    """Both chains hold on every table with N <= max_N and on random larger tables,
    and chain tightness matches the monotonicity conditions."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(11,)))

    def tables():
        for N in range(1, max_N + 1):
            yield from all_tables(N)
        for _ in range(n_random):
            N = int(rng.integers(4, 33))
            yield PotentialOutcomeTable(rng.integers(0, 2, size=(N, 4)))

    counter, checked = [], 0
    for table in tables():
        for l in EFFECTS:
            checked += 1
            rep = verify_inclusion_exclusion(table, l)
            mono = monotonicity_status(table, l)
            ok = (
                rep.all_hold
                and rep.consistent
                and rep.first_tight == mono.form1
                and rep.second_tight == mono.form2
            )
            if not ok:
                counter.append({"effect": l, "rows": table.rows.tolist()})
    return Certificate("inclusion_exclusion", not counter, checked, counter[:10], {"max_N": max_N, "random": n_random})


def effects_are_constant(table: PotentialOutcomeTable, l: int) -> bool:
    tau = unit_effects(table, l)
    return bool(np.all(tau == tau[0]))
