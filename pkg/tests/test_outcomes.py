from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from neyman_sharp.contrasts import EFFECTS
from neyman_sharp.oracle import all_tables, attainable_bound, sharp_bound_exact
from neyman_sharp.outcomes import (
    PROFILES,
    JointDistribution,
    PotentialOutcomeTable,
    cell_label,
    count_terms,
    monotonicity_status,
    profile_index,
    s2_tau_direct,
    s2_tau_from_counts,
    subset_count,
    subset_counts,
    to_joint,
    to_table,
    unit_effects,
)

tables = st.integers(2, 20).flatmap(
    lambda n: arrays(np.int8, (n, 4), elements=st.integers(0, 1)).map(PotentialOutcomeTable)
)
joints = st.lists(st.integers(0, 6), min_size=16, max_size=16).filter(lambda c: sum(c) >= 2).map(
    lambda c: JointDistribution(tuple(c))
)


def test_profile_indexing():
    assert profile_index((0, 0, 0, 0)) == 0
    assert profile_index((1, 0, 0, 0)) == 8
    assert profile_index((1, 1, 1, 0)) == 14
    assert cell_label(14) == "D1110"
    for k in range(16):
        assert profile_index(PROFILES[k]) == k


def test_table_validation():
    with pytest.raises(ValueError):
        PotentialOutcomeTable(np.array([[0, 1, 2, 0]]))
    with pytest.raises(ValueError):
        PotentialOutcomeTable(np.zeros((3, 3), dtype=int))
    with pytest.raises(ValueError):
        JointDistribution((1,) * 15)
    with pytest.raises(ValueError):
        JointDistribution((-1,) + (0,) * 15)


def test_illustration_joint(illustration_joint):
    assert illustration_joint.N == 16
    assert illustration_joint.counts[profile_index((1, 1, 1, 0))] == 2
    assert illustration_joint.marginals() == (9, 9, 7, 6)


def test_illustration_s2(illustration, illustration_joint):
    for l, want in zip(EFFECTS, (0.357292, 0.248958, 0.248958)):
        assert s2_tau_direct(illustration, l) == pytest.approx(want, abs=1e-6)
        assert s2_tau_from_counts(illustration_joint, l) == pytest.approx(want, abs=1e-6)


def test_all_zero_table():
    joint = to_joint(PotentialOutcomeTable(np.zeros((5, 4), dtype=int)))
    assert joint.counts == (5,) + (0,) * 15
    assert to_table(JointDistribution((2,) + (0,) * 15)).rows.tolist() == [[0, 0, 0, 0]] * 2
    for l in EFFECTS:
        assert s2_tau_from_counts(joint, l) == 0.0
        assert not monotonicity_status(to_table(joint), l).neither


def test_monotonicity_examples(illustration):
    single = PotentialOutcomeTable.from_rows([(1, 1, 1, 0)])
    st1 = monotonicity_status(single, 1)
    assert (st1.form1, st1.form2) == (False, True)
    assert monotonicity_status(illustration, 1).label() == "neither"


def test_subset_counts(illustration_joint):
    counts = subset_counts(illustration_joint)
    assert len(counts) == 15
    assert counts[(1,)] == 9
    assert subset_count(illustration_joint, (3, 1)) == subset_count(illustration_joint, (1, 3))
    with pytest.raises(ValueError):
        subset_count(illustration_joint, (5,))


@given(tables)
def test_joint_round_trip_and_permutation_invariance(table):
    joint = to_joint(table)
    assert to_joint(to_table(joint)) == joint
    perm = np.random.default_rng(table.N).permutation(table.N)
    assert to_joint(PotentialOutcomeTable(table.rows[perm])) == joint
    assert subset_counts(to_joint(to_table(joint))) == subset_counts(joint)


@given(tables)
def test_count_form_matches_direct(table):
    joint = to_joint(table)
    for l in EFFECTS:
        assert s2_tau_from_counts(joint, l) == pytest.approx(s2_tau_direct(table, l), abs=1e-12)


@given(joints)
def test_inequality_and_equality_condition_on_joints(joint):
    table = to_table(joint)
    for l in EFFECTS:
        q, a = count_terms(joint, l)
        assert q >= abs(a)
        assert (q == abs(a)) == (not monotonicity_status(table, l).neither)


def _exact_s2(joint, l):
    q, a = count_terms(joint, l)
    N = joint.N
    return Fraction(N * q - a * a, 4 * N * (N - 1)), a


def test_random_joints_inequality_10000():
    rng = np.random.default_rng(3)
    for _ in range(10_000):
        N = int(rng.integers(2, 41))
        joint = JointDistribution(tuple(int(c) for c in rng.multinomial(N, rng.dirichlet(np.ones(16)))))
        table = to_table(joint)
        for l in EFFECTS:
            q, a = count_terms(joint, l)
            assert q >= abs(a)
            mono = monotonicity_status(table, l)
            assert (q == abs(a)) == (not mono.neither)
            s2, _ = _exact_s2(joint, l)
            assert s2 >= attainable_bound(a, N) >= sharp_bound_exact(a, N)


@pytest.mark.parametrize("N", [2, 3])
def test_exhaustive_small_tables(N):
    for table in all_tables(N):
        joint = to_joint(table)
        for l in EFFECTS:
            assert s2_tau_from_counts(joint, l) == pytest.approx(s2_tau_direct(table, l), abs=1e-12)
            q, a = count_terms(joint, l)
            mono = monotonicity_status(table, l)
            assert q >= abs(a) and (q == abs(a)) == (not mono.neither)
            s2, _ = _exact_s2(joint, l)
            if abs(a) <= N:
                # within |tau| <= 1/2 the bound is attained exactly under monotonicity
                assert (s2 == sharp_bound_exact(a, N)) == (not mono.neither)
            else:
                assert mono.neither


def test_bridge_fails_beyond_half():
    # both units have tau_i = 1: S^2 = 0 equals the (zero) bound, yet neither form holds
    table = PotentialOutcomeTable.from_rows([(0, 0, 1, 1), (0, 0, 1, 1)])
    joint = to_joint(table)
    assert np.all(unit_effects(table, 1) == 1.0)
    s2, a = _exact_s2(joint, 1)
    assert s2 == 0 == sharp_bound_exact(a, 2)
    assert monotonicity_status(table, 1).neither
