"""Syzygies, commutation relations and generator representations of the
invariant derivative algebra, evaluated by flattened finite differences
on exact jets."""

from __future__ import annotations

import numpy as np
import pytest

from betaplane.identities import (
    IDENTITIES,
    IDENTITY_IDS,
    DomainConditionError,
    StencilCrossingError,
    check_syzygy,
    commutator_value,
    invariant_derivative,
    invariant_function,
    invariant_second_derivative,
)
from betaplane.jets import AnalyticField

TOL = 1e-6

BRANCH_FREE = (
    "syzygy_4",
    "commutator_tx",
    "commutator_ty",
    "commutator_xy",
    "representation_I011",
    "representation_I110",
    "representation_I002",
)


def sample_point(field, rng, sign=1.0, min_abs=0.3, tries=2000):
    for _ in range(tries):
        point = tuple(rng.uniform(-3.0, 3.0, size=3))
        if sign * field.derivative((0, 1, 0), point) >= min_abs:
            return point
    raise AssertionError("no admissible sample point found")


@pytest.mark.parametrize("identity", IDENTITY_IDS)
def test_identities_hold_on_positive_branch(identity):
    rng = np.random.default_rng(hash(identity) % 2**32)
    checked = 0
    for _ in range(8):
        field = AnalyticField.random(rng)
        for _ in range(4):
            point = sample_point(field, rng)
            try:
                res = check_syzygy(identity, field, point)
            except DomainConditionError:
                continue
            assert res <= TOL, (identity, point, res)
            checked += 1
    assert checked >= 10


@pytest.mark.parametrize("identity", BRANCH_FREE)
def test_sign_carrying_identities_hold_on_negative_branch(identity):
    rng = np.random.default_rng(1000 + hash(identity) % 2**16)
    checked = 0
    for _ in range(8):
        field = AnalyticField.random(rng)
        for _ in range(3):
            point = sample_point(field, rng, sign=-1.0)
            try:
                res = check_syzygy(identity, field, point)
            except DomainConditionError:
                continue
            assert res <= TOL, (identity, point, res)
            checked += 1
    assert checked >= 8


@pytest.mark.parametrize(
    "identity", ["syzygy_1", "syzygy_2", "syzygy_3", "syzygy_5", "syzygy_6"]
)
def test_printed_syzygies_restricted_to_positive_branch(identity):
    """The recurrence-based syzygies carry an implicit sign of psi_x;
    evaluating them where psi_x < 0 is a domain error, not a failure."""
    rng = np.random.default_rng(77)
    field = AnalyticField.random(rng)
    point = sample_point(field, rng, sign=-1.0)
    with pytest.raises(DomainConditionError):
        check_syzygy(identity, field, point)


def test_unknown_identity_name():
    rng = np.random.default_rng(0)
    field = AnalyticField.random(rng)
    with pytest.raises(ValueError):
        check_syzygy("syzygy_99", field, (0.0, 0.0, 0.0))


def test_stencil_crossing_detected():
    """A point where psi_x ~ 0 puts the FD stencil across the branch cut."""
    rng = np.random.default_rng(3)
    field = AnalyticField.random(rng)
    # bisect psi_x along x between points of opposite sign
    lo = sample_point(field, rng, sign=-1.0)
    t, _, y = lo
    a = lo[1]
    b = None
    for _ in range(4000):
        x = rng.uniform(-3.0, 3.0)
        if field.derivative((0, 1, 0), (t, x, y)) > 0.3:
            b = x
            break
    assert b is not None
    for _ in range(80):
        mid = 0.5 * (a + b)
        if field.derivative((0, 1, 0), (t, mid, y)) < 0.0:
            a = mid
        else:
            b = mid
    near_zero = (t, 0.5 * (a + b), y)
    with pytest.raises((StencilCrossingError, DomainConditionError)):
        check_syzygy("commutator_xy", field, near_zero)


def test_invariant_derivative_linearity():
    rng = np.random.default_rng(4)
    field = AnalyticField.random(rng)
    point = sample_point(field, rng)
    i020 = invariant_function((0, 2, 0))
    i002 = invariant_function((0, 0, 2))

    def combo(fld, pt):
        return 2.0 * i020(fld, pt) - 3.0 * i002(fld, pt)

    for direction in ("t", "x", "y"):
        lhs = invariant_derivative(field, combo, direction, point)
        rhs = 2.0 * invariant_derivative(
            field, i020, direction, point
        ) - 3.0 * invariant_derivative(field, i002, direction, point)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_commutator_antisymmetry():
    rng = np.random.default_rng(5)
    field = AnalyticField.random(rng)
    point = sample_point(field, rng)
    i020 = invariant_function((0, 2, 0))
    ab = commutator_value(field, "x", "y", i020, point)
    ba = commutator_value(field, "y", "x", i020, point)
    assert ab == pytest.approx(-ba, rel=1e-10, abs=1e-12)


def test_second_derivative_symmetric_part_consistency():
    """D^i_a D^i_b - D^i_b D^i_a equals the directly evaluated
    commutator (the two independent implementations agree)."""
    rng = np.random.default_rng(6)
    field = AnalyticField.random(rng)
    point = sample_point(field, rng)
    i020 = invariant_function((0, 2, 0))
    for d1, d2 in (("t", "x"), ("x", "y"), ("t", "y")):
        diff = invariant_second_derivative(
            field, i020, d1, d2, point
        ) - invariant_second_derivative(field, i020, d2, d1, point)
        comm = commutator_value(field, d1, d2, i020, point)
        assert diff == pytest.approx(comm, rel=1e-4, abs=1e-6)


def test_registry_complete():
    assert set(IDENTITIES) == {
        "syzygy_1", "syzygy_2", "syzygy_3", "syzygy_4", "syzygy_5",
        "syzygy_6", "commutator_tx", "commutator_ty", "commutator_xy",
        "representation_I011", "representation_I110", "representation_I002",
    }
