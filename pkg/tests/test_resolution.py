"""Conflict resolution rules, including the worked two-user translation case:
user 1 translates {v1..v4} by (-0.2, 0.1, 0) while user 2 translates
{v3..v6} by (0.4, 0.2, 0.1)."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cowire.geometry import TransformDelta, Vec3, ZERO
from cowire.resolution import (
    ActiveInput,
    OperationKind,
    ResolutionInvariantError,
    Strategy,
    check_alr_grab,
    check_olr_select,
    induced_displacements,
    partition,
    resolve_additive,
    resolve_average,
    resolve_intersection,
    resolve_second_user,
    resolve_tick,
)

D1 = Vec3(-0.2, 0.1, 0.0)
D2 = Vec3(0.4, 0.2, 0.1)

coords = st.floats(-5.0, 5.0, allow_nan=False)
vec3s = st.builds(Vec3, coords, coords, coords)


def assert_close(a: Vec3, b: Vec3, tol: float = 1e-9):
    assert (a - b).norm() <= tol, f"{a} != {b}"


class TestPartition:
    def test_worked_example(self):
        part = partition({1, 2, 3, 4}, {3, 4, 5, 6})
        assert part.joint == {3, 4}
        assert part.disjoint_a == {1, 2}
        assert part.disjoint_b == {5, 6}

    def test_disjoint_inputs(self):
        part = partition({1, 2}, {3, 4})
        assert part.joint == frozenset()

    def test_identical_inputs(self):
        part = partition({1, 2}, {1, 2})
        assert part.joint == {1, 2}
        assert not part.disjoint_a and not part.disjoint_b


class TestObjectLevelChecks:
    def test_deny_other_users_locked_vertex(self):
        lock_table = {v: 0 for v in (1, 2, 3, 4)}
        assert check_olr_select(1, 3, lock_table) == "olr_locked"

    def test_allow_unlocked_vertex(self):
        lock_table = {v: 0 for v in (1, 2, 3, 4)}
        assert check_olr_select(1, 5, lock_table) is None

    def test_reselecting_own_vertex_is_idempotent(self):
        lock_table = {1: 0}
        assert check_olr_select(0, 1, lock_table) is None


class TestActionLevelChecks:
    PART = partition({1, 2, 3, 4}, {3, 4, 5, 6})

    def test_same_operation_denied(self):
        reason = check_alr_grab(1, OperationKind.ROTATE, self.PART, {0: OperationKind.ROTATE})
        assert reason == "alr_same_op"

    def test_different_operation_allowed(self):
        assert check_alr_grab(1, OperationKind.SCALE, self.PART, {0: OperationKind.ROTATE}) is None

    def test_no_overlap_allows_anything(self):
        part = partition({1, 2}, {5, 6})
        assert check_alr_grab(1, OperationKind.ROTATE, part, {0: OperationKind.ROTATE}) is None


class TestInducedDisplacements:
    def test_pure_translation_displaces_everything_equally(self):
        group = {0: Vec3(0, 0, 0), 1: Vec3(1, 1, 1)}
        field = induced_displacements(group, ZERO, TransformDelta.pure_translation(D2))
        assert_close(field[0], D2, 0.0)
        assert_close(field[1], D2, 1e-15)

    def test_identity_gives_zero_field(self):
        group = {0: Vec3(0.3, 0.4, 0.5)}
        field = induced_displacements(group, ZERO, TransformDelta.identity())
        assert field[0] == ZERO

    def test_quarter_turn_displacement(self):
        from cowire.geometry import Quat, Z_AXIS
        import math

        group = {0: Vec3(1, 0, 0)}
        delta = TransformDelta.pure_rotation(Quat.from_axis_angle(Z_AXIS, math.pi / 2))
        field = induced_displacements(group, ZERO, delta)
        assert_close(field[0], Vec3(-1, 1, 0))


class TestCombiners:
    def test_additive_worked_example(self):
        assert_close(resolve_additive(D1, D2), Vec3(0.2, 0.3, 0.1))

    def test_additive_zero_is_neutral(self):
        assert resolve_additive(ZERO, D2) == D2

    def test_additive_cancels(self):
        assert_close(resolve_additive(D2, -D2), ZERO, 0.0)

    def test_average_worked_example(self):
        assert_close(resolve_average(D1, D2), Vec3(0.1, 0.15, 0.05))

    def test_average_of_equal_inputs(self):
        assert resolve_average(D2, D2) == D2

    def test_average_of_opposites_is_zero(self):
        assert_close(resolve_average(D2, -D2), ZERO, 0.0)

    def test_intersection_worked_example(self):
        assert_close(resolve_intersection(D1, D2), Vec3(0.0, 0.1, 0.1))

    def test_intersection_of_equal_inputs(self):
        assert resolve_intersection(D2, D2) == D2

    def test_intersection_same_sign_takes_minimum(self):
        assert resolve_intersection(Vec3(0.3, 0, 0), Vec3(0.1, 0, 0)) == Vec3(0.1, 0.0, 0.0)

    def test_second_user_worked_example(self):
        assert resolve_second_user(D1, 10, D2, 20) == D2

    def test_second_user_swapped_order(self):
        assert resolve_second_user(D1, 20, D2, 10) == D1

    def test_second_user_requires_unique_seqs(self):
        with pytest.raises(ValueError):
            resolve_second_user(D1, 7, D2, 7)

    @given(vec3s, vec3s)
    @settings(max_examples=200)
    def test_average_is_half_of_additive_exactly(self, a, b):
        half = resolve_additive(a, b)
        assert resolve_average(a, b) == Vec3(half.x / 2, half.y / 2, half.z / 2)

    @given(vec3s, vec3s)
    @settings(max_examples=200)
    def test_additive_and_average_commute(self, a, b):
        assert resolve_additive(a, b) == resolve_additive(b, a)
        assert resolve_average(a, b) == resolve_average(b, a)

    @given(vec3s, vec3s)
    @settings(max_examples=200)
    def test_intersection_bounded_by_smaller_live_input(self, a, b):
        out = resolve_intersection(a, b)
        for axis in range(3):
            if abs(a[axis]) >= 1e-7 and abs(b[axis]) >= 1e-7:
                assert abs(out[axis]) <= min(abs(a[axis]), abs(b[axis])) + 1e-15

    @given(vec3s, vec3s)
    @settings(max_examples=200)
    def test_second_user_antisymmetric_under_seq_swap(self, a, b):
        assert resolve_second_user(a, 1, b, 2) == b
        assert resolve_second_user(a, 2, b, 1) == a


def _translation_inputs(strategy_positions):
    """Both Table-style groups translating concurrently on an 8-vertex model."""
    group_a = {i: strategy_positions[i] for i in (0, 1, 2, 3)}
    group_b = {i: strategy_positions[i] for i in (2, 3, 4, 5)}
    field_a = induced_displacements(group_a, ZERO, TransformDelta.pure_translation(D1))
    field_b = induced_displacements(group_b, ZERO, TransformDelta.pure_translation(D2))
    return {
        0: ActiveInput(OperationKind.TRANSLATE, 10, field_a),
        1: ActiveInput(OperationKind.TRANSLATE, 20, field_b),
    }


class TestResolveTick:
    POSITIONS = {i: Vec3(float(i), 0.0, 0.0) for i in range(8)}
    PART = partition({0, 1, 2, 3}, {2, 3, 4, 5})

    def expected(self, joint_delta):
        out = dict(self.POSITIONS)
        for i in (0, 1):
            out[i] = out[i] + D1
        for i in (4, 5):
            out[i] = out[i] + D2
        for i in (2, 3):
            out[i] = out[i] + joint_delta
        return out

    @pytest.mark.parametrize(
        "strategy,joint_delta",
        [
            (Strategy.ADDITIVE, Vec3(0.2, 0.3, 0.1)),
            (Strategy.AVERAGING, Vec3(0.1, 0.15, 0.05)),
            (Strategy.INTERSECTION, Vec3(0.0, 0.1, 0.1)),
            (Strategy.SECOND_USER, D2),
        ],
    )
    def test_reactive_outcomes(self, strategy, joint_delta):
        inputs = _translation_inputs(self.POSITIONS)
        out = resolve_tick(self.POSITIONS, inputs, self.PART, strategy)
        want = self.expected(joint_delta)
        for i in range(8):
            assert_close(out[i], want[i])
        # untouched vertices stay bitwise identical
        assert out[6] == self.POSITIONS[6] and out[7] == self.POSITIONS[7]

    def test_single_active_grab_is_strategy_independent(self):
        group_a = {i: self.POSITIONS[i] for i in (0, 1, 2, 3)}
        field = induced_displacements(group_a, ZERO, TransformDelta.pure_translation(D1))
        inputs = {0: ActiveInput(OperationKind.TRANSLATE, 10, field)}
        outputs = [
            resolve_tick(self.POSITIONS, inputs, self.PART, strategy)
            for strategy in (
                Strategy.ADDITIVE,
                Strategy.AVERAGING,
                Strategy.INTERSECTION,
                Strategy.SECOND_USER,
            )
        ]
        for out in outputs[1:]:
            assert out == outputs[0]
        for i in (0, 1, 2, 3):
            assert outputs[0][i] == self.POSITIONS[i] + D1

    def test_different_kinds_sum_on_joint(self):
        group_a = {i: self.POSITIONS[i] for i in (0, 1, 2, 3)}
        group_b = {i: self.POSITIONS[i] for i in (2, 3, 4, 5)}
        field_a = induced_displacements(group_a, ZERO, TransformDelta.pure_translation(D1))
        field_b = induced_displacements(group_b, Vec3(3.5, 0, 0), TransformDelta.pure_scale(2.0))
        inputs = {
            0: ActiveInput(OperationKind.TRANSLATE, 10, field_a),
            1: ActiveInput(OperationKind.SCALE, 20, field_b),
        }
        out = resolve_tick(self.POSITIONS, inputs, self.PART, Strategy.SECOND_USER)
        for i in (2, 3):
            assert_close(out[i], self.POSITIONS[i] + field_a[i] + field_b[i])

    def test_never_moves_vertices_outside_selections(self):
        inputs = _translation_inputs(self.POSITIONS)
        out = resolve_tick(self.POSITIONS, inputs, self.PART, Strategy.ADDITIVE)
        for i in (6, 7):
            assert out[i] == self.POSITIONS[i]

    def test_olr_with_joint_vertices_is_internal_error(self):
        inputs = _translation_inputs(self.POSITIONS)
        with pytest.raises(ResolutionInvariantError):
            resolve_tick(self.POSITIONS, inputs, self.PART, Strategy.OBJECT_LOCK)

    def test_alr_with_same_kind_joint_grabs_is_internal_error(self):
        inputs = _translation_inputs(self.POSITIONS)
        with pytest.raises(ResolutionInvariantError):
            resolve_tick(self.POSITIONS, inputs, self.PART, Strategy.ACTION_LOCK)
