"""Model and target generation tests."""

import math

import pytest

from cowire.geometry import Vec3, centroid
from cowire.scenariogen import GenerationError, TargetSpec, gen_cube, gen_target
from cowire.session import match_check


class TestGenCube:
    def test_counts(self):
        cube = gen_cube()
        assert len(cube.vertices) == 8
        assert len(cube.edges) == 12
        assert len(cube.faces) == 6

    def test_all_edges_one_meter(self):
        cube = gen_cube()
        for a, b in cube.edges:
            assert math.isclose(cube.vertices[a].distance(cube.vertices[b]), 1.0)

    def test_centroid(self):
        assert centroid(gen_cube().vertices.values()) == Vec3(0.5, 0.5, 0.5)

    def test_faces_are_quads_of_existing_vertices(self):
        cube = gen_cube()
        for face in cube.faces:
            assert len(face) == 4
            assert set(face) <= set(cube.vertices)


class TestGenTarget:
    def test_same_seed_twice_is_identical(self):
        base = gen_cube()
        spec = TargetSpec(seed=7)
        a = gen_target(base, spec)
        b = gen_target(base, spec)
        assert a.vertices == b.vertices

    def test_topology_preserved(self):
        base = gen_cube()
        target = gen_target(base, TargetSpec(seed=3))
        assert set(target.vertices) == set(base.vertices)
        assert target.edges == base.edges
        assert target.faces == base.faces

    @pytest.mark.parametrize("seed", range(12))
    def test_targets_never_match_the_base(self, seed):
        base = gen_cube()
        target = gen_target(base, TargetSpec(seed=seed))
        matched, _ = match_check(base, target, 0.05)
        assert not matched

    def test_degenerate_ranges_exhaust_attempts(self):
        spec = TargetSpec(
            seed=1,
            translate_range=(0.0, 0.0),
            rotate_range=(0.0, 0.0),
            scale_range=(1.0, 1.0),
        )
        with pytest.raises(GenerationError):
            gen_target(gen_cube(), spec)

    def test_study2_style_spec_transforms_enough_faces(self):
        base = gen_cube()
        target = gen_target(base, TargetSpec(seed=11, faces_transformed=3, ops_per_face=3))
        moved_faces = 0
        for face in base.faces:
            displacement = max(
                base.vertices[v].distance(target.vertices[v]) for v in face
            )
            if displacement > 0.05:
                moved_faces += 1
        assert moved_faces >= 3

    def test_spec_validation(self):
        base = gen_cube()
        with pytest.raises(ValueError):
            gen_target(base, TargetSpec(seed=1, faces_transformed=1))
        with pytest.raises(ValueError):
            gen_target(base, TargetSpec(seed=1, ops_per_face=1))
        with pytest.raises(ValueError):
            gen_target(base, TargetSpec(seed=1, faces_transformed=7))
