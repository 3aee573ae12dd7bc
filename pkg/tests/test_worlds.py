import math

import numpy as np
import pyinformed as pin
import pytest


@pytest.fixture
def box_world():
    return pin.World([0, 0], [10, 10], [pin.AabbObstacle([4, 4], [6, 6]), pin.AabbObstacle([1, 1], [2, 2])])


def assert_agrees_with_dense_sampling(problem, a, b, points=10**4):
    """The exact test never passes a segment that a dense point hits, and it only rejects
    segments the dense points miss when they clip an obstacle less deeply than the point spacing
    """

    for p, q in zip(a, b):
        exact = problem.is_segment_free(p, q)
        dense = pin.dense_segment_free(problem, p, q, points)
        assert exact <= dense
        if exact != dense:
            spacing = np.linalg.norm(q - p) / (points - 1)
            assert pin.segment_clearance(problem, p, q) >= -max(spacing, 1e-9)


class TestObstacle:
    def test_distance(self):
        box = pin.AabbObstacle([0, 0], [1, 1])
        assert box.distance_to(np.array([0.5, 0.5])) == 0.0
        assert box.distance_to(np.array([4.0, 5.0])) == pytest.approx(5.0)

    def test_errors(self):
        with pytest.raises(pin.InvalidInputError):
            pin.AabbObstacle([0, 0], [0, 1])

        with pytest.raises(pin.DimensionMismatchError):
            pin.AabbObstacle([0, 0], [1, 1, 1])

        with pytest.raises(pin.InvalidInputError):
            pin.World([0, 0], [10, 10], [pin.AabbObstacle([11, 11], [12, 12])])


class TestStateFree:
    def test_states(self, box_world):
        assert box_world.is_state_free([0, 0])
        assert box_world.is_state_free([3, 3])
        assert not box_world.is_state_free([5, 5])
        assert not box_world.is_state_free([4, 5])
        assert not box_world.is_state_free([10.5, 5])

    def test_dimension_mismatch(self, box_world):
        with pytest.raises(pin.DimensionMismatchError):
            box_world.is_state_free([1, 1, 1])


class TestSegmentFree:
    def test_segments(self, box_world):
        assert box_world.is_segment_free([0, 9], [9, 9])
        assert not box_world.is_segment_free([0, 5], [9, 5])
        assert not box_world.is_segment_free([4.5, 4.5], [5.5, 5.5])
        assert not box_world.is_segment_free([0, 5], [11, 5])

    def test_grazing_contact_collides(self):
        world = pin.World([0, 0], [10, 10], [pin.AabbObstacle([1, 1], [2, 2])])
        assert not world.is_segment_free([0, 2], [2, 0])
        assert not world.is_segment_free([2, 0], [0, 2])
        assert not world.is_segment_free([0, 2], [5, 2])
        assert world.is_segment_free([0, 2.001], [5, 2.001])

    def test_empty_world(self):
        world = pin.World([0, 0, 0], [1, 1, 1])
        assert world.is_segment_free([0, 0, 0], [1, 1, 1])

    def test_symmetric(self, rng_factory, segment_factory):
        world, _ = pin.random_world(pin.RandomWorldSpec(dimension=2, seed=5))
        a, b = segment_factory(rng_factory(), world.bounds_lo, world.bounds_hi, 1000)
        for p, q in zip(a, b):
            assert world.is_segment_free(p, q) == world.is_segment_free(q, p)

    def test_free_segment_has_free_endpoints(self, rng_factory, segment_factory):
        world, _ = pin.random_world(pin.RandomWorldSpec(dimension=3, seed=5, obstacle_count=20))
        a, b = segment_factory(rng_factory(), world.bounds_lo, world.bounds_hi, 1000, max_length=20)
        for p, q in zip(a, b):
            if world.is_segment_free(p, q):
                assert world.is_state_free(p) and world.is_state_free(q)

    def test_agrees_with_dense_sampling(self, rng_factory, segment_factory):
        world, problem = pin.random_world(pin.RandomWorldSpec(dimension=2, seed=11))
        # kept away from the bounds so no endpoint is clipped onto them
        a, b = segment_factory(rng_factory(), world.bounds_lo + 10, world.bounds_hi - 10, 2000, max_length=10)
        assert_agrees_with_dense_sampling(problem, a, b)

    @pytest.mark.slow
    def test_agrees_with_dense_sampling_at_scale(self, rng_factory, segment_factory):
        world, problem = pin.random_world(pin.RandomWorldSpec(dimension=2, seed=12))
        a, b = segment_factory(rng_factory(12), world.bounds_lo + 1, world.bounds_hi - 1, 10**5)
        assert_agrees_with_dense_sampling(problem, a, b)


class TestSerialization:
    def test_round_trip(self, tmp_path):
        _, problem = pin.random_world(pin.RandomWorldSpec(dimension=2, seed=3, obstacle_count=10))
        loaded = pin.problem_from_json(pin.problem_to_json(problem))
        assert pin.world_hash(loaded) == pin.world_hash(problem)
        assert np.array_equal(loaded.x_start, problem.x_start)
        assert loaded.r_goal == problem.r_goal
        assert len(loaded.world.obstacles) == 10

        file_path = pin.save_problem(problem, tmp_path / "world.json")
        assert pin.world_hash(pin.load_problem(file_path)) == pin.world_hash(problem)

    def test_problem_without_world(self):
        problem = pin.ProblemDef([0, 0], [10, 10], [1, 5], [9, 5])
        loaded = pin.problem_from_json(pin.problem_to_json(problem))
        assert loaded.world.obstacles == ()
        assert loaded.c_min == 8.0

    def test_errors(self, tmp_path):
        with pytest.raises(pin.InvalidInputError):
            pin.problem_from_json("{not json")

        with pytest.raises(pin.InvalidInputError):
            pin.load_problem(tmp_path / "missing.json")


class TestWallWorld:
    def test_geometry(self):
        world, problem = pin.wall_world(2, l=200, d=100, w=10, h=50)
        assert problem.c_min == 100.0
        assert len(world.obstacles) == 1
        assert world.obstacles[0].lo.tolist() == [-5.0, -25.0]
        assert world.obstacles[0].hi.tolist() == [5.0, 25.0]
        assert not problem.is_segment_free(problem.x_start, problem.x_goal)
        assert problem.world.bounds_lo.tolist() == [-100.0, -100.0]

    def test_higher_dimension(self):
        world, problem = pin.wall_world(4, l=200, d=100, w=10, h=50)
        assert world.obstacles[0].hi.tolist() == [5.0, 25.0, 25.0, 25.0]
        assert not problem.is_segment_free(problem.x_start, problem.x_goal)

    def test_errors(self):
        with pytest.raises(pin.InvalidInputError):
            pin.wall_world(2, l=100, d=50, w=10, h=100)

        with pytest.raises(pin.InvalidInputError):
            pin.wall_world(3, l=100, d=50, w=10, h=120)

        with pytest.raises(pin.InvalidInputError):
            pin.wall_world(2, l=200, d=100, w=100, h=50)

        with pytest.raises(pin.InvalidInputError):
            pin.wall_world(2, l=200, d=100, w=10, h=50, wall_offset=30)

        with pytest.raises(pin.InvalidInputError):
            pin.wall_world(2, l=200, d=100, w=0, h=50)

    def test_analytic_optimum(self):
        assert pin.analytic_optimum_wall(2, 200, 100, 10, 50).value == pytest.approx(2 * math.hypot(45, 25) + 10)
        assert pin.analytic_optimum_wall(2, 200, 100, 1e-12, 50).value == pytest.approx(111.8034, abs=1e-4)
        assert pin.analytic_optimum_wall(2, 200, 100, 1e-9, 1e-9).value == pytest.approx(100.0, abs=1e-6)

    def test_analytic_optimum_one_side_closed(self):
        cost = pin.analytic_optimum_wall(2, l=200, d=100, w=10, h=150, wall_offset=40)
        assert cost.value == pytest.approx(2 * math.hypot(45, 35) + 10)

    def test_analytic_optimum_errors(self):
        with pytest.raises(pin.UnsupportedDimensionError):
            pin.analytic_optimum_wall(3, 200, 100, 10, 50)


class TestGapWorld:
    def test_geometry(self):
        world, problem = pin.gap_world(h=100, h_g=5, y_g=3, w=10, d=100)
        assert len(world.obstacles) == 2
        assert not problem.is_segment_free(problem.x_start, problem.x_goal)
        assert problem.is_state_free(np.array([0.0, 3.0]))

    def test_gap_covering_the_wall(self):
        world, problem = pin.gap_world(h=100, h_g=100, y_g=0)
        assert world.obstacles == ()
        assert problem.is_segment_free(problem.x_start, problem.x_goal)

    def test_costs(self):
        assert pin.flanking_cost(100, 10, 100).value == pytest.approx(2 * math.hypot(45, 50) + 10)
        assert pin.through_gap_cost(5, 0, 10, 100) == pin.Cost(100.0)
        assert pin.through_gap_cost(5, 3, 10, 100).value == pytest.approx(2 * math.hypot(45, 0.5) + 10)
        assert pin.analytic_optimum_gap(100, 5, 3, 10, 100) == pin.through_gap_cost(5, 3, 10, 100)
        assert pin.through_gap_cost(5, 3, 10, 100) < pin.flanking_cost(100, 10, 100)

    def test_errors(self):
        with pytest.raises(pin.InvalidInputError):
            pin.gap_world(h=100, h_g=120)

        with pytest.raises(pin.InvalidInputError):
            pin.gap_world(h=100, h_g=10, y_g=48)

        with pytest.raises(pin.UnsupportedDimensionError):
            pin.gap_world(n=3)


class TestRandomWorld:
    def test_deterministic(self):
        spec = pin.RandomWorldSpec(dimension=2, seed=7)
        _, first = pin.random_world(spec)
        _, second = pin.random_world(pin.RandomWorldSpec(dimension=2, seed=7))
        assert pin.problem_to_json(first) == pin.problem_to_json(second)

        _, other = pin.random_world(pin.RandomWorldSpec(dimension=2, seed=8))
        assert pin.world_hash(other) != pin.world_hash(first)

    def test_defaults(self):
        world, problem = pin.random_world(pin.RandomWorldSpec(dimension=2, seed=1))
        assert len(world.obstacles) == 30
        assert problem.x_start.tolist() == [10.0, 10.0]
        assert problem.x_goal.tolist() == [90.0, 90.0]
        for obstacle in world.obstacles:
            assert obstacle.distance_to(problem.x_start) > problem.r_goal
            assert obstacle.distance_to(problem.x_goal) > problem.r_goal
            assert np.all(obstacle.hi - obstacle.lo >= 5) and np.all(obstacle.hi - obstacle.lo <= 20)

    def test_no_obstacles(self):
        world, problem = pin.random_world(pin.RandomWorldSpec(dimension=3, seed=1, obstacle_count=0))
        assert world.obstacles == ()
        assert problem.is_segment_free(problem.x_start, problem.x_goal)

    def test_generation_failure(self):
        pin.PyinformedOptions.world_retries = 2
        pin.PyinformedOptions.obstacle_retries = 1
        spec = pin.RandomWorldSpec(dimension=2, seed=1, obstacle_count=200, size_range=(40, 60))
        with pytest.raises(pin.WorldGenerationError):
            pin.random_world(spec)

    def test_errors(self):
        with pytest.raises(pin.InvalidInputError):
            pin.RandomWorldSpec(dimension=0, seed=1)

        with pytest.raises(pin.InvalidInputError):
            pin.RandomWorldSpec(dimension=2, seed=1, size_range=(20, 5))

        with pytest.raises(pin.InvalidInputError):
            pin.RandomWorldSpec(dimension=2, seed=1, obstacle_count=-1)
