import math

import numpy as np
import pyinformed as pin
import pytest


class TestCost:
    def test_ordering(self):
        assert pin.Cost(1) < pin.Cost(2)
        assert pin.Cost(1e300) < pin.Cost.infinite()
        assert pin.Cost() == pin.Cost.infinite()
        assert min([pin.Cost(3), pin.Cost(2.5)]) == pin.Cost(2.5)
        assert min([], default=pin.Cost.infinite()) == pin.Cost(math.inf)

    def test_values(self):
        assert pin.Cost(2).value == 2.0
        assert float(pin.Cost(2)) == 2.0
        assert pin.Cost(0).is_finite
        assert not pin.Cost().is_finite

    def test_errors(self):
        with pytest.raises(pin.InvalidInputError):
            pin.Cost(-1)

        with pytest.raises(pin.InvalidInputError):
            pin.Cost(math.nan)


class TestPathCost:
    def test_examples(self):
        assert pin.path_cost([(0, 0), (3, 4)]) == pin.Cost(5.0)
        assert pin.path_cost([(0, 0), (1, 0), (1, 1)]) == pin.Cost(2.0)
        assert pin.path_cost([(0, 0), (0, 0)]) == pin.Cost(0.0)
        assert pin.path_cost([(1, 2, 3)]) == pin.Cost(0.0)

    def test_reversal(self, rng_factory):
        states = rng_factory().uniform(-10, 10, (50, 4))
        path = pin.PathSeq(states)
        assert path.reversed().cost.value == pytest.approx(path.cost.value, rel=1e-12)

    def test_triangle_inequality(self, rng_factory):
        states = rng_factory().uniform(-10, 10, (20, 3))
        straight = np.linalg.norm(states[-1] - states[0])
        assert pin.path_cost(states).value >= straight

    def test_path_seq(self):
        path = pin.PathSeq([[0, 0], [1, 1]])
        assert len(path) == 2
        assert path.dimension == 2
        assert path[1].tolist() == [1.0, 1.0]
        assert [s.tolist() for s in path] == [[0.0, 0.0], [1.0, 1.0]]

    def test_errors(self):
        with pytest.raises(pin.InvalidInputError):
            pin.path_cost([[0, 0], [1, 1, 1]])

        with pytest.raises(pin.InvalidInputError):
            pin.path_cost([])


class TestHeuristic:
    def test_examples(self):
        assert pin.heuristic_f([0.5, 0], [0, 0], [1, 0]) == pin.Cost(1.0)
        assert pin.heuristic_f([0, 0], [0, 0], [1, 0]) == pin.Cost(1.0)
        assert pin.heuristic_f([0.5, 0.5], [0, 0], [1, 0]).value == pytest.approx(2 * math.sqrt(0.5))

    def test_keyword_arguments(self):
        cost = pin.heuristic_f(x=[0.5, 0.5], x_start=[0, 0], x_goal=[1, 0])
        assert cost.value == pytest.approx(1.4142135623730951)

    def test_admissible(self, rng_factory):
        rng = rng_factory()
        for _ in range(200):
            x_start, x_goal, x = rng.uniform(-5, 5, (3, 3))
            c_min = np.linalg.norm(x_goal - x_start)
            assert pin.heuristic_f(x, x_start, x_goal).value >= c_min - 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(pin.DimensionMismatchError):
            pin.heuristic_f([0, 0, 0], [0, 0], [1, 0])


class TestProblemDef:
    def test_defaults(self):
        problem = pin.ProblemDef([0, 0], [100, 100], [10, 50], [90, 50])
        assert problem.dimension == 2
        assert problem.c_min == 80.0
        assert problem.r_goal == pytest.approx(0.8)
        assert problem.bounds_measure == 10000.0
        assert problem.bounds_diameter == pytest.approx(100 * math.sqrt(2))
        assert problem.world is None

    def test_goal_region(self):
        problem = pin.ProblemDef([0, 0], [100, 100], [10, 50], [90, 50], r_goal=2)
        assert problem.in_goal_region(np.array([89.0, 50.0]))
        assert problem.in_goal_region(np.array([90.0, 52.0]))
        assert not problem.in_goal_region(np.array([87.0, 50.0]))

    def test_obstacle_free_checks(self):
        problem = pin.ProblemDef([0, 0], [10, 10], [1, 5], [9, 5])
        assert problem.is_state_free(np.array([0.0, 10.0]))
        assert not problem.is_state_free(np.array([-0.1, 5.0]))
        assert problem.is_segment_free(np.array([0.0, 0.0]), np.array([10.0, 10.0]))
        assert not problem.is_segment_free(np.array([0.0, 0.0]), np.array([11.0, 10.0]))

    def test_errors(self):
        with pytest.raises(pin.InvalidInputError):
            pin.ProblemDef([0, 0], [0, 10], [0, 1], [0, 9])

        with pytest.raises(pin.InvalidInputError):
            pin.ProblemDef([0, 0], [10, 10], [5, 5], [5, 5])

        with pytest.raises(pin.InvalidInputError):
            pin.ProblemDef([0, 0], [10, 10], [-1, 5], [5, 5])

        with pytest.raises(pin.InvalidInputError):
            pin.ProblemDef([0, 0], [10, 10], [1, 5], [9, 5], r_goal=-1)

        with pytest.raises(pin.DimensionMismatchError):
            pin.ProblemDef([0, 0], [10, 10], [1, 5, 0], [9, 5])

    def test_start_in_collision(self):
        world = pin.World([0, 0], [10, 10], [pin.AabbObstacle([0, 0], [2, 10])])
        with pytest.raises(pin.InvalidInputError):
            pin.ProblemDef.from_world(world, [1, 5], [9, 5])

    def test_world_bounds_must_match(self):
        world = pin.World([0, 0], [10, 10])
        with pytest.raises(pin.InvalidInputError):
            pin.ProblemDef([0, 0], [20, 20], [1, 5], [9, 5], world=world)
