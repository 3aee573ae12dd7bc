import math

import numpy as np
import pyinformed as pin
import pytest


class TestMonteCarloVolume:
    def test_disc(self, rng_factory):
        estimate = pin.mc_volume_estimate(2, 0, 2, 10**6, rng_factory())
        assert estimate.value == pytest.approx(math.pi, rel=0.02)
        assert estimate.draws == 10**6
        assert estimate.standard_error < 0.01

    def test_prolate_spheroid(self, rng_factory):
        estimate = pin.mc_volume_estimate(2, 1, 3, 10**6, rng_factory())
        assert estimate.value == pytest.approx(math.pi, rel=0.02)

    def test_acceptance_in_six_dimensions(self, rng_factory):
        estimate = pin.mc_volume_estimate(3, 2, 6, 10**6, rng_factory())
        assert estimate.acceptance == pytest.approx(0.0807, abs=0.002)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_agrees_with_closed_form(self, rng_factory, n):
        estimate = pin.mc_volume_estimate(1.5, 1.0, n, 10**6, rng_factory(n))
        assert estimate.value == pytest.approx(pin.phs_measure(1.5, 1.0, n), rel=0.02)

    def test_errors(self, rng_factory):
        with pytest.raises(pin.InvalidInputError):
            pin.mc_volume_estimate(2, 1, 2, 100, rng_factory())

        with pytest.raises(pin.InvalidInputError):
            pin.mc_volume_estimate(1, 2, 2, 10**4, rng_factory())


class TestOneStepContraction:
    def test_mean(self, rng_factory):
        estimate = pin.one_step_contraction_estimate(2, 1, 2, 10**5, rng_factory())
        assert estimate.value == pytest.approx(1.5, abs=0.005)
        assert estimate.value == pytest.approx(pin.expected_heuristic(2, 1, 2), abs=0.005)

    def test_near_minimum(self, rng_factory):
        estimate = pin.one_step_contraction_estimate(1.000001, 1, 2, 10**4, rng_factory())
        assert 1 - 1e-12 <= estimate.value <= 1.000001 + 1e-12

    def test_slope(self, rng_factory):
        rng = rng_factory()
        low = pin.one_step_contraction_estimate(1.001, 1, 4, 10**5, rng)
        high = pin.one_step_contraction_estimate(1.002, 1, 4, 10**5, rng)
        assert (high.value - low.value) / 0.001 == pytest.approx(pin.convergence_rate(4), abs=0.02)

    def test_errors(self, rng_factory):
        with pytest.raises(pin.InvalidInputError):
            pin.one_step_contraction_estimate(1, 1, 2, 10**4, rng_factory())


class TestChiSquare:
    def test_uniform_passes(self, rng_factory):
        phs = pin.phs_new([0, 0], [4, 3], 7)
        report = pin.chi_square_uniformity(pin.phs_sample(phs, rng_factory(), size=10**5), phs)
        assert report.passed
        assert report.dof == 19
        assert report.threshold == pytest.approx(43.82, abs=0.01)

    def test_biased_fails(self, rng_factory):
        rng = rng_factory()
        phs = pin.phs_new([0, 0], [1, 0], 2)
        directions = rng.standard_normal((10**5, 2))
        # radius uniform instead of u^(1/n): too many samples near the centre
        ball = rng.random(10**5)[:, None] * directions / np.linalg.norm(directions, axis=1)[:, None]
        samples = (ball * phs.radii) @ phs.rotation.T + phs.x_centre
        assert not pin.chi_square_uniformity(samples, phs).passed

    def test_errors(self, rng_factory):
        phs = pin.phs_new([0, 0], [1, 0], 2)
        with pytest.raises(pin.InvalidInputError):
            pin.chi_square_uniformity(pin.phs_sample(phs, rng_factory(), size=100), phs)

        degenerate = pin.phs_new([0, 0], [1, 0], 1)
        with pytest.raises(pin.InvalidInputError):
            pin.chi_square_uniformity(pin.phs_sample(degenerate, rng_factory(), size=10**4), degenerate)


class TestGridDijkstra:
    def test_metrication_bias(self):
        assert pin.metrication_bias(1) == 0.0
        assert pin.metrication_bias(2) == pytest.approx(0.0824, abs=1e-4)
        assert pin.metrication_bias(3) == pytest.approx(0.1281, abs=1e-4)

    def test_empty_world(self, empty_problem):
        optimum = pin.grid_dijkstra_optimum(empty_problem(n=2, d=100, width=200), 5)
        assert optimum.cost.value == pytest.approx(100.0, abs=1e-9)
        assert optimum.metrication_bias == pytest.approx(0.0824, abs=1e-4)

    def test_off_lattice_terminals(self):
        problem = pin.ProblemDef([0, 0], [10, 10], [1.5, 1.5], [8.5, 6.5])
        optimum = pin.grid_dijkstra_optimum(problem, 1)
        assert problem.c_min <= optimum.cost.value <= problem.c_min * (1 + optimum.metrication_bias) + 2 * math.sqrt(2)

    @pytest.mark.parametrize("w, h", [(10, 50), (6, 80), (20, 30)])
    def test_wall_world(self, wall_problem, w, h):
        problem = wall_problem(w=w, h=h)
        analytic = pin.analytic_optimum_wall(2, 200, 100, w, h).value
        optimum = pin.grid_dijkstra_optimum(problem, 1)
        assert optimum.cost.value >= analytic - 1e-9
        assert optimum.cost.value <= (analytic + 2) * (1 + optimum.metrication_bias)

    def test_gap_world(self):
        _, problem = pin.gap_world(h=100, h_g=5, y_g=0, w=10, d=100)
        assert pin.grid_dijkstra_optimum(problem, 1).cost.value == pytest.approx(100.0, abs=1e-9)

    def test_sealed_world(self):
        world = pin.World([0, 0], [10, 10], [pin.AabbObstacle([4, 0], [6, 10])])
        problem = pin.ProblemDef.from_world(world, [1, 5], [9, 5])
        assert not pin.grid_dijkstra_optimum(problem, 1).cost.is_finite

    def test_random_world_is_connected(self):
        _, problem = pin.random_world(pin.RandomWorldSpec(dimension=2, seed=21))
        optimum = pin.grid_dijkstra_optimum(problem, 1)
        assert optimum.cost.is_finite
        assert optimum.cost.value >= problem.c_min

    def test_three_dimensions(self, empty_problem):
        optimum = pin.grid_dijkstra_optimum(empty_problem(n=3, d=10, width=20), 1)
        assert optimum.cost.value == pytest.approx(10.0, abs=1e-9)

    def test_errors(self, empty_problem):
        with pytest.raises(pin.UnsupportedDimensionError):
            pin.grid_dijkstra_optimum(empty_problem(n=4, d=10, width=20), 1)

        with pytest.raises(pin.InvalidInputError):
            pin.grid_dijkstra_optimum(empty_problem(n=2), 3)

        with pytest.raises(pin.InvalidInputError):
            pin.grid_dijkstra_optimum(empty_problem(n=2), 0)


class TestLinearScan:
    def test_nearest(self):
        points = [[0, 0], [1, 0], [0, 1]]
        assert pin.linear_scan_nearest(points, [0.9, 0.1]) == 1
        assert pin.linear_scan_nearest(points, [0.5, 0.5]) == 0
        assert pin.linear_scan_near(points, [0, 0], 1) == [0, 1, 2]
        assert pin.linear_scan_near(points, [0, 0], 0.5) == [0]

    def test_dense_segment(self, wall_problem):
        problem = wall_problem()
        assert not pin.dense_segment_free(problem, problem.x_start, problem.x_goal)
        assert pin.dense_segment_free(problem, [-50, 30], [50, 30])
        assert not pin.dense_segment_free(problem, [-50, 30], [150, 30])


class TestSegmentClearance:
    @pytest.fixture
    def problem(self):
        world = pin.World([0, 0], [10, 10], [pin.AabbObstacle([4, 4], [6, 6])])
        return pin.ProblemDef.from_world(world, [1, 1], [9, 1])

    def test_clear(self, problem):
        assert pin.segment_clearance(problem, [1, 1], [9, 1]) == pytest.approx(3.0, abs=1e-9)
        assert pin.segment_clearance(problem, [0, 0], [3, 3]) == pytest.approx(math.sqrt(2), abs=1e-9)

    def test_touching_face(self, problem):
        assert pin.segment_clearance(problem, [1, 4], [9, 4]) == pytest.approx(0.0, abs=1e-9)

    def test_penetration(self, problem):
        assert pin.segment_clearance(problem, [1, 5], [9, 5]) == pytest.approx(-1.0, abs=1e-9)
        assert pin.segment_clearance(problem, [1, 4.5], [9, 4.5]) == pytest.approx(-0.5, abs=1e-9)

    def test_without_obstacles(self, empty_problem):
        assert pin.segment_clearance(empty_problem(), [-50, 0], [50, 0]) == math.inf
