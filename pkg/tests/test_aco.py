import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schedsim.aco import (
    AcoParams,
    EdgePheromoneState,
    EmptyFrontierError,
    Loads,
    NodePheromoneState,
    TourState,
    TspInstance,
    best_solution,
    cloud_construct_assignment,
    cloud_pheromone_update,
    cloud_transition_probs,
    limit_params,
    local_deposit,
    run_aco,
    tsp_construct_tour,
    tsp_global_update,
    tsp_local_update,
    tsp_transition_probs,
)
from schedsim.model import ResourcePool, Workload
from schedsim.oracle import canonical_tour

from conftest import random_instance

# 4 cities; distances from city 0 are 1, 2, 4
DIST4 = np.array([
    [0, 1, 2, 4],
    [1, 0, 3, 5],
    [2, 3, 0, 6],
    [4, 5, 6, 0],
], dtype=float)


def test_params_validation():
    for bad in ({"rho": 0.0}, {"rho": 1.0}, {"alpha_g": 0.0}, {"num_ants": 0}, {"max_iterations": 0},
                {"alpha": -1}, {"q": 0}):
        with pytest.raises(ValueError):
            AcoParams(**bad)


def test_tsp_instance_validation():
    with pytest.raises(ValueError):
        TspInstance(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValueError):
        TspInstance(np.array([[0, 0], [0, 0]]))
    with pytest.raises(ValueError):
        TspInstance(np.zeros((1, 1)))


def test_local_update_hand_value():
    state = EdgePheromoneState(np.array([[0.0, 1.0], [1.0, 0.0]]))
    tsp_local_update(state, (0, 1), 0.2, AcoParams(rho=0.5))
    # (1 - 0.5) * 1.0 + 0.5 * 0.2
    assert state.tau[0, 1] == pytest.approx(0.6, abs=1e-12)
    assert state.tau[1, 0] == state.tau[0, 1]


def test_local_deposit():
    assert local_deposit(100.0, 50.0) == 2.0


def test_global_update_hand_values():
    inst = TspInstance(DIST4)
    state = EdgePheromoneState.initial(inst, AcoParams())
    best = TourState.start(0)
    best.tour = [0, 1, 2, 3]
    best.tour_length = 10.0
    tsp_global_update(state, best, AcoParams(alpha_g=0.1))
    # on the tour: 0.9 * 1 + 0.1 / 10; off it: 0.9 * 1
    assert state.tau[0, 1] == pytest.approx(0.91, abs=1e-12)
    assert state.tau[3, 0] == pytest.approx(0.91, abs=1e-12)
    assert state.tau[0, 2] == pytest.approx(0.9, abs=1e-12)
    assert np.array_equal(state.tau, state.tau.T)


def test_global_update_needs_complete_tour():
    inst = TspInstance(DIST4)
    with pytest.raises(ValueError):
        tsp_global_update(EdgePheromoneState.initial(inst, AcoParams()), TourState.start(0), AcoParams())


def test_zero_rates_leave_pheromone_unchanged():
    inst = TspInstance(DIST4)
    params = limit_params(rho=0.0, alpha_g=0.0)
    state = EdgePheromoneState.initial(inst, params)
    before = state.tau.copy()
    tour = tsp_construct_tour(state, inst, params, np.random.default_rng(0))
    assert np.array_equal(state.tau, before)
    tsp_global_update(state, tour, params)
    assert np.array_equal(state.tau, before)


def test_tsp_transition_probs_hand_values():
    inst = TspInstance(DIST4)
    state = EdgePheromoneState.initial(inst, AcoParams())
    probs = tsp_transition_probs(state, inst, TourState.start(0), AcoParams(alpha=1, beta=1))
    # weights 1/1, 1/2, 1/4 -> 4/7, 2/7, 1/7
    assert probs == pytest.approx([0.0, 4 / 7, 2 / 7, 1 / 7], abs=1e-12)


def test_empty_frontier():
    inst = TspInstance(DIST4)
    tour = TourState(current_city=3, visited=[0, 1, 2, 3])
    with pytest.raises(EmptyFrontierError):
        tsp_transition_probs(EdgePheromoneState.initial(inst, AcoParams()), inst, tour, AcoParams())


def test_degenerate_pheromone_is_followed():
    inst = TspInstance(np.ones((4, 4)) - np.eye(4))
    params = AcoParams(alpha=1, beta=0)
    tau = np.ones((4, 4))
    np.fill_diagonal(tau, 0)
    for i, j in [(0, 1), (1, 2), (2, 3), (3, 0)]:
        tau[i, j] = tau[j, i] = 1e6
    # from any start the two ring neighbours carry 2e6 of the 2e6 + 1 weight
    probs = tsp_transition_probs(EdgePheromoneState(tau.copy()), inst, TourState.start(0), params)
    assert probs[1] + probs[3] == pytest.approx(2e6 / (2e6 + 1), abs=1e-12)
    for seed in range(200):
        tour = tsp_construct_tour(EdgePheromoneState(tau.copy()), inst, params, np.random.default_rng(seed))
        assert canonical_tour(tour.tour) == (0, 1, 2, 3)


def test_tour_state_bookkeeping():
    inst = TspInstance(DIST4)
    state = EdgePheromoneState.initial(inst, AcoParams())
    tour = tsp_construct_tour(state, inst, AcoParams(), np.random.default_rng(3))
    assert sorted(tour.tour) == [0, 1, 2, 3]
    assert tour.complete
    assert tour.tour_length == pytest.approx(inst.tour_length(tour.tour), abs=1e-12)


def test_best_solution_ties_and_empty():
    assert best_solution([3.0, 1.0, 1.0]) == (1, 1.0)
    with pytest.raises(ValueError):
        best_solution([])


def test_cloud_probs_hand_value():
    pool = ResourcePool.from_mips([100, 100])
    state = NodePheromoneState(np.array([2.0, 1.0]), np.array([1.0, 1.0]))
    assert cloud_transition_probs(state, pool, AcoParams()) == pytest.approx([2 / 3, 1 / 3], abs=1e-12)


def test_cloud_initial_pheromone_scaling():
    pool = ResourcePool.from_mips([100, 400])
    state = NodePheromoneState.initial(pool, AcoParams())
    # mean 250: tau0 = sqrt(0.4), sqrt(1.6); weight tau * eta^2 -> ratio 1 : 8
    assert state.tau == pytest.approx([np.sqrt(0.4), np.sqrt(1.6)], abs=1e-12)
    assert cloud_transition_probs(state, pool, AcoParams()) == pytest.approx([1 / 9, 8 / 9], abs=1e-12)


def test_cloud_unavailable_resource_has_zero_probability():
    pool = ResourcePool.from_mips([100, 200, 300], [True, False, True])
    state = NodePheromoneState.initial(pool, AcoParams())
    probs = cloud_transition_probs(state, pool, AcoParams())
    assert probs[1] == 0.0
    w = Workload.from_lengths(np.full(500, 10.0))
    a = cloud_construct_assignment(state, w, pool, AcoParams(), np.random.default_rng(0))
    assert 1 not in a.placement


def test_cloud_local_step_hand_value():
    pool = ResourcePool.from_mips([100, 100])
    state = NodePheromoneState(np.array([1.0, 1.0]), np.array([1.0, 1.0]))
    sol = (np.array([0]), Loads(2.0, np.array([2.0, 0.0])))
    cloud_pheromone_update(state, [sol], sol, limit_params(rho=0.5, q=1.0, alpha_g=0.0), pool)
    # 0.5 * 1 + 0.5 * 1 / 2 on the used resource, the idle one untouched
    assert state.tau == pytest.approx([0.75, 1.0], abs=1e-12)


def test_cloud_global_step_hand_value():
    pool = ResourcePool.from_mips([100, 100])
    state = NodePheromoneState(np.array([1.0, 1.0]), np.array([1.0, 1.0]))
    best = (np.array([0]), Loads(4.0, np.array([4.0, 0.0])))
    cloud_pheromone_update(state, [], best, AcoParams(alpha_g=0.1), pool)
    assert state.tau == pytest.approx([0.9 + 0.1 / 4, 0.9], abs=1e-12)


def test_cloud_sampling_is_binomial():
    pool = ResourcePool.from_mips([100, 100])
    state = NodePheromoneState.initial(pool, AcoParams())
    w = Workload.from_lengths(np.ones(10_000))
    a = cloud_construct_assignment(state, w, pool, AcoParams(), np.random.default_rng(7))
    # Binomial(10000, 1/2): sd 50, allow 3 sd
    assert abs(a.placement.count(0) - 5000) <= 150


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 8), st.floats(0, 4), st.floats(0, 4), st.integers(0, 2**32 - 1))
def test_tsp_probs_normalised(n, alpha, beta, seed):
    rng = np.random.default_rng(seed)
    d = rng.uniform(1, 100, (n, n))
    d = d + d.T
    np.fill_diagonal(d, 0)
    inst = TspInstance(d)
    tau = rng.uniform(1e-3, 1e3, (n, n))
    visited = list(rng.permutation(n)[: rng.integers(1, n)])
    tour = TourState(current_city=visited[-1], visited=visited)
    p = tsp_transition_probs(EdgePheromoneState(tau), inst, tour, AcoParams(alpha=alpha, beta=beta))
    assert abs(p.sum() - 1) <= 1e-9
    assert np.all(p[visited] == 0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=12).filter(any), st.integers(0, 2**32 - 1))
def test_cloud_probs_normalised(avail, seed):
    rng = np.random.default_rng(seed)
    pool = ResourcePool.from_mips(rng.uniform(100, 1000, len(avail)), avail)
    state = NodePheromoneState(rng.uniform(1e-3, 1e3, len(avail)), rng.uniform(0.1, 10, len(avail)))
    p = cloud_transition_probs(state, pool, AcoParams())
    assert abs(p.sum() - 1) <= 1e-9
    assert np.all(p[~pool.available] == 0)


def test_run_aco_tsp_and_cloud_are_deterministic_and_monotone():
    inst = TspInstance(DIST4)
    params = AcoParams(num_ants=4, max_iterations=10)
    a, b = run_aco("tsp", inst, params, 5), run_aco("tsp", inst, params, 5)
    assert a.best == b.best and a.objective_trace == b.objective_trace
    assert all(x >= y for x, y in zip(a.objective_trace, a.objective_trace[1:]))

    problem = random_instance(20, 4, 1)
    c, d = run_aco("cloud", problem, params, 5), run_aco("cloud", problem, params, 5)
    assert c.best == d.best and c.objective_trace == d.objective_trace
    assert all(x >= y for x, y in zip(c.objective_trace, c.objective_trace[1:]))
    assert c.best_metrics.makespan == c.best_value


def test_run_aco_unknown_mode():
    with pytest.raises(ValueError):
        run_aco("nope", None, AcoParams(), 0)
