import logging
from fractions import Fraction

import pytest
from pydantic import ValidationError

from baselines import exact_for_model, greedy_for_model
from conftest import square, unit_homothets
from errors import InfeasibleInstance, IterationCapExceeded
from feasibility import Solution, coverage_model, is_feasible
from geometry_core import pt
from instances import CoverInstance, gen_cover, gen_domination
from solver import (
    SolverConfig,
    SwapTrace,
    audit_b_local_optimality,
    containment_replacement,
    distinct_pool,
    improving_swap,
    initial_solution,
    local_search,
)


def test_b_defaults_and_explicit_value():
    assert SolverConfig().resolved_b() == 2
    assert SolverConfig(b=3).resolved_b() == 3


def test_b_from_epsilon():
    assert SolverConfig(epsilon="1/2").resolved_b() == 4
    assert SolverConfig(epsilon=0.5).resolved_b() == 4
    assert SolverConfig(epsilon="2").resolved_b() == 1
    assert SolverConfig(epsilon="1/2", alpha=0.25).resolved_b() == 1


def test_b_from_small_epsilon_is_capped(caplog):
    with caplog.at_level(logging.WARNING, logger="solver"):
        assert SolverConfig(epsilon="1/4").resolved_b() == 4
    assert "exceeds cap" in caplog.text


def test_cap_follows_settings(monkeypatch):
    monkeypatch.setenv("LS_MAX_B", "6")
    assert SolverConfig(epsilon="1/4").resolved_b() == 6


@pytest.mark.parametrize("epsilon", ["0", "-1/2", "abc"])
def test_bad_epsilon(epsilon):
    with pytest.raises(ValidationError):
        SolverConfig(epsilon=epsilon)


def test_initial_solutions(chain_instance, disjoint_instance):
    assert initial_solution(chain_instance, SolverConfig(init="full")).indices == (0, 1, 2)
    assert initial_solution(chain_instance, SolverConfig(init="greedy")).indices == (1,)
    assert initial_solution(disjoint_instance, SolverConfig()).indices == (0, 1, 2)


def test_infeasible_instance_is_reported():
    instance = CoverInstance((square(0, 0, 1, 1),), (pt(5, 5),))
    with pytest.raises(InfeasibleInstance):
        initial_solution(instance, SolverConfig())
    with pytest.raises(InfeasibleInstance):
        local_search(instance)


def test_improving_swap_examples(chain_instance):
    model = coverage_model(chain_instance)
    assert improving_swap(model, Solution.of([0, 2]), 2) == ((0, 2), (1,))
    assert improving_swap(model, Solution.of([0, 2]), 1) is None
    assert improving_swap(model, Solution.of([1]), 1) is None
    # removing 0 alone keeps {1} dominating
    assert improving_swap(model, Solution.of([0, 1]), 1) == ((0,), ())


def test_improving_swap_never_beats_exact():
    model = coverage_model(gen_domination(9, extent=5, seed=4))
    optimum = exact_for_model(model)
    assert improving_swap(model, optimum, len(optimum)) is None


def test_containment_replaces_small_by_big():
    instance = CoverInstance((square(1, 1, 2, 2), square(0, 0, 3, 3)), (pt("3/2", "3/2"),))
    trace = SwapTrace()
    out = containment_replacement(instance, Solution.of([0]), trace=trace)
    assert out.indices == (1,)
    assert trace.replacements == 1


def test_containment_replaces_empty_cover_free_region(nested_cover):
    trace = SwapTrace()
    out = containment_replacement(nested_cover, Solution.of([0, 1]), trace=trace)
    assert out.indices == (1, 2)
    assert trace.records[0].removed == (0,) and trace.records[0].added == (2,)
    assert is_feasible(nested_cover, out)


def nested_trio() -> CoverInstance:
    objects = (square(1, 1, 2, 2), square("1/2", "1/2", "5/2", "5/2"), square(0, 0, 3, 3))
    return CoverInstance(objects, (pt("3/2", "3/2"),))


def test_containment_cap_stops_runaway_replacement():
    instance = nested_trio()
    S = Solution.of([0])
    with pytest.raises(IterationCapExceeded):
        containment_replacement(instance, S, cap=1)
    assert S.indices == (0,)
    assert containment_replacement(instance, S, cap=2).indices == (2,)


def test_second_loop_cap_from_config():
    with pytest.raises(IterationCapExceeded):
        local_search(nested_trio(), SolverConfig(max_second_loop_iters=1))
    S, trace = local_search(nested_trio(), SolverConfig())
    assert S.indices == (2,)
    assert trace.replacements == 2


def test_containment_leaves_isolated_solution(disjoint_instance):
    S = Solution.of([0, 1, 2])
    assert containment_replacement(disjoint_instance, S).indices == (0, 1, 2)


def test_local_search_chain(chain_instance):
    S, trace = local_search(chain_instance, SolverConfig(b=2, init="full"))
    assert S.indices == (1,)
    assert trace.swaps <= 2
    assert S.meta["initial_size"] == 3
    assert audit_b_local_optimality(coverage_model(chain_instance), S, 2)


def test_local_search_disjoint(disjoint_instance):
    S, trace = local_search(disjoint_instance, SolverConfig(b=2))
    assert S.indices == (0, 1, 2)
    assert trace.swaps == 0


def test_duplicates_are_dropped():
    instance = unit_homothets(("1/2", "1/2"), ("1/2", "1/2"), ("5/4", "1/2"))
    assert distinct_pool(instance.polygons) == [0, 2]
    S, _ = local_search(instance, SolverConfig(init="full"))
    assert S.meta["duplicates_dropped"] == 1
    assert 1 not in S.indices
    assert is_feasible(instance, S)


def test_audit_examples(chain_instance):
    model = coverage_model(chain_instance)
    assert not audit_b_local_optimality(model, Solution.of([0, 1, 2]), 2)
    assert not audit_b_local_optimality(model, Solution.of([0, 2]), 2)
    assert audit_b_local_optimality(model, Solution.of([0, 2]), 1)
    assert audit_b_local_optimality(model, Solution.of([1]), 1)
    assert not audit_b_local_optimality(model, Solution.of([0]), 1)


def test_local_search_is_deterministic():
    instance = gen_domination(14, seed=21)
    config = SolverConfig(b=2, init="full")
    a, ta = local_search(instance, config)
    b, tb = local_search(instance, config)
    assert a.indices == b.indices
    assert ta.to_dict() == tb.to_dict()
    assert a.to_json("h") == b.to_json("h")


def test_randomized_order_is_seeded():
    instance = gen_domination(12, seed=2)
    a, _ = local_search(instance, SolverConfig(init="full", deterministic=False, seed=7))
    b, _ = local_search(instance, SolverConfig(init="full", deterministic=False, seed=7))
    assert a.indices == b.indices
    assert is_feasible(instance, a)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("b", [1, 2])
def test_local_search_output_is_feasible_and_locally_optimal(seed, b):
    instance = gen_domination(12, extent=6, seed=seed)
    model = coverage_model(instance)
    S, _ = local_search(instance, SolverConfig(b=b))
    assert is_feasible(instance, S)
    assert audit_b_local_optimality(model, S, b)
    assert len(exact_for_model(model)) <= len(S) <= len(greedy_for_model(model))


@pytest.mark.parametrize("seed", range(4))
def test_local_search_on_cover(seed):
    instance = gen_cover(9, 18, seed=seed)
    model = coverage_model(instance)
    S, trace = local_search(instance, SolverConfig(b=2, init="full"))
    assert is_feasible(instance, S)
    assert audit_b_local_optimality(model, S, 2)
    # no single selected object is redundant at the fixed point
    assert all(not model.is_feasible(set(S.indices) - {i}) for i in S.indices)
    assert trace.rounds >= 1


def test_trace_shape(chain_instance):
    _, trace = local_search(chain_instance, SolverConfig(b=2, init="full"))
    doc = trace.to_dict()
    assert doc["rounds"] == trace.rounds
    for rec in doc["records"]:
        if rec["loop"] == "swap":
            assert len(rec["added"]) <= len(rec["removed"]) - 1
        else:
            assert len(rec["added"]) == len(rec["removed"]) == 1


def test_epsilon_stays_exact():
    config = SolverConfig(epsilon="1/3")
    assert config.epsilon == Fraction(1, 3)
    assert config.resolved_b() == 4
    S, _ = local_search(unit_homothets(("1/2", "1/2")), config)
    assert S.meta["epsilon"] == "1/3"
