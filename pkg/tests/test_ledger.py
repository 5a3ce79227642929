import pytest

from rescurve.curveset import CompositeCurve, invert, tabulate
from rescurve.distcore import Distribution, DistributionKind
from rescurve.errors import DepletionError, DomainError
from rescurve.ledger import LedgerState, consume, marginal_cost, release, remaining

CURVE = tabulate(
    CompositeCurve.of(Distribution(DistributionKind.HIERARCHICAL, 1000.0, 10.0, 5.0))
)


def test_state_validation():
    with pytest.raises(DomainError):
        LedgerState("oil", CURVE, Q=-1.0)
    with pytest.raises(DepletionError):
        LedgerState("oil", CURVE, Q=float(CURVE.quantities[-1]))


def test_marginal_cost_rises_with_use():
    s = LedgerState("oil", CURVE)
    costs = [marginal_cost(s)]
    for _ in range(5):
        s, _avg = consume(s, 150.0)
        costs.append(marginal_cost(s))
    assert all(b > a for a, b in zip(costs, costs[1:]))


def test_average_cost_lies_between_endpoint_marginals():
    s0 = LedgerState("oil", CURVE, Q=100.0)
    before = marginal_cost(s0)
    s1, avg = consume(s0, 400.0)
    after = marginal_cost(s1)
    assert before <= avg <= after
    assert s1.Q == 500.0


def test_zero_increment_returns_current_marginal():
    s = LedgerState("oil", CURVE, Q=200.0)
    same, avg = consume(s, 0.0)
    assert same is s
    assert avg == marginal_cost(s)


def test_path_independence():
    s = LedgerState("oil", CURVE)
    one_step, _ = consume(s, 600.0)
    many = s
    for dq in (100.0, 250.0, 250.0):
        many, _ = consume(many, dq)
    assert marginal_cost(many) == pytest.approx(marginal_cost(one_step), rel=1e-12)


def test_overshoot_reports_feasible_remainder():
    s = LedgerState("oil", CURVE, Q=900.0)
    with pytest.raises(DepletionError) as exc:
        consume(s, 1e6)
    assert exc.value.feasible == pytest.approx(remaining(s))
    with pytest.raises(DomainError):
        consume(s, -1.0)


def test_release_only_for_renewables():
    stock = LedgerState("oil", CURVE, Q=100.0)
    with pytest.raises(DomainError):
        release(stock, 50.0)
    flow = LedgerState("wind", CURVE, Q=100.0, renewable=True)
    assert release(flow, 40.0).Q == 60.0
    with pytest.raises(DomainError):
        release(flow, 200.0)


def test_consumption_matches_curve_inversion():
    s, _ = consume(LedgerState("oil", CURVE), 300.0)
    assert marginal_cost(s) == invert(CURVE, 300.0)


def test_json_snapshot():
    import json

    s = LedgerState("oil", CURVE, Q=10.0)
    obj = json.loads(s.to_json())
    assert obj["resource"] == "oil"
    assert obj["Q"] == 10.0
