from fractions import Fraction as F

import pytest

from chainwalk import chainfile
from chainwalk.chain import validate
from chainwalk.errors import (
    DisconnectedGraph,
    EmptyTargets,
    NonPositiveInput,
    NonPositiveLength,
    NotSimpleGraph,
    OutOfRange,
)
from chainwalk.models import (
    brownian_step_length,
    dog_owner_gap,
    drunkard,
    gamblers_ruin,
    graph_walk,
    moran,
)
from chainwalk.solve import absorption_from, expected_cost, expected_visits, solve_chain

from pathlib import Path

GOLDEN = Path(__file__).parent / "golden"


def start_cost(spec):
    c = validate(spec)
    return solve_chain(c).cost_from(spec.start)


def test_ruin_1_2_is_the_short_table():
    spec = gamblers_ruin(1, 2)
    assert spec.start == "1"
    assert chainfile.serialize(spec) == (GOLDEN / "ruin_1_2.chain").read_text()


def test_ruin_1_1():
    c = validate(gamblers_ruin(1, 1))
    assert c.n_transient == 1
    assert absorption_from(c, "1") == {"0": F(1, 2), "2": F(1, 2)}


def test_ruin_bad_lengths():
    with pytest.raises(NonPositiveLength):
        gamblers_ruin(0, 3)


def test_moran_rates():
    c = validate(moran(10, 3))
    i = c.index("3")
    row = dict(zip(c.names, c.Q[i] + c.R[i]))
    assert row["2"] == row["4"] == F(21, 90)
    assert row["3"] == F(48, 90)


def test_moran_fixation():
    c = validate(moran(10, 3))
    assert absorption_from(c, "3")["10"] == F(3, 10)
    assert absorption_from(c, "0")["10"] == 0
    with pytest.raises(OutOfRange):
        moran(1, 0)
    with pytest.raises(OutOfRange):
        moran(5, 6)


@pytest.mark.parametrize("n, blocks, returns", [(1, 1, 0), (2, 4, 1), (10, 100, 9)])
def test_drunkard(n, blocks, returns):
    c = validate(drunkard(n))
    bar = c.index("0")
    assert expected_cost(c)[bar] == blocks
    assert expected_visits(c)[bar][bar] - 1 == returns
    with pytest.raises(NonPositiveLength):
        drunkard(0)


def test_graph_path_matches_drunkard():
    spec = graph_walk([(0, 1), (1, 2)], [2], start=0)
    assert start_cost(spec) == 4
    assert validate(spec).Q == validate(drunkard(2)).Q


def test_graph_triangle():
    assert start_cost(graph_walk([("a", "b"), ("b", "c"), ("c", "a")], ["a"], start="b")) == 2


def test_graph_cost_scaling():
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3), (3, 4)]
    unit = expected_cost(validate(graph_walk(edges, [4])))
    dog = expected_cost(validate(graph_walk(edges, [4], F(2, 3))))
    assert dog == [F(2, 3) * x for x in unit]


def test_graph_errors():
    with pytest.raises(DisconnectedGraph):
        graph_walk([(0, 1), (2, 3)], [1])
    with pytest.raises(EmptyTargets):
        graph_walk([(0, 1)], [])
    with pytest.raises(NotSimpleGraph):
        graph_walk([(0, 1), (1, 0)], [1])
    with pytest.raises(NotSimpleGraph):
        graph_walk([(0, 0), (0, 1)], [1])


def test_dog_owner_gap_formula():
    edges = [("h", "a"), ("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")]
    steps = dict(zip(validate(graph_walk(edges, ["h"])).transient, expected_cost(validate(graph_walk(edges, ["h"])))))
    assert dog_owner_gap(edges, ["h"], "b", "b") == 20 * steps["b"]
    assert dog_owner_gap(edges, ["h"], "a", "d") == 60 * steps["a"] - 40 * steps["d"]
    assert dog_owner_gap(edges, ["h"], "a", "h") == 60 * steps["a"]


def test_brownian_step_length():
    assert brownian_step_length(1.0, 100.0) == pytest.approx(0.1, rel=1e-15)
    assert brownian_step_length(2.0, 4.0) == 1.0
    mean = start_cost(gamblers_ruin(20, 20))
    assert mean == 400
    assert brownian_step_length(1.0, mean) == 0.05
    with pytest.raises(NonPositiveInput):
        brownian_step_length(0, 4)
    with pytest.raises(NonPositiveInput):
        brownian_step_length(1, -4)
