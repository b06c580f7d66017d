from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hallharem.core_graph import (
    BipartiteOracle,
    FiniteBipartiteGraph,
    Side,
    Vertex,
    check_symmetry,
    dump_bg,
    extract_ball,
    load_finite_graph,
    parse_bg,
)
from hallharem.decomposition import build_action_graph, tight_spec
from hallharem.errors import BallBudgetExceeded, OracleError, ParityError, ParseError


def brute_ball(oracle, removed_left, removed_right, pivot, radius):
    """Independent BFS over (side, index) pairs, for cross-checking."""
    removed = {
        Side.LEFT: frozenset(removed_left),
        Side.RIGHT: frozenset(removed_right),
    }
    dist = {(pivot.side, pivot.index): 0}
    queue = deque([(pivot.side, pivot.index)])
    while queue:
        side, i = queue.popleft()
        d = dist[(side, i)]
        if d == radius:
            continue
        for j in oracle.neighbors(Vertex(side, i)):
            key = (side.opposite(), j)
            if j in removed[side.opposite()] or key in dist:
                continue
            dist[key] = d + 1
            queue.append(key)
    return dist


# -- parsing ---------------------------------------------------------------


def test_parse_basic():
    g, k = parse_bg("A 0: 0 1\nA 1: 1 2\n")
    assert k is None
    assert g.left_ids == (0, 1)
    assert g.right_ids == (0, 1, 2)
    assert g.edge_count == 4


def test_parse_empty_input_is_empty_graph():
    g = load_finite_graph("")
    assert g.left_ids == () and g.right_ids == ()


def test_parse_header_and_comments():
    g, k = parse_bg("# comment\nk 2\n\nA 0: 0 1\n")
    assert k == 2
    assert g.adjacency[0] == (0, 1)


def test_parse_duplicate_edge_rejected():
    with pytest.raises(ParseError) as err:
        parse_bg("A 0: 1 1\n")
    assert err.value.line_no == 1


def test_parse_out_of_order_left_rejected():
    with pytest.raises(ParseError) as err:
        parse_bg("A 1: 0\nA 0: 0\n")
    assert err.value.line_no == 2


def test_parse_header_after_data_rejected():
    with pytest.raises(ParseError):
        parse_bg("A 0: 0\nk 2\n")


def test_parse_garbage_line():
    with pytest.raises(ParseError) as err:
        parse_bg("A 0: 0\nB 0: 0\n")
    assert err.value.line_no == 2


@st.composite
def adjacency_graphs(draw):
    nl = draw(st.integers(1, 5))
    nr = draw(st.integers(1, 6))
    adj = {}
    for a in range(nl):
        row = draw(st.frozensets(st.integers(0, nr - 1), max_size=nr))
        if row:
            adj[a] = tuple(sorted(row))
    return FiniteBipartiteGraph.from_adjacency(adj)


@given(adjacency_graphs())
@settings(max_examples=60)
def test_bg_roundtrip(g):
    text = dump_bg(g, k=2)
    got, k = parse_bg(text)
    assert k == 2
    assert got == g


# -- ball extraction -------------------------------------------------------


def single_edge_oracle():
    return FiniteBipartiteGraph.from_adjacency({0: (0,)}).as_oracle()


def test_ball_single_edge_radius_3():
    ball = extract_ball(single_edge_oracle(), set(), set(), Vertex(Side.LEFT, 0), 3)
    assert ball.graph.left_ids == (0,)
    assert ball.graph.right_ids == (0,)
    assert ball.shell_right == frozenset()
    assert ball.interior_right == frozenset({0})


def test_ball_parity_enforced():
    with pytest.raises(ParityError):
        extract_ball(single_edge_oracle(), set(), set(), Vertex(Side.LEFT, 0), 2)
    with pytest.raises(ParityError):
        extract_ball(single_edge_oracle(), set(), set(), Vertex(Side.RIGHT, 0), 3)


def test_ball_removed_pivot_rejected():
    with pytest.raises(ValueError):
        extract_ball(single_edge_oracle(), {0}, set(), Vertex(Side.LEFT, 0), 1)


@pytest.fixture(scope="module")
def f2_oracle():
    return build_action_graph(tight_spec(2))


def test_f2_radius_1_ball(f2_oracle):
    ball = extract_ball(f2_oracle, set(), set(), Vertex(Side.LEFT, 0), 1)
    assert ball.graph.left_ids == (0,)
    assert ball.graph.right_ids == (0, 1, 2, 3, 4)
    # identity is a neighbor, so the pivot's own index sits strictly inside
    # only at distance 1 as well: the whole layer is the shell
    assert ball.shell_right == frozenset({0, 1, 2, 3, 4})


def test_f2_ball_matches_brute_bfs(f2_oracle):
    ball = extract_ball(f2_oracle, set(), set(), Vertex(Side.LEFT, 0), 3)
    dist = brute_ball(f2_oracle, set(), set(), Vertex(Side.LEFT, 0), 3)
    lefts = sorted(i for (s, i) in dist if s is Side.LEFT)
    rights = sorted(i for (s, i) in dist if s is Side.RIGHT)
    assert list(ball.graph.left_ids) == lefts
    assert list(ball.graph.right_ids) == rights
    shell = {i for (s, i) in dist if s is Side.RIGHT and dist[(s, i)] == 3}
    assert ball.shell_right == shell


def test_f2_ball_respects_removals(f2_oracle):
    removed_right = {0}
    ball = extract_ball(f2_oracle, set(), removed_right, Vertex(Side.LEFT, 0), 1)
    assert ball.graph.right_ids == (1, 2, 3, 4)
    dist = brute_ball(f2_oracle, set(), removed_right, Vertex(Side.LEFT, 0), 1)
    assert sorted(i for (s, i) in dist if s is Side.RIGHT) == [1, 2, 3, 4]


def test_f2_removals_disconnect(f2_oracle):
    # removing both copies of an index cuts every walk through it
    dist = brute_ball(f2_oracle, {0}, {0}, Vertex(Side.RIGHT, 2), 4)
    ball = extract_ball(f2_oracle, {0}, {0}, Vertex(Side.RIGHT, 2), 4)
    assert sorted(i for (s, i) in dist if s is Side.LEFT) == list(ball.graph.left_ids)
    # index 3 (the other branch) is unreachable around the removed root
    assert 3 not in ball.graph.right_ids


def test_ball_edges_are_oracle_edges(f2_oracle):
    ball = extract_ball(f2_oracle, set(), set(), Vertex(Side.LEFT, 0), 3)
    for a, row in ball.graph.adjacency.items():
        nbrs = f2_oracle.neighbors(Vertex(Side.LEFT, a))
        assert set(row) <= set(nbrs)


def test_ball_monotone_in_radius(f2_oracle):
    small = extract_ball(f2_oracle, set(), set(), Vertex(Side.LEFT, 0), 1)
    big = extract_ball(f2_oracle, set(), set(), Vertex(Side.LEFT, 0), 3)
    assert set(small.graph.left_ids) <= set(big.graph.left_ids)
    assert set(small.graph.right_ids) <= set(big.graph.right_ids)
    for a, row in small.graph.adjacency.items():
        assert set(row) <= set(big.graph.adjacency[a])


def test_ball_deterministic(f2_oracle):
    b1 = extract_ball(f2_oracle, set(), set(), Vertex(Side.LEFT, 0), 3)
    b2 = extract_ball(f2_oracle, set(), set(), Vertex(Side.LEFT, 0), 3)
    assert b1 == b2


def test_ball_budget(f2_oracle):
    with pytest.raises(BallBudgetExceeded):
        extract_ball(f2_oracle, set(), set(), Vertex(Side.LEFT, 0), 5, max_vertices=10)


def test_ball_detects_asymmetry():
    # left 0 claims right 1 as a neighbor, right 1 does not claim left 0;
    # radius 3 queries both directions, so the audit sees the contradiction
    def neighbors(v):
        if v.side is Side.LEFT:
            return (0, 1) if v.index == 0 else ()
        return (0,) if v.index == 0 else ()

    broken = BipartiteOracle(neighbors=neighbors, degree=lambda v: len(neighbors(v)))
    with pytest.raises(OracleError):
        extract_ball(broken, set(), set(), Vertex(Side.LEFT, 0), 3)


def test_ball_detects_degree_mismatch():
    g = FiniteBipartiteGraph.from_adjacency({0: (0,)})
    base = g.as_oracle()
    broken = BipartiteOracle(neighbors=base.neighbors, degree=lambda v: 7)
    with pytest.raises(OracleError):
        extract_ball(broken, set(), set(), Vertex(Side.LEFT, 0), 1)


# -- symmetry audit ---------------------------------------------------------


def test_check_symmetry_finite_graph_clean():
    g = FiniteBipartiteGraph.from_adjacency({0: (0, 2), 1: (1,)})
    assert check_symmetry(g.as_oracle(), 4) == []


def test_check_symmetry_planted_defect():
    g = FiniteBipartiteGraph.from_adjacency({i: () for i in range(6)}, right_ids=range(6))
    base = g.as_oracle()

    def neighbors(v):
        if v.side is Side.LEFT and v.index == 3:
            return (5,)
        return base.neighbors(v)

    oracle = BipartiteOracle(neighbors=neighbors, degree=lambda v: len(neighbors(v)))
    assert check_symmetry(oracle, 6) == [(3, 5)]


def test_check_symmetry_f2(f2_oracle):
    assert check_symmetry(f2_oracle, 50) == []
