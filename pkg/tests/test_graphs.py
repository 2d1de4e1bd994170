import pytest

from purify.graphs import (
    Graph,
    GraphError,
    NotTwoColorableError,
    coloring_of,
    format_edge_list,
    parse_edge_list,
    two_color,
)


def test_two_coloring():
    assert two_color(Graph.line(5)) == ((0, 2, 4), (1, 3))
    assert two_color(Graph.star(4)) == ((0,), (1, 2, 3))
    with pytest.raises(NotTwoColorableError):
        two_color(Graph.complete(3))


def test_greedy_coloring_is_proper():
    g = Graph.ring(5)
    classes = coloring_of(g)
    assert len(classes) == 3
    color = {v: c for c, cls in enumerate(classes) for v in cls}
    assert all(color[u] != color[v] for u, v in g.sorted_edges())


def test_edge_list_round_trip():
    text = "vertices 3\n0 1\n1 2  # tail comment\ncolor 0 0\ncolor 1 1\ncolor 2 0\n"
    g = parse_edge_list(text)
    assert g.n == 3 and g.sorted_edges() == [(0, 1), (1, 2)]
    assert g.coloring == ((0, 2), (1,))
    assert parse_edge_list(format_edge_list(g)) == g


@pytest.mark.parametrize("text", ["0 0\n", "0 1\n0 1\nvertices 1\n", "0 x\n", "0 1\n1 2\ncolor 0 0\ncolor 1 0\ncolor 2 1\n"])
def test_bad_edge_lists(text):
    with pytest.raises(GraphError):
        parse_edge_list(text)
