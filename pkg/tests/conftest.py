import numpy as np
import pytest

from diffusim import Graph, gen_complete, gen_cycle, lazy_rw_matrix


@pytest.fixture
def triangle():
    return gen_complete(3)


@pytest.fixture
def k2():
    return gen_complete(2)


@pytest.fixture
def path3():
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def lazy_k2(k2):
    return lazy_rw_matrix(k2)


@pytest.fixture
def lazy_triangle(triangle):
    return lazy_rw_matrix(triangle)


@pytest.fixture
def lazy_cycle16():
    return lazy_rw_matrix(gen_cycle(16))


def assert_valid_graph(g: Graph):
    """Adjacency symmetry, sortedness, no self-loops, BFS connectivity."""
    for v, nbrs in enumerate(g.adjacency):
        assert list(nbrs) == sorted(set(nbrs))
        assert v not in nbrs
        for u in nbrs:
            assert v in g.adjacency[u]
    assert g.is_connected()
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in g.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    assert len(seen) == g.n
