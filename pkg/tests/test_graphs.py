import numpy as np
import pytest

from fractalkit.graphs import build_level_graph, embedding
from fractalkit.specs import Point
from fractalkit.util import ConfigError


def test_interval_level_sizes(line):
    # dyadic chain: 2^m + 1 vertices at level m
    for m in range(5):
        lg = build_level_graph(line, m)
        assert lg.nvert == 2**m + 1
        assert len(lg.interior) == 2**m - 1


def test_gasket_level_sizes(sg):
    # 3 (3^m + 1) / 2 vertices; hand union-find count at m=3 gives 42
    for m, want in ((0, 3), (1, 6), (2, 15), (3, 42)):
        lg = build_level_graph(sg, m)
        assert lg.nvert == want


def test_gasket_level1_edges(sg):
    # 9 edges, all of conductance 1/r = 5/3
    lg = build_level_graph(sg, 1)
    assert len(lg.edges_c) == 9
    assert np.allclose(lg.edges_c, 5.0 / 3.0)


def test_mass_sums_to_one(line, sg):
    for spec in (line, sg):
        lg = build_level_graph(spec, 3)
        assert float(lg.mass.sum()) == pytest.approx(1.0, abs=1e-12)


def test_vertex_address_roundtrip(sg):
    lg = build_level_graph(sg, 3)
    for v in range(lg.nvert):
        assert lg.vertex_of(lg.point_at(v)) == v


def test_coarse_addresses_lift(line):
    # the same point named at different depths resolves to one vertex
    lg = build_level_graph(line, 6)
    assert lg.vertex_of(Point.parse("0:1")) == lg.vertex_of(Point.parse("1:0"))
    assert lg.vertex_of(Point.parse("01:1")) == lg.vertex_of(Point.parse("011:1"))
    assert lg.vertex_of(Point.parse("010:1")) == lg.vertex_of(Point.parse("011:0"))


def test_corner_identifications_are_glued(sg):
    # touching corners of adjacent cells are one vertex
    lg = build_level_graph(sg, 2)
    a = lg.vertex_of(Point((0,), 1))
    b = lg.vertex_of(Point((1,), 0))
    assert a == b


def test_too_deep_address_rejected(line):
    lg = build_level_graph(line, 2)
    with pytest.raises(ConfigError):
        lg.vertex_of(Point.parse("0000:1"))


def test_embedding_maps_vertices_consistently(line):
    # embedding gives, per coarse vertex, its id in the finer graph
    ids = embedding(line, 2, 4)
    lg2 = build_level_graph(line, 2)
    lg4 = build_level_graph(line, 4)
    assert len(ids) == lg2.nvert
    for v in range(lg2.nvert):
        assert int(ids[v]) == lg4.vertex_of(lg2.point_at(v))
