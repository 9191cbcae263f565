import math

import numpy as np
import pytest

from fractalkit.resolvent import (
    corner_identity_gap,
    neumann_column,
    neumann_resolvent,
    resistance_diameter,
    resolvent_direct,
    resolvent_series,
    resolvent_series_many,
    resolvent_spectral,
    shell_value,
)
from fractalkit.specs import Point
from fractalkit.util import SingularityError

P = Point.parse


def _gline(z, x, y):
    # absorbing kernel on the unit interval, x <= y
    s = complex(z) ** 0.5
    return np.sinh(s * x) * np.sinh(s * (1.0 - y)) / (s * np.sinh(s))


def _gline_neumann(z, x, y):
    s = complex(z) ** 0.5
    return np.cosh(s * x) * np.cosh(s * (1.0 - y)) / (s * np.sinh(s))


def test_direct_matches_interval_closed_form(line):
    pairs = [(P("01:1"), P("01:1")), (P("001:1"), P("10:1")), (P("001:1"), P("0:1"))]
    coords = [(0.5, 0.5), (0.25, 0.75), (0.25, 0.5)]
    for z in (1.0, 100.0):
        vals = resolvent_direct(line, 10, z, pairs)
        for got, (x, y) in zip(vals, coords):
            assert got == pytest.approx(float(np.real(_gline(z, x, y))), rel=1e-4)


def test_direct_frozen_values(line):
    # diagonal value 2 sinh(1/2)^2 / sinh(1) = tanh(1/2) / 2
    got = resolvent_direct(line, 10, 1.0, [(P("01:1"), P("01:1"))])
    assert got[0] == pytest.approx(0.23105857863000488, rel=1e-4)
    got = resolvent_direct(line, 10, 100.0, [(P("001:1"), P("10:1"))])
    assert got[0] == pytest.approx(0.00033237265277912106, rel=1e-4)


def test_series_terminates_and_matches_direct(line, sg):
    cases = [
        (line, 10, [(P("01:1"), P("01:1")), (P("001:1"), P("10:1"))]),
        (sg, 5, [(Point((0, 1), 2), Point((1, 0), 1)), (Point((0, 0, 1), 2), Point((2,), 0))]),
    ]
    for spec, m, pairs in cases:
        for z in (1.0, 10.0):
            direct = resolvent_direct(spec, m, z, pairs)
            for res, want in zip(resolvent_series_many(spec, m, z, pairs), direct):
                assert res.terminated
                assert res.tail_bound == 0.0
                assert res.value == pytest.approx(want, rel=1e-10)


def test_series_complex_parameter(line):
    z = 5.0 * np.exp(3j * np.pi / 4)
    pair = (P("001:1"), P("10:1"))
    res = resolvent_series(line, 10, z, *pair)
    want = resolvent_direct(line, 10, z, [pair])[0]
    assert abs(res.value - want) < 1e-10


def test_series_depth_zero_is_shell_term(line):
    x = y = P("01:1")
    res = resolvent_series(line, 10, 1.0, x, y, max_depth=0)
    assert not res.terminated
    assert res.value == pytest.approx(shell_value(line, 10, 1.0, x, y), rel=1e-12)
    # cut-branch budget: r_0 * r_0-weighted resistance diameter
    assert res.tail_bound == pytest.approx(0.5 * resistance_diameter(line), rel=1e-12)


def test_series_truncated_complex_budget_is_infinite(line):
    res = resolvent_series(line, 10, 2.0 + 1.0j, P("01:1"), P("01:1"), max_depth=0)
    assert not res.terminated
    assert math.isinf(res.tail_bound)


def test_neumann_matches_closed_form(line):
    pairs = [(P(":0"), P(":1")), (P("01:1"), P("01:1")), (P("001:1"), P("10:1"))]
    coords = [(0.0, 1.0), (0.5, 0.5), (0.25, 0.75)]
    vals = neumann_resolvent(line, 10, 1.0, pairs)
    for got, (x, y) in zip(vals, coords):
        assert got == pytest.approx(float(np.real(_gline_neumann(1.0, x, y))), rel=1e-4)
    # frozen corner-to-corner value 1/sinh(1)
    assert vals[0] == pytest.approx(0.85091812823932155, rel=1e-4)
    assert vals[1] == pytest.approx(1.0819767068693264, rel=1e-4)


def test_neumann_column_consistent_with_pairs(line):
    lg_y = P("01:1")
    col = neumann_column(line, 8, 3.0, lg_y)
    vals = neumann_resolvent(line, 8, 3.0, [(P(":0"), lg_y), (P("0:1"), lg_y)])
    from fractalkit.graphs import build_level_graph

    lg = build_level_graph(line, 8)
    assert np.real(col[lg.vertex_of(P(":0"))]) == pytest.approx(np.real(vals[0]), abs=1e-12)
    assert np.real(col[lg.vertex_of(P("0:1"))]) == pytest.approx(np.real(vals[1]), abs=1e-12)


def test_spectral_within_tail_budget(line):
    pairs = [(P("01:1"), P("01:1")), (P("001:1"), P("10:1")), (P("001:1"), P("0:1"))]
    direct = resolvent_direct(line, 10, 1.0, pairs)
    vals, budget = resolvent_spectral(line, 10, 1.0, pairs, count=400)
    assert budget > 0.0
    assert np.max(np.abs(vals - direct)) <= budget


def test_corner_flux_identities_are_exact(line, sg):
    for spec, m in ((line, 8), (sg, 4)):
        gap = corner_identity_gap(spec, m, 5.0)
        assert gap["scale"] > 0.1
        assert gap["absorbing_flux_gap"] < 1e-10 * gap["scale"]
        assert gap["reflecting_flux_gap"] < 1e-10 * gap["scale"]


def test_direct_raises_at_eigenvalue(line):
    with pytest.raises(SingularityError) as exc:
        resolvent_direct(line, 6, -9.8676227672222012, [(P("01:1"), P("01:1"))])
    assert exc.value.nearest_eigenvalue == pytest.approx(9.8676227672222012, rel=1e-9)


def test_spectral_raises_at_eigenvalue(line):
    with pytest.raises(SingularityError):
        resolvent_spectral(line, 8, -9.869480539782671, [(P("01:1"), P("01:1"))])


def test_near_pole_value_is_preserved(line):
    # one grid eigenvalue sits at 9.8676...; z close by gives a large but
    # meaningful kernel dominated by 2 sin^2(pi/2) / (lambda_0 + z)
    got = resolvent_direct(line, 6, -9.86, [(P("01:1"), P("01:1"))])
    assert got[0] == pytest.approx(2.0 / (9.8676227672222012 - 9.86), rel=1e-2)


def test_resistance_diameter_values(line, sg):
    assert resistance_diameter(line) == pytest.approx(2.0, rel=1e-9)
    assert resistance_diameter(sg) == pytest.approx(4.0 / 3.0, rel=1e-9)
