import math

import pytest

from fractalkit.partitions import (
    corner_pair,
    distance_ratio_scan,
    estimate_gamma,
    k_of_lambda,
    partition_at_scale,
    partition_metric,
)
from fractalkit.specs import Point
from fractalkit.util import ConfigError


def test_interval_partition_word_lengths(line):
    # cells satisfy r_w <= e^-k < r_parent; at k=1 that is words of length 2
    part = partition_at_scale(line, 1.0)
    assert {len(w) for w in part.words} == {2}
    part0 = partition_at_scale(line, 0.0)
    assert {len(w) for w in part0.words} == {1}


def test_gasket_partition_word_lengths(sg):
    # (3/5)^m <= e^-2 first holds at m=4: 0.1296 <= 0.1353 < 0.216
    part = partition_at_scale(sg, 2.0)
    assert {len(w) for w in part.words} == {4}


def test_interval_corner_staircase(line):
    # chain graph: distance = cell count 2^(word length)
    x, y = corner_pair(line)
    want = {0: 2, 1: 4, 2: 8, 3: 32, 4: 64}
    for k, d in want.items():
        pm = partition_metric(line, float(k))
        assert pm.graph_distance(x, y) == d


def test_gasket_corner_staircase(sg):
    # two corners at level m are 2^m steps apart; m(k) = ceil(k / log(5/3))
    x, y = corner_pair(sg)
    for k, d in ((1, 4), (2, 16), (3, 64), (4, 256)):
        pm = partition_metric(sg, float(k))
        assert pm.graph_distance(x, y) == d


def test_gamma_fit_interval(line):
    # staircase of word lengths (2,3,5,6) at k=1..4 puts the fitted rate at
    # 1.4 log 2; the idealized continuum rate is 1
    out = estimate_gamma(line)
    assert out["gamma"] == pytest.approx(1.4 * math.log(2.0), abs=1e-9)


def test_gamma_fit_gasket(sg):
    # word lengths (2,4,6,8) at k=1..4: fitted rate exactly 2 log 2
    out = estimate_gamma(sg)
    assert out["gamma"] == pytest.approx(2.0 * math.log(2.0), abs=1e-9)


def test_k_of_lambda_formula(line, sg):
    # floor(log lambda / (S+1) - log c - 2), clipped at zero
    assert k_of_lambda(sg, 1.0e6) == 2
    assert k_of_lambda(line, 1.0e6) == math.floor(math.log(1e6) / 2.0 - 2.0)
    assert k_of_lambda(line, 1.0) == 0
    assert k_of_lambda(sg, 10.0) == 0


def test_metric_extended_to_interior_points(line):
    pm = partition_metric(line, 1.0)
    mid = Point.parse("0:1")
    # exact vertices use the graph metric
    assert pm.distance(Point((), 0), Point((), 1)) == 4.0
    assert pm.distance(mid, mid) == 0.0
    # interiors of adjacent cells sit a half step from each shared corner
    a = Point.parse("000:1")   # inside cell 00
    b = Point.parse("010:1")   # inside cell 01
    assert pm.distance(a, b) == 1.0
    c = Point.parse("001:1")   # same cell as a
    assert pm.distance(a, c) == 0.0


def test_metric_symmetry_and_triangle(sg):
    pm = partition_metric(sg, 1.0)
    pts = [Point((), 0), Point((0, 1), 2), Point((2,), 1), Point((1, 0, 2), 0)]
    for x in pts:
        for y in pts:
            assert pm.distance(x, y) == pm.distance(y, x)
            for w in pts:
                assert pm.distance(x, y) <= pm.distance(x, w) + pm.distance(w, y) + 1e-12


def test_distance_ratio_scan_interval(line):
    # a log-2 scale step halves the cells, so every measured ratio is exactly
    # 2 and both model rates e^{k'} and e^{(S+1)k'/2} are also exactly 2
    out = distance_ratio_scan(line, [1, 2, 3], math.log(2.0))
    assert out["lower_rate"] == pytest.approx(2.0, rel=1e-12)
    assert out["upper_rate"] == pytest.approx(2.0, rel=1e-12)
    for rec in out["records"]:
        assert rec["ratio"] == pytest.approx(2.0, rel=1e-12)
    assert out["c_low"] == pytest.approx(1.0, rel=1e-12)
    assert out["c_up"] == pytest.approx(1.0, rel=1e-12)


def test_partition_scale_validation(line):
    with pytest.raises(ConfigError):
        partition_metric(line, -1.0)
