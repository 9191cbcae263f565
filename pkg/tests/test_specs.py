import json
import math

import pytest

from fractalkit.specs import FractalSpec, Point, builtin, gasket, interval, load_spec
from fractalkit.util import ConfigError


def test_point_roundtrip():
    for text in (":0", "012:1", "0000:2", "21:0"):
        assert str(Point.parse(text)) == text


def test_point_parse_rejects_bad_addresses():
    with pytest.raises(ConfigError):
        Point.parse("012")
    with pytest.raises(ConfigError):
        Point.parse("0a:1")
    with pytest.raises(ConfigError):
        Point.parse("01:x")


def test_interval_constants(line):
    assert line.nletters == 2
    assert line.nboundary == 2
    assert line.r == (0.5, 0.5)
    assert line.S == pytest.approx(1.0, abs=1e-14)
    assert line.mu == pytest.approx((0.5, 0.5), abs=1e-14)
    assert line.resistance_exponent == pytest.approx(2.0, abs=1e-14)


def test_gasket_constants(sg):
    # S solves 3 (3/5)^S = ... : S = log 3 / log(5/3)
    assert sg.nletters == 3
    assert sg.nboundary == 3
    assert sg.S == pytest.approx(math.log(3) / math.log(5 / 3), rel=1e-14)
    assert sg.mu == pytest.approx((1 / 3, 1 / 3, 1 / 3), abs=1e-12)
    assert sg.S / (sg.S + 1.0) == pytest.approx(math.log(3) / math.log(5), rel=1e-14)


def test_measure_weights_sum_to_one(line, sg):
    for spec in (line, sg):
        assert sum(spec.mu) == pytest.approx(1.0, abs=1e-12)
        assert spec.renormalization_residual() < 1e-12


def test_word_scalings(sg):
    word = (0, 2, 1)
    assert sg.word_r(word) == pytest.approx((3 / 5) ** 3, rel=1e-14)
    assert sg.word_mu(word) == pytest.approx((1 / 3) ** 3, rel=1e-14)


def test_json_roundtrip(sg):
    doc = sg.to_json()
    back = FractalSpec.from_json(doc, name=sg.name)
    assert back.cell_boundary_map == sg.cell_boundary_map
    assert back.boundary == sg.boundary
    assert back.r == sg.r
    assert back.S == pytest.approx(sg.S, rel=1e-14)


def test_builtin_lookup():
    assert builtin("interval").name == "interval"
    assert builtin("gasket").name == "gasket"
    with pytest.raises(ConfigError):
        builtin("dodecahedron")


def test_load_spec_from_file(tmp_path, sg):
    path = tmp_path / "sg.json"
    path.write_text(sg.to_json())
    spec = load_spec(str(path))
    assert spec.nletters == 3
    assert spec.S == pytest.approx(sg.S, rel=1e-14)


def test_validate_rejects_expanding_contractions(line):
    doc = json.loads(line.to_json())
    doc["r"] = [1.5, 0.5]
    with pytest.raises(ConfigError):
        FractalSpec.from_json(json.dumps(doc))
