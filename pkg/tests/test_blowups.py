import pytest

from fractalkit.blowups import (
    BlowupAddress,
    base_address,
    blowup_convergence,
    blowup_kernel,
    halfline_oracle,
    matched_refinement_gap,
)
from fractalkit.specs import Point
from fractalkit.util import ConfigError, ModelError

P = Point.parse


def test_address_parse_forms():
    a = BlowupAddress.parse("012")
    assert a.preperiod == (0, 1, 2) and a.period == ()
    b = BlowupAddress.parse("01(2)")
    assert b.preperiod == (0, 1) and b.period == (2,)
    c = BlowupAddress.parse("(0)")
    assert c.preperiod == () and c.period == (0,)
    assert c.letters(5) == (0, 0, 0, 0, 0)
    assert BlowupAddress.parse("0(12)").letters(6) == (0, 1, 2, 1, 2, 1)


def test_address_parse_rejections():
    with pytest.raises(ConfigError):
        BlowupAddress.parse("")
    with pytest.raises(ConfigError):
        BlowupAddress.parse("0a")
    with pytest.raises(ConfigError):
        BlowupAddress.parse("01(2")


def test_address_letter_bounds():
    fin = BlowupAddress.parse("01")
    assert fin.letter(2) == 1
    with pytest.raises(ConfigError):
        fin.letter(3)
    with pytest.raises(ConfigError):
        fin.letter(0)


def test_base_address_prepends_reversed_letters():
    om = BlowupAddress.parse("(0)")
    assert str(base_address(om, 2, P("1:0"))) == "001:0"
    om2 = BlowupAddress.parse("12")
    assert base_address(om2, 2, Point((), 1)) == Point((2, 1), 1)


def test_one_step_kernel_is_rescaled_unit_solve(line):
    # half of [0, 2] seen from the unit cell: value at (1/2, 1) is twice the
    # unit-interval kernel at parameter 4 and points (1/4, 1/2)
    om = BlowupAddress.parse("(0)")
    got = blowup_kernel(line, 10, om, 1, 1.0, [(P("01:1"), P(":1"))])
    assert got[0] == pytest.approx(0.16884901985570546, rel=1e-4)


def test_halfline_oracle_values():
    assert halfline_oracle(1.0, 0.25, 0.75) == pytest.approx(0.11932560927059555, rel=1e-12)
    assert halfline_oracle(1.0, 0.5, 0.5) == pytest.approx(0.31606027941427884, rel=1e-12)
    assert halfline_oracle(1.0, 1.0, 2.0) == pytest.approx(0.15904618640178919, rel=1e-12)
    assert halfline_oracle(3.0, 0.3, 1.7) == halfline_oracle(3.0, 1.7, 0.3)


def test_interval_exhaustion_converges_to_halfline(line):
    om = BlowupAddress.parse("(0)")
    pairs = [(P("001:1"), P("10:1")), (P("01:1"), P(":1"))]
    conv = blowup_convergence(line, 10, om, 1.0, pairs, 6)
    targets = [halfline_oracle(1.0, 0.25, 0.75), halfline_oracle(1.0, 0.5, 1.0)]
    assert conv["identity_ok"]
    for rec, want in zip(conv["records"], targets):
        assert rec["increments_positive"]
        assert rec["increments_decreasing"]
        assert rec["ladder_vs_direct"] < 1e-3
        assert rec["values"][-1] == pytest.approx(want, abs=1e-3)


def test_gasket_exhaustion_increments_decay(sg):
    om = BlowupAddress.parse("(0)")
    pairs = [(Point((0, 1), 2), Point((1, 0), 1))]
    conv = blowup_convergence(sg, 6, om, 1.0, pairs, 3)
    rec = conv["records"][0]
    assert rec["increments_positive"]
    assert rec["increments_decreasing"]
    assert conv["matched_identity_gap"] < 1e-9


def test_matched_identity_is_roundoff_exact(line):
    om = BlowupAddress.parse("(0)")
    gap = matched_refinement_gap(line, 10, om, 1.0, [(P("001:1"), P("10:1"))])
    assert gap < 1e-12


def test_convergence_rejects_bad_parameters(line):
    om = BlowupAddress.parse("(0)")
    pairs = [(P("01:1"), P(":1"))]
    with pytest.raises(ModelError):
        blowup_convergence(line, 8, om, 1.0 + 2.0j, pairs, 2)
    with pytest.raises(ModelError):
        blowup_convergence(line, 8, om, -3.0, pairs, 2)
    with pytest.raises(ConfigError):
        blowup_convergence(line, 8, om, 1.0, pairs, 0)


def test_matched_check_rejects_deep_pairs(line):
    om = BlowupAddress.parse("(0)")
    deep = Point((0,) * 8, 1)
    with pytest.raises(ConfigError):
        matched_refinement_gap(line, 8, om, 1.0, [(deep, P(":1"))])
