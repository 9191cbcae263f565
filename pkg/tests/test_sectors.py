import cmath
import math

import numpy as np
import pytest

from fractalkit.sectors import (
    DoublingModel,
    doubling_model_for,
    eigen_sup_ratio,
    im_part_sandwich,
    pl_classical_envelope,
    pl_general_envelope,
    power_map,
    tau_sequence,
    verify_pl_classical,
    verify_sector_estimates,
)
from fractalkit.specs import Point
from fractalkit.util import ModelError

P = Point.parse
M = 8.0


def _oscillating(r):
    r = np.asarray(r, dtype=float)
    return r**0.45 * np.exp(0.04 * np.sin(2.0 * math.pi * np.log(r) / math.log(M)))


SYNTHETIC = (
    lambda r: np.asarray(r, dtype=float) ** 0.35,
    lambda r: np.asarray(r, dtype=float) ** 0.5,
    _oscillating,
)


def test_telescoping_identity_for_synthetic_growths():
    for f in SYNTHETIC:
        sc = tau_sequence(f, M, 0.02, levels=12)
        assert sc.telescoping_gap() <= 1e-12
        assert not sc.enlarged
        lo, hi = sc.model.window
        sums = sc.partial_sums()
        assert np.all(sums >= lo - 1e-12) and np.all(sums <= hi + 1e-12)


def test_power_map_matches_closed_form():
    # f(x) = x^b integrates to H(z) = z^b / b
    pm = power_map(0.5)
    got = pm.evaluate(4j)
    want = 4.0 * cmath.exp(1j * math.pi / 4)
    assert abs(got - want) < 1e-8
    assert abs(pm.evaluate(complex(16.0)) - 8.0) < 1e-8
    assert pm.growth_exponent(100.0) == pytest.approx(0.5, abs=1e-12)


def test_power_map_rejects_degenerate_inputs():
    with pytest.raises(ModelError):
        tau_sequence(lambda x: x**0.5, 1.0, 0.02)
    with pytest.raises(ModelError):
        tau_sequence(lambda x: x**0.5, 8.0, 0.02, levels=2)
    with pytest.raises(ModelError):
        tau_sequence(lambda x: -np.asarray(x) ** 0.5, 8.0, 0.02)


def test_im_part_sandwich_half_power():
    # Im H(ir) = sqrt(2) r^{1/2} exactly, so every ratio is sqrt(2)
    pm = power_map(0.5)
    sw = im_part_sandwich(pm, np.geomspace(8.0, 1.0e4, 40))
    assert sw["passed"]
    assert sw["violations"] == 0
    assert sw["c_lo"] == pytest.approx(math.sqrt(2.0), rel=1e-10)
    assert sw["c_hi"] == pytest.approx(math.sqrt(2.0), rel=1e-10)


def test_im_part_sandwich_rejects_small_moduli():
    pm = power_map(0.5)
    with pytest.raises(ModelError):
        im_part_sandwich(pm, [1.0, 20.0])


def test_classical_envelope_shape():
    env = pl_classical_envelope(1.0, 0.5, math.pi / 2)
    # axis: full decay; sector edge: no decay
    assert env(100.0, 0.0) == pytest.approx(math.exp(-10.0), rel=1e-12)
    assert env(100.0, math.pi / 2) == pytest.approx(1.0, rel=1e-12)
    want = math.exp(-10.0 * math.sin(math.pi / 8) / math.sin(math.pi / 4))
    assert env(100.0, math.pi / 4) == pytest.approx(want, rel=1e-12)
    with pytest.raises(ModelError):
        pl_classical_envelope(1.0, 2.0, math.pi)


def test_classical_envelope_dominates_exp_sqrt():
    out = verify_pl_classical()
    assert out["passed"]
    assert out["violations"] == 0
    assert len(out["samples"]) == 27


def test_general_envelope_constants():
    dm = doubling_model_for_line()
    env = pl_general_envelope(lambda r: r**0.4, dm, math.pi / 2)
    assert env.ctilde == pytest.approx((dm.beta1 - dm.eps) * math.pi, rel=1e-12)
    assert env.norm == pytest.approx(math.sin(math.pi * (dm.beta2 + dm.eps)), rel=1e-12)
    assert env(10.0, math.pi / 2) == pytest.approx(1.0, rel=1e-12)
    assert env(10.0, 0.0) < env(5.0, 0.0) < 1.0


def doubling_model_for_line():
    from fractalkit.specs import interval

    return doubling_model_for(interval())


def test_doubling_model_validation():
    with pytest.raises(ModelError):
        DoublingModel(beta1=0.7, beta2=0.3)
    with pytest.raises(ModelError):
        DoublingModel(beta1=0.4, beta2=0.45, eps=0.1)
    dm = DoublingModel(beta1=0.3, beta2=0.7, eps=0.02)
    assert dm.window == (1.0 - 0.7 - 0.02, 1.0 - 0.3 + 0.02)


def test_doubling_model_for_builtins(line, sg):
    for spec in (line, sg):
        dm = doubling_model_for(spec)
        assert 0.0 < dm.beta1 < dm.beta2 < 1.0
        assert 3.0 * dm.eps <= min(dm.beta1, 1.0 - dm.beta2, dm.beta2 - dm.beta1) + 1e-12


def test_model_branch_rejects_wrong_growth():
    with pytest.raises(ModelError):
        tau_sequence(
            lambda r: np.asarray(r) ** 0.5,
            8.0,
            0.01,
            model=DoublingModel(beta1=0.1, beta2=0.2, eps=0.01),
        )


def test_model_with_constants_enlarges_scale():
    sc = tau_sequence(
        lambda r: np.asarray(r) ** 0.5,
        8.0,
        0.02,
        model=DoublingModel(beta1=0.3, beta2=0.7, c1=0.5, c2=2.0, eps=0.02),
    )
    assert sc.enlarged
    assert sc.M > 8.0
    assert sc.telescoping_gap() <= 1e-12


def test_sector_estimates_interval(line):
    pairs = [(P("001:1"), P("10:1")), (P("01:1"), P("010:1")), (P("0001:1"), P("11:1"))]
    out = verify_sector_estimates(line, 6, pairs)
    assert out["passed"]
    assert out["green_kappa5"] > 0.0
    assert out["green_violations"] == 0
    assert out["weak_green_constant"] > 0.0
    assert out["weak_eta_constant"] > 0.0


def test_sector_estimates_rejects_outside_rays(line):
    pairs = [(P("01:1"), P("10:1"))]
    with pytest.raises(ModelError):
        verify_sector_estimates(line, 5, pairs, rays=(math.pi,), alpha=7 * math.pi / 8)


def test_eigen_sup_ratio_stable(line):
    out = eigen_sup_ratio(line, 8, [50.0, 200.0, 800.0])
    assert out["stable"]
    assert out["exponent"] == pytest.approx(0.25, abs=1e-12)
    assert [r["nterms"] for r in out["rows"]] == [2, 4, 9]
    for row in out["rows"]:
        assert row["sup_constant"] > 0.0
        assert row["mult_constant"] > 0.0
