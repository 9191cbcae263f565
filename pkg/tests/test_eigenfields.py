import math

import numpy as np
import pytest

from fractalkit.eigenfields import (
    boundary_flux_matrix,
    calibrate_scale_constant,
    cell_decomposition_residual,
    eta_decay_profile,
    eta_fields,
    eta_integral,
    junction_green,
    junction_labels,
    junction_matrix,
    level1_vertex_ids,
    psi_fields,
)
from fractalkit.graphs import build_level_graph
from fractalkit.operators import laplacian_apply, normal_derivative
from fractalkit.specs import Point


def _coords(lg):
    xs = np.empty(lg.nvert)
    for v in range(lg.nvert):
        pt = lg.point_at(v)
        x = float(pt.label)
        for letter in reversed(pt.word):
            x = (x + letter) / 2.0
        xs[v] = x
    return xs


def test_eta_closed_form_midpoint(line):
    # sinh(sqrt(lam) x)/sinh(sqrt(lam)) at x = 1/2
    m = 10
    lg = build_level_graph(line, m)
    mid = lg.vertex_of(Point.parse("0:1"))
    eta = np.real(eta_fields(line, m, 1.0))
    assert eta[1, mid] == pytest.approx(0.44340944198503695, abs=1e-4)


def test_eta_boundary_data(line, sg):
    # Kronecker data at the corners for any spectral parameter
    for spec, m in ((line, 6), (sg, 3)):
        lg = build_level_graph(spec, m)
        eta = np.real(eta_fields(spec, m, 37.0))
        nb = spec.nboundary
        for p in range(nb):
            for q in range(nb):
                want = 1.0 if p == q else 0.0
                assert eta[p, lg.boundary[q]] == pytest.approx(want, abs=1e-12)


def test_eta_interior_equation(line):
    # (z - Delta) eta = 0 away from the corners
    m, lam = 8, 25.0
    lg = build_level_graph(line, m)
    eta = np.real(eta_fields(line, m, lam))
    for p in range(2):
        res = lam * eta[p] - laplacian_apply(lg, eta[p])
        assert np.max(np.abs(res[lg.interior])) < 1e-8


def test_boundary_flux_matrix_closed_form(line, sg):
    # interval Schur complement: diag sqrt(z) coth sqrt(z),
    # off-diagonal -sqrt(z)/sinh sqrt(z); symmetric in general
    lam = 4.0
    A = np.real(boundary_flux_matrix(line, 10, lam))
    s = math.sqrt(lam)
    assert A[0, 0] == pytest.approx(s / math.tanh(s), rel=1e-4)
    assert A[0, 1] == pytest.approx(-s / math.sinh(s), rel=1e-4)
    B = np.real(boundary_flux_matrix(sg, 4, 7.0))
    assert np.max(np.abs(B - B.T)) < 1e-12


def test_interval_junction_matrix_at_zero(line):
    # single midpoint junction, flux 2 + 2 from the two level-1 cells
    B = junction_matrix(line, 6, 0.0)
    assert B.shape == (1, 1)
    assert np.real(B[0, 0]) == pytest.approx(4.0, rel=1e-10)


def test_gasket_junction_matrix_at_zero(sg):
    # renormalization fixes the z=0 junction flux matrix at every level:
    # diagonal 20/3, off-diagonal -5/3 (hand level-1 assembly)
    B = np.real(junction_matrix(sg, 3, 0.0))
    assert B.shape == (3, 3)
    assert np.allclose(np.diag(B), 20.0 / 3.0, atol=1e-9)
    off = B[~np.eye(3, dtype=bool)]
    assert np.allclose(off, -5.0 / 3.0, atol=1e-9)


def test_junction_green_inverts_matrix(sg):
    z = 11.0
    B = junction_matrix(sg, 3, z)
    G = junction_green(sg, 3, z)
    assert np.allclose(B @ G, np.eye(3), atol=1e-9)


def test_psi_fields_partition_of_identity(line):
    # pinned to the identity on the level-1 vertex set, so at z=0 the
    # fields over all gluing labels sum to the constant one
    m = 5
    psi = np.real(psi_fields(line, m, 0.0))
    assert psi.shape[0] == line.nlabels
    assert np.allclose(psi.sum(axis=0), 1.0, atol=1e-10)


def test_cell_decomposition_residual_small(line, sg):
    # restricting a spectral field to a level-1 cell reproduces it from its
    # corner traces via the rescaled fields on that cell
    for spec, m in ((line, 8), (sg, 4)):
        u = np.real(eta_fields(spec, m, 37.1))[0]
        assert cell_decomposition_residual(spec, m, 37.1, u) < 1e-10


def test_corner_flux_matches_closed_form(line):
    # partial_n eta_1 at the right corner: sqrt(lam) coth(sqrt(lam))
    m = 10
    lg = build_level_graph(line, m)
    for lam in (1.0, 100.0):
        eta = np.real(eta_fields(line, m, lam))
        nd = normal_derivative(lg, eta[1], int(lg.boundary[1]), z=lam)
        s = math.sqrt(lam)
        assert nd == pytest.approx(s / math.tanh(s), rel=1e-3)


def test_eta_integral_closed_form(line):
    # integral of sinh(s x)/sinh(s) = (cosh s - 1)/(s sinh s)
    m = 10
    for lam in (1.0, 100.0):
        s = math.sqrt(lam)
        want = (math.cosh(s) - 1.0) / (s * math.sinh(s))
        assert eta_integral(line, m, lam, p=1) == pytest.approx(want, rel=1e-3)


def test_eta_decay_profile_holds_when_calibrated(sg):
    m, lam = 5, 2.0e4
    c = calibrate_scale_constant(sg, m, [lam])["c_cal"]
    out = eta_decay_profile(sg, m, lam, c_cal=c)
    assert out["bound_holds"]
    assert out["worst_margin"] <= 1e-12
    assert out["samples"] == 369


def test_level1_vertex_ids_interval(line):
    ids = level1_vertex_ids(line, 10)
    lg = build_level_graph(line, 10)
    # gluing-label order: left corner, midpoint junction, right corner
    assert [int(i) for i in ids] == [0, 512, 1024]
    xs = _coords(lg)
    assert [xs[int(i)] for i in ids] == [0.0, 0.5, 1.0]
    assert junction_labels(line) == [1]


def test_calibration_constant_is_order_one(line):
    out = calibrate_scale_constant(line, 10, [1e3, 1e4])
    assert 0.05 < out["c_cal"] < 20.0
    assert out["trail"][-1]["ok"] is False or out["trail"][-1]["c"] == out["c_cal"]
