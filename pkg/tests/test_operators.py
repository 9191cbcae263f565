import math

import numpy as np
import pytest

from fractalkit.graphs import build_level_graph
from fractalkit.operators import (
    apply_resolvent,
    effective_resistance,
    energy,
    green_kernel,
    harmonic,
    laplacian_apply,
    normal_derivative,
    spectrum,
    stiffness,
    weyl_fit,
)
from fractalkit.specs import Point


def _coords(lg):
    # interval vertex coordinate by address recursion
    xs = np.empty(lg.nvert)
    for v in range(lg.nvert):
        pt = lg.point_at(v)
        x = float(pt.label)
        for letter in reversed(pt.word):
            x = (x + letter) / 2.0
        xs[v] = x
    return xs


def test_interval_harmonic_is_linear(line):
    lg = build_level_graph(line, 5)
    u = harmonic(lg, [0.0, 1.0])
    assert np.allclose(u, _coords(lg), atol=1e-12)


def test_interval_energy_of_linear(line):
    # E(x, x) = integral of (u')^2 = 1
    lg = build_level_graph(line, 6)
    u = _coords(lg)
    assert energy(lg, u) == pytest.approx(1.0, abs=1e-12)


def test_gasket_inner_stiffness_rows(sg):
    # hand assembly at m=1: inner degree 4 x 5/3 = 20/3, each edge -5/3
    lg = build_level_graph(sg, 1)
    L = stiffness(lg).toarray()
    assert np.allclose(L.sum(axis=1), 0.0, atol=1e-12)
    inner = lg.interior
    for v in inner:
        assert L[v, v] == pytest.approx(20.0 / 3.0, rel=1e-14)
        offs = sorted(L[v, u] for u in range(lg.nvert) if u != v and L[v, u] != 0)
        assert offs == pytest.approx([-5.0 / 3.0] * 4, rel=1e-14)


def test_gasket_harmonic_fifths_rule(sg):
    # Kronecker data at one corner extends with 2/5 at the adjacent inner
    # vertices and 1/5 at the opposite one
    lg = build_level_graph(sg, 1)
    u = harmonic(lg, [1.0, 0.0, 0.0])
    inner_vals = sorted(float(u[v]) for v in lg.interior)
    assert inner_vals == pytest.approx([0.2, 0.4, 0.4], abs=1e-12)


def test_gasket_level1_dirichlet_eigenvalues(sg):
    # hand 3x3 interior solve: eigenvalues (15, 37.5, 37.5)
    sp = spectrum(sg, 1, "dirichlet", count=3)
    assert sp.eigenvalues[:3] == pytest.approx([15.0, 37.5, 37.5], rel=1e-12)


def test_interval_eigenvalues_approach_sine_modes(line):
    # lambda_1 within 0.1% of pi^2 at m=10
    sp = spectrum(line, 10, "dirichlet", count=3)
    assert sp.eigenvalues[0] == pytest.approx(math.pi**2, rel=1e-3)
    assert sp.eigenvalues[1] == pytest.approx(4 * math.pi**2, rel=1e-3)


def test_neumann_spectrum_starts_at_zero(line):
    sp = spectrum(line, 6, "neumann", count=2)
    assert abs(sp.eigenvalues[0]) < 1e-8
    assert sp.eigenvalues[1] == pytest.approx(math.pi**2, rel=1e-2)


def test_eigenfields_mass_orthonormal(sg):
    lg = build_level_graph(sg, 3)
    sp = spectrum(sg, 3, "dirichlet", count=6)
    G = (sp.fields * lg.mass) @ sp.fields.T
    assert np.allclose(G, np.eye(6), atol=1e-9)


def test_green_kernel_zero_parameter(line):
    # closed form x (1 - y) for x <= y
    lg = build_level_graph(line, 6)
    a = lg.vertex_of(Point.parse("01:1"))  # x = 1/4... corner 1 of [1/8? ]
    xs = _coords(lg)
    b = lg.vertex_of(Point.parse("1:0"))
    vals = green_kernel(lg, 0.0, [(a, b), (a, a)])
    xa, xb = xs[a], xs[b]
    lo, hi = min(xa, xb), max(xa, xb)
    assert vals[0] == pytest.approx(lo * (1 - hi), abs=1e-10)
    assert vals[1] == pytest.approx(xa * (1 - xa), abs=1e-10)


def test_normal_derivative_of_boundary_layer(line):
    # u = sinh(x)/sinh(1) has flux -1/sinh(1) at the left corner
    lg = build_level_graph(line, 9)
    u = np.sinh(_coords(lg)) / math.sinh(1.0)
    nd = normal_derivative(lg, u, int(lg.boundary[0]))
    assert nd == pytest.approx(-1.0 / math.sinh(1.0), rel=1e-4)


def test_laplacian_of_linear_vanishes(line):
    lg = build_level_graph(line, 5)
    res = laplacian_apply(lg, _coords(lg))
    assert np.max(np.abs(res[lg.interior])) < 1e-8


def test_apply_resolvent_eigenvector_case(line):
    # f = phi_1 maps to phi_1 / (z + lambda_1)
    m, z = 8, 1.0
    sp = spectrum(line, m, "dirichlet", count=1)
    lg = build_level_graph(line, m)
    phi = sp.fields[0]
    u, _ = apply_resolvent(lg, z, phi)
    assert np.allclose(u, phi / (z + sp.eigenvalues[0]), atol=1e-8)


def test_effective_resistance_renormalizes(line, sg):
    # interval corner pair: 1; gasket corner pair: 2/3 at every level
    for m in (1, 2, 3):
        assert effective_resistance(line, m, Point((), 0), Point((), 1)) == pytest.approx(
            1.0, rel=1e-12)
        assert effective_resistance(sg, m, Point((), 0), Point((), 1)) == pytest.approx(
            2.0 / 3.0, rel=1e-12)


def test_weyl_fit_interval(line):
    # N(x) = floor(sqrt(x)/pi) drives the exponent to 1/2
    sp = spectrum(line, 10, "dirichlet", count=0)
    n = len(sp.eigenvalues)
    fit = weyl_fit(sp, float(sp.eigenvalues[8]), float(sp.eigenvalues[n // 3]))
    assert fit["slope"] == pytest.approx(0.5, abs=0.03)
