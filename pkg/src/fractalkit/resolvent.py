"""Resolvent kernels four ways.

Direct: one sparse factorization of (z M + L) per parameter, kernel entries by
unit-load solves. Spectral: eigenexpansion with an explicit truncation budget.
Series: the self-similar cell decomposition, shells of junction couplings at
geometrically scaled parameters; for addressed points the chain of cells
containing both endpoints empties out after finitely many depths, so the
series terminates with zero tail. Reflecting: corner correction of the
absorbing kernel with the inverse corner-flux matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigenfields import (
    boundary_flux_matrix,
    eta_fields,
    junction_green,
    junction_labels,
    psi_fields,
)
from .graphs import build_level_graph
from .operators import (
    _nearest_eigenvalue,
    effective_resistance,
    green_column,
    green_kernel,
    normal_derivative,
    spectrum,
)
from .specs import FractalSpec, Point
from .util import ConfigError, SingularityError

_RDIAM: dict[FractalSpec, float] = {}


def _resolve(lg, pt) -> int:
    if isinstance(pt, str):
        pt = Point.parse(pt)
    return lg.vertex_of(pt) if isinstance(pt, Point) else int(pt)


def resistance_diameter(spec: FractalSpec) -> float:
    """Upper bound on the absorbing kernel, from corner-pair resistances."""
    if spec not in _RDIAM:
        vals = [
            effective_resistance(spec, 3, Point((), a), Point((), b))
            for a in range(spec.nboundary)
            for b in range(a + 1, spec.nboundary)
        ]
        _RDIAM[spec] = 2.0 * max(vals)
    return _RDIAM[spec]


def _pole_guard(spec: FractalSpec, m: int, z, values) -> None:
    # kernel values are bounded by the resistance diameter over the relative
    # distance to the spectrum; magnitudes this far beyond it only arise
    # within rounding distance of a pole, where the solve is meaningless
    top = float(np.max(np.abs(values), initial=0.0))
    if not np.isfinite(top) or top > 1e8 * resistance_diameter(spec):
        lg = build_level_graph(spec, m)
        raise SingularityError(complex(z), _nearest_eigenvalue(lg, complex(z)))


def resolvent_direct(spec: FractalSpec, m: int, z, pairs) -> np.ndarray:
    """Kernel values by direct factorization, one entry per (x, y) pair."""
    lg = build_level_graph(spec, m)
    idpairs = [(_resolve(lg, x), _resolve(lg, y)) for x, y in pairs]
    vals = green_kernel(lg, z, idpairs)
    _pole_guard(spec, m, z, vals)
    return vals


def resolvent_spectral(
    spec: FractalSpec, m: int, z, pairs, count: int | None = None
) -> tuple[np.ndarray, float]:
    """Eigenexpansion kernel values and a tail budget for the dropped modes.

    The budget multiplies the unseen-mode sup norm, taken as 1.25x the largest
    computed one, into the sum of 1/|z + lambda_j| over dropped eigenvalues.
    """
    lg = build_level_graph(spec, m)
    sp = spectrum(spec, m, "dirichlet", count=count)
    zc = complex(z)
    if np.min(np.abs(zc + sp.eigenvalues)) < 1e-9 * max(1.0, abs(zc)):
        raise SingularityError(zc, float(sp.eigenvalues[np.argmin(np.abs(zc + sp.eigenvalues))]))
    xs = np.array([_resolve(lg, x) for x, _ in pairs])
    ys = np.array([_resolve(lg, y) for _, y in pairs])
    k = sp.count
    weights = 1.0 / (zc + sp.eigenvalues[:k])
    vals = np.einsum("jx,jx,j->x", sp.fields[:, xs], sp.fields[:, ys], weights)
    tail_evals = sp.eigenvalues[k:]
    if len(tail_evals):
        sup = 1.25 * float(np.max(sp.sup_norms)) if k else math.inf
        budget = float(sup**2 * np.sum(1.0 / np.abs(zc + tail_evals)))
    else:
        budget = 0.0
    if zc.imag == 0:
        vals = np.real(vals)
    return vals, budget


@dataclass
class SeriesResult:
    value: complex
    depth: int
    terminated: bool
    tail_bound: float

    @property
    def real(self) -> float:
        return float(np.real(self.value))


def resolvent_series(
    spec: FractalSpec, m: int, z, x, y, max_depth: int | None = None
) -> SeriesResult:
    """Self-similar series for the absorbing kernel at one pair of points.

    Each cell containing both endpoints contributes its junction-coupling
    shell at parameter r_w mu_w z, weighted by r_w; descent continues into
    common subcells until an endpoint sits on a subcell corner, where the
    branch vanishes identically. tail_bound is zero for terminated chains and
    otherwise bounds the cut branches by their resistance diameter (real
    nonnegative z only).
    """
    lg = build_level_graph(spec, m)
    J = spec.nletters
    vx, vy = _resolve(lg, x), _resolve(lg, y)
    zc = complex(z)
    addr_x = lg.addresses(vx)
    addr_y = lg.addresses(vy)

    def locals_at(addrs, code, depth):
        """Local (word index, corner) of the point inside cell `code` at depth."""
        shift = J ** (m - depth)
        for widx, p in addrs:
            if widx // shift == code:
                return widx % shift, p
        return None

    total = 0.0 + 0.0j
    depth_used = 0
    truncated: list[tuple[int, ...]] = []

    def walk(word: tuple[int, ...], code: int) -> None:
        nonlocal total, depth_used
        d = len(word)
        lvl = m - d
        loc_x = locals_at(addr_x, code, d)
        loc_y = locals_at(addr_y, code, d)
        if loc_x is None or loc_y is None:
            return
        if lvl == 0:
            return
        lgl = build_level_graph(spec, lvl)
        lx = int(lgl.corners[loc_x[0], loc_x[1]])
        ly = int(lgl.corners[loc_y[0], loc_y[1]])
        bset = set(int(b) for b in lgl.boundary)
        if lx in bset or ly in bset:
            return
        rw = spec.word_r(word)
        zw = rw * spec.word_mu(word) * zc
        jl = junction_labels(spec)
        psi = psi_fields(spec, lvl, zw)
        G = junction_green(spec, lvl, zw)
        vec_x = psi[jl][:, lx]
        vec_y = psi[jl][:, ly]
        total += rw * (vec_x @ G @ vec_y)
        depth_used = max(depth_used, d)
        if max_depth is not None and d >= max_depth:
            truncated.append(word)
            return
        for j in range(J):
            walk(word + (j,), code * J + j)

    walk((), 0)

    tail = 0.0
    for word in truncated:
        # Crude cut bound: remaining branch is a scaled kernel, dominated at
        # real nonnegative z by the zero-parameter kernel's sup.
        if zc.imag == 0 and zc.real >= 0:
            tail += spec.word_r(word) * spec.r[0] * resistance_diameter(spec)
        else:
            tail = math.inf
    value = total if zc.imag != 0 else complex(total.real, 0.0)
    _pole_guard(spec, m, z, [value])
    return SeriesResult(
        value=complex(value),
        depth=depth_used,
        terminated=not truncated,
        tail_bound=float(tail),
    )


def resolvent_series_many(spec, m, z, pairs, max_depth=None) -> list[SeriesResult]:
    return [resolvent_series(spec, m, z, x, y, max_depth=max_depth) for x, y in pairs]


def shell_value(spec: FractalSpec, m: int, z, x, y):
    """Depth-zero junction-coupling term of the cell decomposition.

    This is the part of the absorbing kernel not reachable through any single
    level-1 cell: psi(x)^T B^{-1} psi(y) over the junction labels.
    """
    lg = build_level_graph(spec, m)
    vx, vy = _resolve(lg, x), _resolve(lg, y)
    jl = junction_labels(spec)
    psi = psi_fields(spec, m, z)
    G = junction_green(spec, m, z)
    val = psi[jl][:, vx] @ G @ psi[jl][:, vy]
    return val.item() if isinstance(val, np.generic) else val


def neumann_resolvent(spec: FractalSpec, m: int, z, pairs) -> np.ndarray:
    """Reflecting-kernel values: absorbing kernel plus the corner correction."""
    lg = build_level_graph(spec, m)
    eta = eta_fields(spec, m, z)
    A = boundary_flux_matrix(spec, m, z)
    try:
        C = np.linalg.inv(A)
    except np.linalg.LinAlgError:
        raise SingularityError(complex(z), 0.0) from None
    idpairs = [(_resolve(lg, x), _resolve(lg, y)) for x, y in pairs]
    base = green_kernel(lg, z, idpairs)
    out = np.empty(len(idpairs), dtype=base.dtype if np.iscomplexobj(base) else float)
    for i, (xv, yv) in enumerate(idpairs):
        corr = eta[:, xv] @ C @ eta[:, yv]
        out[i] = base[i] + corr
    _pole_guard(spec, m, z, out)
    return out


def neumann_column(spec: FractalSpec, m: int, z, y) -> np.ndarray:
    lg = build_level_graph(spec, m)
    yv = _resolve(lg, y)
    eta = eta_fields(spec, m, z)
    A = boundary_flux_matrix(spec, m, z)
    C = np.linalg.inv(A)
    return green_column(lg, z, yv) + eta.T @ (C @ eta[:, yv])


def corner_identity_gap(spec: FractalSpec, m: int, z, probes: int = 4) -> dict:
    """Exactness of the corner-flux identities for both kernels.

    Checks that the z-corrected corner flux of the absorbing kernel column
    reproduces -eta_p(y), and that the reflecting kernel's corner fluxes
    vanish, at a few interior load points.
    """
    lg = build_level_graph(spec, m)
    eta = eta_fields(spec, m, z)
    interior = lg.interior
    ys = interior[np.linspace(0, len(interior) - 1, probes).astype(int)]
    gap_absorbing = 0.0
    gap_reflecting = 0.0
    scale = 0.0
    for y in ys:
        col = green_column(lg, z, int(y))
        ncol = neumann_column(spec, m, z, int(y))
        for a, p in enumerate(lg.boundary):
            flux = normal_derivative(lg, col, int(p), cell=(), z=z)
            gap_absorbing = max(gap_absorbing, abs(flux + eta[a][y]))
            scale = max(scale, abs(eta[a][y]))
            fluxn = normal_derivative(lg, ncol, int(p), cell=(), z=z)
            gap_reflecting = max(gap_reflecting, abs(fluxn))
    return {
        "absorbing_flux_gap": float(gap_absorbing),
        "reflecting_flux_gap": float(gap_reflecting),
        "scale": float(scale),
        "probes": int(len(ys)),
    }
