"""Energy forms, Laplacians, resolvent solves, and spectra on level graphs."""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal, eigvalsh_tridiagonal
from scipy.sparse import coo_matrix, csc_matrix, csr_matrix, diags
from scipy.sparse.csgraph import reverse_cuthill_mckee
from scipy.sparse.linalg import splu, spsolve

from .graphs import LevelGraph, build_level_graph
from .specs import FractalSpec, Point
from .util import CapacityError, ConfigError, SingularityError

DENSE_EIG_CAP = 8000
RESISTANCE_CAP = 20000

_LOCK = threading.Lock()
_STIFFNESS: dict[tuple[FractalSpec, int], csr_matrix] = {}
_FACTORS: OrderedDict = OrderedDict()
_FACTOR_CAP = 128
_SPECTRA: dict[tuple[FractalSpec, int, str], "_SpectrumStore"] = {}


def stiffness(lg: LevelGraph) -> csr_matrix:
    """Graph stiffness matrix L of the renormalized energy form."""
    key = (lg.spec, lg.m)
    with _LOCK:
        if key not in _STIFFNESS:
            u, v, c = lg.edges_u, lg.edges_v, lg.edges_c
            rows = np.concatenate([u, v, u, v])
            cols = np.concatenate([v, u, u, v])
            data = np.concatenate([-c, -c, c, c])
            _STIFFNESS[key] = coo_matrix(
                (data, (rows, cols)), shape=(lg.nvert, lg.nvert)
            ).tocsr()
        return _STIFFNESS[key]


def energy(lg: LevelGraph, u: np.ndarray, v: np.ndarray | None = None):
    """Sesquilinear energy sum over edges, conductances included."""
    du = u[lg.edges_u] - u[lg.edges_v]
    dv = du if v is None else (v[lg.edges_u] - v[lg.edges_v])
    val = np.sum(lg.edges_c * du * np.conj(dv))
    return complex(val) if np.iscomplexobj(du) or np.iscomplexobj(dv) else float(val)


def laplacian_apply(lg: LevelGraph, u: np.ndarray) -> np.ndarray:
    """Pointwise Laplacian Delta u = -M^{-1} L u on all vertices."""
    return -(stiffness(lg) @ u) / lg.mass


def system_matrix(lg: LevelGraph, z) -> csr_matrix:
    """The operator z M + L as a sparse matrix, real when z is real."""
    zc = complex(z)
    L = stiffness(lg)
    if zc == 0:
        return L
    if zc.imag == 0:
        return L + diags(zc.real * lg.mass)
    return L.astype(complex) + diags(zc * lg.mass)


def _factorize(lg: LevelGraph, z, free: np.ndarray, tag: str):
    """LU of the (z M + L) block on the free vertices, cached."""
    zc = complex(z)
    use_complex = zc.imag != 0.0
    key = (lg.spec, lg.m, zc, tag)
    with _LOCK:
        if key in _FACTORS:
            _FACTORS.move_to_end(key)
            return _FACTORS[key]
    sub = system_matrix(lg, zc if use_complex else zc.real)[free][:, free]
    try:
        lu = splu(csc_matrix(sub))
    except RuntimeError:
        raise SingularityError(zc, _nearest_eigenvalue(lg, zc)) from None
    with _LOCK:
        _FACTORS[key] = lu
        _FACTORS.move_to_end(key)
        while len(_FACTORS) > _FACTOR_CAP:
            _FACTORS.popitem(last=False)
    return lu


def _nearest_eigenvalue(lg: LevelGraph, z: complex) -> float:
    key = (lg.spec, lg.m, "dirichlet")
    store = _SPECTRA.get(key)
    if store is None:
        if len(lg.interior) > DENSE_EIG_CAP:
            return float("nan")
        sp = spectrum(lg.spec, lg.m, "dirichlet", count=0)
        evals = sp.eigenvalues
    else:
        evals = store.eigenvalues
    return float(evals[np.argmin(np.abs(evals + z))])


def solve_fixed(
    lg: LevelGraph,
    z,
    fixed_ids: np.ndarray,
    fixed_values: np.ndarray,
    tag: str,
    rhs: np.ndarray | None = None,
) -> np.ndarray:
    """Solve (z M + L) u = rhs on free vertices with u prescribed on fixed_ids.

    fixed_values may be (nfixed,) or (nfixed, k) for k fields at once; the
    result has matching shape on the full vertex set.
    """
    zc = complex(z)
    mask = np.ones(lg.nvert, dtype=bool)
    mask[fixed_ids] = False
    free = np.nonzero(mask)[0]
    lu = _factorize(lg, zc, free, tag)
    A = system_matrix(lg, zc if zc.imag != 0 else zc.real)
    vals = np.asarray(fixed_values, dtype=complex if zc.imag != 0 else float)
    single = vals.ndim == 1
    if single:
        vals = vals[:, None]
    coupling = A[free][:, fixed_ids]
    b = -(coupling @ vals)
    if rhs is not None:
        r = np.asarray(rhs)
        b = b + (r[free, None] if r.ndim == 1 else r[free])
    x = lu.solve(np.ascontiguousarray(b))
    scale = max(np.max(np.abs(vals), initial=0.0), np.max(np.abs(b), initial=0.0), 1e-300)
    resid = np.max(np.abs(A[free][:, free] @ x - b)) / scale
    if not np.isfinite(resid) or resid > 1e-6:
        raise SingularityError(zc, _nearest_eigenvalue(lg, zc))
    out = np.zeros((lg.nvert, vals.shape[1]), dtype=x.dtype)
    out[fixed_ids] = vals
    out[free] = x
    return out[:, 0] if single else out


def harmonic(lg: LevelGraph, boundary_values: Iterable[float]) -> np.ndarray:
    """Energy-minimizing extension of the given global-corner values."""
    vals = np.asarray(list(boundary_values), dtype=float)
    if vals.shape != (lg.spec.nboundary,):
        raise ConfigError("need one boundary value per global corner")
    return solve_fixed(lg, 0.0, lg.boundary, vals, "dirichlet")


def normal_derivative(
    lg: LevelGraph,
    u: np.ndarray,
    at,
    cell: tuple[int, ...] = (),
    z=None,
):
    """Renormalized outward flux of u at a vertex, restricted to one cell.

    With z=None this is the conductance sum c(p,y) (u(p) - u(y)) over the
    cell's edges at p, the quantity entering the discrete integration-by-parts
    identity. With a spectral parameter z the cell's share of the mass term is
    added, i.e. the cell-restricted row of (z M + L) u, which is the exact flux
    for fields solving (z M + L) u = 0 inside the cell.
    """
    p = lg.vertex_of(at) if isinstance(at, Point) else int(at)
    idx = lg.cell_edges(cell)
    eu = lg.edges_u[idx]
    ev = lg.edges_v[idx]
    ec = lg.edges_c[idx]
    hit_u = eu == p
    hit_v = ev == p
    flux = np.sum(ec[hit_u] * (u[p] - u[ev[hit_u]]))
    flux += np.sum(ec[hit_v] * (u[p] - u[eu[hit_v]]))
    if z is not None:
        flux = flux + z * lg.cell_mass_at(p, cell) * u[p]
    return complex(flux) if np.iscomplexobj(u) or isinstance(z, complex) else float(flux)


def green_column(lg: LevelGraph, z, y: int) -> np.ndarray:
    """Dirichlet resolvent kernel column G^{(z)}(., y) on the full vertex set."""
    zc = complex(z)
    interior = lg.interior
    if y not in set(int(v) for v in interior):
        return np.zeros(lg.nvert)
    pos = np.full(lg.nvert, -1)
    pos[interior] = np.arange(len(interior))
    lu = _factorize(lg, zc, interior, "dirichlet")
    e = np.zeros(len(interior), dtype=complex if zc.imag != 0 else float)
    e[pos[y]] = 1.0
    col = np.zeros(lg.nvert, dtype=e.dtype)
    col[interior] = lu.solve(e)
    return col


def green_kernel(lg: LevelGraph, z, pairs: list[tuple[int, int]]) -> np.ndarray:
    """Dirichlet resolvent kernel values G^{(z)}(x, y) at vertex-id pairs."""
    zc = complex(z)
    cols: dict[int, np.ndarray] = {}
    out = np.empty(len(pairs), dtype=complex if zc.imag != 0 else float)
    for i, (x, y) in enumerate(pairs):
        if y not in cols:
            cols[y] = green_column(lg, zc, int(y))
        out[i] = cols[y][int(x)]
    return out


def apply_resolvent(lg: LevelGraph, z, f: np.ndarray) -> tuple[np.ndarray, float]:
    """Solve (z M + L) u = M f with zero boundary values; returns (u, residual)."""
    zc = complex(z)
    interior = lg.interior
    lu = _factorize(lg, zc, interior, "dirichlet")
    rhs = (lg.mass * np.asarray(f))[interior]
    if zc.imag != 0:
        rhs = rhs.astype(complex)
    x = lu.solve(np.ascontiguousarray(rhs))
    u = np.zeros(lg.nvert, dtype=x.dtype)
    u[interior] = x
    A = system_matrix(lg, zc if zc.imag != 0 else zc.real)
    resid = (A @ u - lg.mass * f)[interior]
    scale = max(float(np.max(np.abs(rhs), initial=0.0)), 1e-300)
    rel = float(np.max(np.abs(resid)) / scale) if len(resid) else 0.0
    if not np.isfinite(rel) or rel > 1e-6:
        raise SingularityError(zc, _nearest_eigenvalue(lg, zc))
    return u, rel


# -- spectra --------------------------------------------------------------


@dataclass(eq=False)
class Spectrum:
    """Eigenpairs of -Delta at one level: L phi = lambda M phi.

    eigenvalues holds the full ascending spectrum of the chosen boundary
    condition; fields holds mass-orthonormal eigenfields for the lowest
    `count` of them, as rows over the full vertex set.
    """

    spec: FractalSpec
    m: int
    bc: str
    eigenvalues: np.ndarray
    fields: np.ndarray

    @property
    def count(self) -> int:
        return self.fields.shape[0]

    @property
    def sup_norms(self) -> np.ndarray:
        return np.max(np.abs(self.fields), axis=1) if self.count else np.zeros(0)


class _SpectrumStore:
    def __init__(self, eigenvalues, fields, ids, tridiag):
        self.eigenvalues = eigenvalues
        self.fields = fields  # (k, nvert), grows on demand
        self.ids = ids
        self.tridiag = tridiag  # None, or (d0, e, perm, dinv) for regrowth


def _fix_signs(fields: np.ndarray) -> np.ndarray:
    for i in range(fields.shape[0]):
        row = fields[i]
        j = int(np.argmax(np.abs(row)))
        if row[j] < 0:
            fields[i] = -row
    return fields


def spectrum(spec: FractalSpec, m: int, bc: str = "dirichlet", count: int | None = None) -> Spectrum:
    """Eigenvalues and eigenfields at level m, cached per boundary condition.

    bc "dirichlet" restricts to interior vertices (fields vanish on the global
    corners); "neumann" uses all vertices. count limits how many eigenfields
    are materialized; eigenvalues are always computed in full.
    """
    if bc not in ("dirichlet", "neumann"):
        raise ConfigError(f"unknown boundary condition {bc!r}")
    lg = build_level_graph(spec, m)
    key = (spec, m, bc)
    with _LOCK:
        store = _SPECTRA.get(key)
    if store is None:
        store = _compute_spectrum(lg, bc)
        with _LOCK:
            _SPECTRA[key] = store
    want = len(store.eigenvalues) if count is None and store.tridiag is None else (
        count if count is not None else min(len(store.eigenvalues), 512)
    )
    want = min(want, len(store.eigenvalues))
    if store.fields.shape[0] < want:
        _grow_fields(lg, store, want)
    return Spectrum(spec, m, bc, store.eigenvalues, store.fields[:want])


def _reduced_system(lg: LevelGraph, bc: str):
    ids = lg.interior if bc == "dirichlet" else np.arange(lg.nvert)
    L = stiffness(lg)[ids][:, ids]
    dinv = 1.0 / np.sqrt(lg.mass[ids])
    S = csr_matrix(diags(dinv) @ L @ diags(dinv))
    return ids, S, dinv


def _compute_spectrum(lg: LevelGraph, bc: str) -> _SpectrumStore:
    ids, S, dinv = _reduced_system(lg, bc)
    n = S.shape[0]
    perm = reverse_cuthill_mckee(S, symmetric_mode=True)
    Sp = S[perm][:, perm].tocsr()
    coo = Sp.tocoo()
    bandwidth = int(np.max(np.abs(coo.row - coo.col))) if coo.nnz else 0
    if bandwidth <= 1:
        d0 = np.real(Sp.diagonal())
        e = np.real(Sp.diagonal(-1))
        evals = eigvalsh_tridiagonal(d0, e)
        if bc == "neumann":
            evals = np.maximum(evals, 0.0)
        return _SpectrumStore(evals, np.zeros((0, lg.nvert)), ids, (d0, e, perm, dinv))
    if n > DENSE_EIG_CAP:
        raise CapacityError(
            f"dense eigensolve needs {n} vertices (cap {DENSE_EIG_CAP}); "
            "reduce the level"
        )
    w, V = eigh(S.toarray())
    if bc == "neumann":
        w = np.maximum(w, 0.0)
    fields = np.zeros((n, lg.nvert))
    fields[:, ids] = (dinv[:, None] * V).T
    _fix_signs(fields)
    return _SpectrumStore(w, fields, ids, None)


def _grow_fields(lg: LevelGraph, store: _SpectrumStore, want: int) -> None:
    d0, e, perm, dinv = store.tridiag
    w, V = eigh_tridiagonal(d0, e, select="i", select_range=(0, want - 1))
    n = len(d0)
    fields = np.zeros((want, lg.nvert))
    sub = np.empty(n)
    for i in range(want):
        sub[perm] = V[:, i]
        fields[i, store.ids] = dinv * sub
    _fix_signs(fields)
    with _LOCK:
        if fields.shape[0] > store.fields.shape[0]:
            store.fields = fields


def weyl_count(sp: Spectrum, x) -> np.ndarray:
    """Eigenvalue counting function N(x) = #{lambda_j <= x}."""
    return np.searchsorted(sp.eigenvalues, np.asarray(x, dtype=float), side="right")


def weyl_fit(sp: Spectrum, lo: float, hi: float, npts: int = 40) -> dict:
    """Least-squares slope of log N against log x over [lo, hi]."""
    xs = np.exp(np.linspace(np.log(lo), np.log(hi), npts))
    ns = weyl_count(sp, xs)
    keep = ns > 0
    if keep.sum() < 2:
        raise ConfigError("counting window contains too few eigenvalues")
    slope, intercept = np.polyfit(np.log(xs[keep]), np.log(ns[keep]), 1)
    resid = np.log(ns[keep]) - (slope * np.log(xs[keep]) + intercept)
    return {
        "slope": float(slope),
        "intercept": float(intercept),
        "max_abs_residual": float(np.max(np.abs(resid))),
        "window": [float(lo), float(hi)],
        "points_used": int(keep.sum()),
    }


def effective_resistance(spec: FractalSpec, m: int, x: Point | int, y: Point | int) -> float:
    """Two-point effective resistance on the level-m network."""
    lg = build_level_graph(spec, m)
    if lg.nvert > RESISTANCE_CAP:
        raise CapacityError(
            f"resistance solve needs {lg.nvert} vertices (cap {RESISTANCE_CAP})"
        )
    xv = lg.vertex_of(x) if isinstance(x, Point) else int(x)
    yv = lg.vertex_of(y) if isinstance(y, Point) else int(y)
    if xv == yv:
        return 0.0
    keep = np.array([v for v in range(lg.nvert) if v != xv])
    L = stiffness(lg)[keep][:, keep]
    e = np.zeros(len(keep))
    pos = int(np.searchsorted(keep, yv))
    e[pos] = 1.0
    u = spsolve(csc_matrix(L), e)
    return float(u[pos])
