"""Contour functional calculus on the resolvent.

Wraps the negative-axis spectrum with quadrature contours and integrates
symbol functions against the Green kernel, with summability gates deciding
which kernels are admissible and spectral sums cross-checking every grid.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from .eigenfields import junction_labels, level1_vertex_ids
from .graphs import build_level_graph
from .operators import _factorize, spectrum
from .partitions import k_of_lambda, partition_metric
from .resolvent import _resolve
from .specs import FractalSpec, Point
from .util import ConfigError, GateError, make_rng

QUAD_TOL = 1e-12


@dataclass
class Contour:
    """Quadrature discretization of a curve winding around the negative axis.

    weights carry the dz factor; summing weight * f(node) approximates the
    contour integral of f, before the 1/(2 pi i) normalization.
    """

    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    alpha: float
    params: dict = field(default_factory=dict)
    panels: list = field(default_factory=list)  # (name, slice) per segment

    def integrate(self, fvals: np.ndarray) -> complex:
        return complex(np.sum(self.weights * fvals) / (2j * math.pi))

    def winding_number(self, p: complex) -> float:
        """Winding about p, closing the truncated rays through the far circle.

        Both ray ends sit on the angles +-alpha, so the closure contributes
        i(2 pi - 2 alpha) exactly in the large-radius limit.
        """
        quad = np.sum(self.weights / (self.nodes - p))
        closure = 1j * (2.0 * math.pi - 2.0 * self.alpha)
        return ((quad + closure) / (2j * math.pi)).real

    def panel_sums(self, fvals: np.ndarray) -> dict[str, complex]:
        out = {}
        for name, sl in self.panels:
            out[name] = complex(np.sum(self.weights[sl] * fvals[sl]) / (2j * math.pi))
        return out


def _gl_panel(a: float, b: float, n: int):
    x, w = roots_legendre(n)
    return a + (b - a) * (1.0 + x) / 2.0, w * (b - a) / 2.0


def _ray_edges(rho: float, s_max: float, osc: float, axis_gap: float) -> list[float]:
    # geometrically growing panels, capped so no panel spans more symbol
    # phase than the rule resolves nor outruns the local distance to the
    # spectrum axis, where the resolvent varies on the pole-spacing scale
    cap_phase = 6.0 / osc if osc > 0.0 else math.inf
    edges = [0.0]
    while edges[-1] < s_max:
        s = edges[-1]
        step = min(cap_phase, max(rho / 4.0, 0.6 * (rho + s) * axis_gap))
        edges.append(min(s + step, s_max))
    return edges


def _keyhole(rho: float, alpha: float, decay, kind: str, osc: float = 0.0,
             n_arc: int = 96, n_panel: int = 12, tol: float = 1e-18) -> Contour:
    """Arc of radius rho between angles -alpha..alpha plus two decaying rays.

    decay gives the modulus decline rate of the symbol per unit ray length,
    either shared or as a (lower, upper) pair, and osc its phase rate; each
    ray is truncated once the symbol has fallen below tol.
    """
    if not 0.0 < alpha < math.pi:
        raise ConfigError(f"contour angle {alpha} outside (0, pi)")
    d_lo, d_up = decay if isinstance(decay, tuple) else (decay, decay)
    if min(d_lo, d_up) <= 0.0:
        raise ConfigError("symbol does not decay along the rays")
    axis_gap = math.sin(math.pi - alpha)
    nodes, weights, panels = [], [], []

    def add(name, zs, ws):
        panels.append((name, slice(len(nodes), len(nodes) + len(zs))))
        nodes.extend(zs)
        weights.extend(ws)

    # lower ray, inward
    e_lo = cmath.exp(-1j * alpha)
    edges_lo = _ray_edges(rho, math.log(1.0 / tol) / d_lo, osc, axis_gap)
    for a, b in zip(edges_lo[::-1][:-1], edges_lo[::-1][1:]):
        s, w = _gl_panel(a, b, n_panel)
        add("ray_lower", (rho + s) * e_lo, w * e_lo)
    # arc, counterclockwise
    arcs = max(4, n_arc // n_panel)
    for i in range(arcs):
        t0 = -alpha + 2.0 * alpha * i / arcs
        t1 = -alpha + 2.0 * alpha * (i + 1) / arcs
        th, w = _gl_panel(t0, t1, n_panel)
        z = rho * np.exp(1j * th)
        add("arc", z, w * 1j * z)
    # upper ray, outward
    e_up = cmath.exp(1j * alpha)
    edges_up = _ray_edges(rho, math.log(1.0 / tol) / d_up, osc, axis_gap)
    for a, b in zip(edges_up[:-1], edges_up[1:]):
        s, w = _gl_panel(a, b, n_panel)
        add("ray_upper", (rho + s) * e_up, w * e_up)

    c = Contour(kind=kind, nodes=np.array(nodes), weights=np.array(weights),
                alpha=alpha, panels=panels)
    c.params["rho"] = rho
    c.params["s_max"] = max(edges_lo[-1], edges_up[-1])
    return c


def heat_contour(t: float, alpha: float = 3 * math.pi / 4, **kw) -> Contour:
    """Keyhole contour for the heat symbol at time t."""
    if t <= 0.0:
        raise ConfigError("heat time must be positive")
    decay = t * abs(math.cos(alpha))
    c = _keyhole(1.0 / t, alpha, decay, "heat", osc=t * abs(math.sin(alpha)), **kw)
    c.params["t"] = t
    return c


def exp_contour(w: complex, alpha: float | None = None, margin: float = 0.05, **kw) -> Contour:
    """Keyhole contour for the complex semigroup symbol e^{wz}.

    Both rays must point into the decaying half plane of w, which pins the
    angle to (|beta| + pi/2, pi).  The nominal pi - |beta|/2 is used when it
    falls in that window with margin; otherwise the angle retreats from pi
    by a quarter of the window.  The choice is validated numerically and
    recorded on the contour.
    """
    w = complex(w)
    beta = abs(cmath.phase(w))
    if beta >= math.pi / 2:
        raise GateError("semigroup parameter outside the open right half plane")
    window = math.pi / 2 - beta
    candidates = [alpha] if alpha is not None else [
        math.pi - beta / 2.0, math.pi - window / 4.0
    ]
    for cand in candidates:
        if not 0.0 < cand < math.pi:
            continue
        rate_lo = -math.cos(beta - cand)
        rate_up = -math.cos(beta + cand)
        if min(rate_lo, rate_up) > margin:
            osc = abs(w) * max(abs(math.sin(beta + cand)), abs(math.sin(beta - cand)))
            c = _keyhole(1.0 / abs(w), cand,
                         (abs(w) * rate_lo, abs(w) * rate_up),
                         "exp-complex", osc=osc, **kw)
            c.params["w"] = w
            c.params["ray_decay_rate"] = min(rate_lo, rate_up)
            return c
    raise GateError(f"no admissible contour angle for argument beta={beta}")


def power_contour(lam0: float, alpha: float = 3 * math.pi / 4, rmax: float = 1.0e6,
                  n_per_decade: int = 24, n_segment: int = 48) -> Contour:
    """Rays at +-alpha joined by a vertical segment left of the spectrum.

    The rays start where they meet the vertical line through -lam0/2 and
    run to modulus rmax with logarithmic node placement.
    """
    if lam0 <= 0.0:
        raise ConfigError("spectral offset must be positive")
    if not math.pi / 2 < alpha < math.pi:
        raise ConfigError("power contour angle must lie in (pi/2, pi)")
    r0 = lam0 / (2.0 * abs(math.cos(alpha)))
    nodes, weights, panels = [], [], []

    def add(name, zs, ws):
        panels.append((name, slice(len(nodes), len(nodes) + len(zs))))
        nodes.extend(zs)
        weights.extend(ws)

    ndec = max(1, int(math.ceil(math.log10(rmax / r0))))
    e_lo, e_up = cmath.exp(-1j * alpha), cmath.exp(1j * alpha)
    # lower ray, inward: substitute r = e^s so the far field is resolved
    sedges = np.linspace(math.log(r0), math.log(rmax), ndec + 1)
    for a, b in zip(sedges[::-1][:-1], sedges[::-1][1:]):
        s, wgt = _gl_panel(a, b, n_per_decade)
        r = np.exp(s)
        add("ray_lower", r * e_lo, wgt * r * e_lo)
    y0 = r0 * math.sin(alpha)
    yy, wgt = _gl_panel(-y0, y0, n_segment)
    add("segment", -lam0 / 2.0 + 1j * yy, wgt * 1j)
    for a, b in zip(sedges[:-1], sedges[1:]):
        s, wgt = _gl_panel(a, b, n_per_decade)
        r = np.exp(s)
        add("ray_upper", r * e_up, wgt * r * e_up)

    c = Contour(kind="power", nodes=np.array(nodes), weights=np.array(weights),
                alpha=alpha, panels=panels)
    c.params.update({"lam0": lam0, "rmax": rmax, "r0": r0})
    return c


@dataclass(frozen=True)
class SymbolFunction:
    """Scalar symbol h(z) integrated against the resolvent.

    The family tag carries the analytic summability rules used by the
    gates; user symbols rely on the numeric checks alone.
    """

    tag: str
    fn: object
    params: dict

    def __call__(self, z):
        return self.fn(np.asarray(z, dtype=complex))

    def at_spectrum(self, lams: np.ndarray) -> np.ndarray:
        return self.fn(-lams.astype(complex))


def heat_symbol(t: float) -> SymbolFunction:
    if t <= 0.0:
        raise ConfigError("heat time must be positive")
    return SymbolFunction("heat", lambda z: np.exp(t * z), {"t": t})


def exp_symbol(w: complex) -> SymbolFunction:
    w = complex(w)
    return SymbolFunction("exp-complex", lambda z: np.exp(w * z), {"w": w})


def power_symbol(w: complex) -> SymbolFunction:
    w = complex(w)

    def fn(z):
        return np.exp(w * np.log(-z))

    return SymbolFunction("complex-power", fn, {"w": w})


def _dyadic_blocks(lams: np.ndarray, hvals: np.ndarray, S: float):
    out = []
    pos = lams[lams > 0]
    if len(pos) == 0:
        return out, 0.0
    kmax = int(math.floor(math.log2(np.max(pos)))) if np.max(pos) >= 1 else 0
    total = 0.0
    for k in range(0, kmax + 1):
        mask = (lams >= 2.0**k) & (lams < 2.0 ** (k + 1))
        if not np.any(mask):
            continue
        term = 2.0 ** (k * S / (S + 1.0)) * float(np.max(np.abs(hvals[mask])))
        out.append({"k": k, "term": term})
        total += term
    return out, total


def check_gates(spec: FractalSpec, m: int, h: SymbolFunction, contour: Contour,
                a: float | None = None) -> dict:
    """Kernel admissibility gates for a symbol on a contour.

    The integral gate bounds the contour mass |h| |z|^{a-1} |dz| for an
    exponent a above S/2(S+1); the summability gates test the square sum
    and the dyadic-block sup sum of h on the spectrum, with closed-form
    tail verdicts for the built-in families.
    """
    S = spec.S
    a_min = S / (2.0 * (S + 1.0))
    linf_exp = S / (S + 1.0)
    tag = h.tag

    # family tail rules; numeric partial sums can only see finitely many modes
    l2_tail_ok = linf_tail_ok = integral_tail_ok = True
    if tag == "complex-power":
        rew = h.params["w"].real
        l2_tail_ok = rew < -a_min
        linf_tail_ok = rew < -linf_exp
        integral_tail_ok = l2_tail_ok
    elif tag == "exp-complex":
        beta = abs(cmath.phase(h.params["w"]))
        l2_tail_ok = linf_tail_ok = integral_tail_ok = beta < math.pi / 2
    elif tag != "heat":
        integral_tail_ok = True  # judged from panel decay below

    if a is None:
        a = min(1.0, a_min + 0.25)
        if tag == "complex-power" and l2_tail_ok:
            a = a_min + min(0.25, 0.5 * (-h.params["w"].real - a_min))
    if a <= a_min:
        raise ConfigError(f"gate exponent a={a} must exceed {a_min}")

    hvals = h(contour.nodes)
    mass = np.abs(contour.weights) * np.abs(hvals) * np.abs(contour.nodes) ** (a - 1.0)
    integral = float(np.sum(mass))
    seg_mass = {}
    for name, sl in contour.panels:
        seg_mass[name] = seg_mass.get(name, 0.0) + float(np.sum(mass[sl]))
    # outermost panels certify the truncation when they carry almost nothing
    outer = 0.0
    for name, sl in (contour.panels[0], contour.panels[-1]):
        outer += float(np.sum(mass[sl]))
    integral_ok = integral_tail_ok and (outer <= 1e-6 * max(integral, 1e-300) or
                                        tag == "complex-power")

    sp = spectrum(spec, m, "dirichlet", count=1)
    hspec = h.at_spectrum(sp.eigenvalues)
    l2_sum = float(np.sum(np.abs(hspec) ** 2))
    blocks, linf_sum = _dyadic_blocks(sp.eigenvalues, hspec, S)
    tail_frac = blocks[-1]["term"] / linf_sum if blocks and linf_sum > 0 else 0.0

    l2_ok = l2_tail_ok and np.isfinite(l2_sum)
    linf_ok = linf_tail_ok and np.isfinite(linf_sum) and (tail_frac < 0.5 or not blocks)
    verdict = {(True, True): "both", (True, False): "l2",
               (False, True): "linf", (False, False): "none"}[(l2_ok, linf_ok)]
    return {
        "a": a,
        "integral_gate": {"value": integral, "outer_panel_mass": outer,
                          "per_segment": seg_mass, "passed": bool(integral_ok)},
        "l2_gate": {"partial_sum": l2_sum, "passed": bool(l2_ok)},
        "linf_gate": {"partial_sum": linf_sum, "last_block_fraction": tail_frac,
                      "passed": bool(linf_ok)},
        "verdict": verdict,
    }


@dataclass
class KernelGrid:
    """Kernel values on a pair grid with the error budget that produced them."""

    pairs: list
    values: np.ndarray
    method: str
    budget: float
    details: dict = field(default_factory=dict)

    @property
    def real(self) -> np.ndarray:
        return np.real(self.values)


def _spectral_kernel(spec: FractalSpec, m: int, h: SymbolFunction, pairs,
                     reltol: float = 1e-17, max_terms: int = 4096) -> KernelGrid:
    """Eigenexpansion sum of h(-lambda) phi phi over the pair grid.

    Terms are cut once |h| has fallen below reltol of its spectral peak or
    the term cap is reached; the dropped mass bounds the budget.
    """
    lg = build_level_graph(spec, m)
    sp = spectrum(spec, m, "dirichlet", count=1)
    hspec = h.at_spectrum(sp.eigenvalues)
    peak = float(np.max(np.abs(hspec)))
    keep = np.abs(hspec) > reltol * peak
    count = int(np.max(np.nonzero(keep)[0])) + 1 if np.any(keep) else 1
    count = min(count, max_terms)
    sp = spectrum(spec, m, "dirichlet", count=count)
    count = sp.count
    xs = np.array([_resolve(lg, x) for x, _ in pairs])
    ys = np.array([_resolve(lg, y) for _, y in pairs])
    vals = np.einsum("jx,jx,j->x", sp.fields[:, xs], sp.fields[:, ys], hspec[:count])
    sup = 1.25 * float(np.max(sp.sup_norms))
    budget = float(sup**2 * np.sum(np.abs(hspec[count:])))
    return KernelGrid(list(pairs), vals, "spectral", budget,
                      {"terms": count, "peak": peak})


def operator_kernel(spec: FractalSpec, m: int, h: SymbolFunction, contour: Contour,
                    pairs, gates: dict | None = None) -> KernelGrid:
    """Contour integral of the symbol against the Green kernel on a pair grid.

    Every quadrature node costs one resolvent factorization; the two
    outermost ray panels bound the truncation part of the budget, and a
    winding check guards the orientation.
    """
    wind = contour.winding_number(-_first_eigenvalue(spec, m))
    if abs(wind - 1.0) > 0.05:
        raise ConfigError(f"contour winding number {wind} is not 1")
    lg = build_level_graph(spec, m)
    interior = lg.interior
    pos = np.full(lg.nvert, -1)
    pos[interior] = np.arange(len(interior))
    intset = {int(v) for v in interior}
    xs = sorted({_resolve(lg, x) for x, _ in pairs})
    idx = {x: i for i, x in enumerate(xs)}
    xv = [idx[_resolve(lg, x)] for x, _ in pairs]
    yv = [_resolve(lg, y) for _, y in pairs]
    hvals = h(contour.nodes)
    gmat = np.empty((len(contour.nodes), len(pairs)), dtype=complex)
    for i, z in enumerate(contour.nodes):
        lu = _factorize(lg, complex(z), interior, "dirichlet")
        rhs = np.zeros((len(interior), len(xs)), dtype=complex)
        for x, j in idx.items():
            if x in intset:
                rhs[pos[x], j] = 1.0
        sol = lu.solve(rhs)
        # boundary rows and columns of the absorbing kernel vanish
        gmat[i] = [
            sol[pos[y], xj] if y in intset and xs[xj] in intset else 0.0
            for xj, y in zip(xv, yv)
        ]
    contrib = contour.weights[:, None] * hvals[:, None] * gmat / (2j * math.pi)
    vals = np.sum(contrib, axis=0)
    outer = np.zeros(len(pairs))
    for name, sl in (contour.panels[0], contour.panels[-1]):
        outer += np.abs(np.sum(contrib[sl], axis=0))
    budget = float(np.max(outer))
    details = {"nodes": len(contour.nodes), "winding": wind,
               "imag_residual": float(np.max(np.abs(vals.imag)))}
    if gates is not None:
        details["gates"] = gates
    return KernelGrid(list(pairs), vals, "contour", budget, details)


def _first_eigenvalue(spec: FractalSpec, m: int) -> float:
    return float(spectrum(spec, m, "dirichlet", count=1).eigenvalues[0])


def heat_kernel(spec: FractalSpec, m: int, t: float, pairs,
                method: str = "both") -> KernelGrid:
    """Dirichlet heat kernel on a pair grid by spectral sum, contour, or both.

    With method "both" the contour grid is returned and the relative gap
    to the spectral sum lands in the details.
    """
    h = heat_symbol(t)
    if method == "spectral":
        return _spectral_kernel(spec, m, h, pairs)
    contour = heat_contour(t)
    gates = check_gates(spec, m, h, contour)
    if not (gates["l2_gate"]["passed"] and gates["integral_gate"]["passed"]):
        raise GateError("heat symbol failed its admissibility gates")
    grid = operator_kernel(spec, m, h, contour, pairs, gates=gates)
    if method == "contour":
        return grid
    ref = _spectral_kernel(spec, m, h, pairs)
    scale = float(np.max(np.abs(ref.values))) or 1.0
    gap = float(np.max(np.abs(grid.values - ref.values))) / scale
    grid.details["spectral_gap"] = gap
    grid.details["spectral_budget"] = ref.budget
    grid.method = "both"
    return grid


def complex_power_kernel(spec: FractalSpec, m: int, w: complex, pairs,
                         rmax: float = 1.0e6) -> KernelGrid:
    """Kernel of the complex power with exponent w via the wrapped-ray contour.

    Symbols whose square sum on the spectrum diverges are rejected at the
    gate; the surviving grids carry a spectral cross-check in the details.
    """
    w = complex(w)
    h = power_symbol(w)
    lam0 = _first_eigenvalue(spec, m)
    contour = power_contour(lam0, rmax=rmax)
    gates = check_gates(spec, m, h, contour)
    if not gates["l2_gate"]["passed"]:
        raise GateError(
            f"square-summability gate rejects Re w = {w.real}; "
            f"needs Re w < {-spec.S / (2 * (spec.S + 1.0))}"
        )
    grid = operator_kernel(spec, m, h, contour, pairs, gates=gates)
    # the power symbol decays slowly on the spectrum; the cross-check sum is
    # capped and its truncated mass lands in the reported budget
    ref = _spectral_kernel(spec, m, h, pairs, max_terms=512)
    scale = float(np.max(np.abs(ref.values))) or 1.0
    grid.details["spectral_gap"] = float(np.max(np.abs(grid.values - ref.values))) / scale
    grid.details["spectral_budget"] = ref.budget
    return grid


def exp_complex_kernel(spec: FractalSpec, m: int, w: complex, pairs) -> KernelGrid:
    """Kernel of the analytic semigroup at complex time w in the right half plane."""
    w = complex(w)
    h = exp_symbol(w)
    contour = exp_contour(w)
    gates = check_gates(spec, m, h, contour)
    if not (gates["l2_gate"]["passed"] and gates["integral_gate"]["passed"]):
        raise GateError("semigroup symbol failed its admissibility gates")
    grid = operator_kernel(spec, m, h, contour, pairs, gates=gates)
    ref = _spectral_kernel(spec, m, h, pairs)
    scale = float(np.max(np.abs(ref.values))) or 1.0
    grid.details["spectral_gap"] = float(np.max(np.abs(grid.values - ref.values))) / scale
    grid.details["spectral_budget"] = ref.budget
    grid.details["alpha"] = contour.alpha
    return grid


def _lower_envelope(d: np.ndarray, y: np.ndarray):
    # slope through per-distance minima, intercept under every sample
    uniq = np.unique(d)
    if len(uniq) < 2:
        raise ConfigError("need at least two distinct distances for the envelope")
    minima = np.array([np.min(y[d == u]) for u in uniq])
    slope = float(np.polyfit(uniq, minima, 1)[0])
    icept = float(np.min(y - slope * d))
    viol = int(np.sum(y < slope * d + icept - 1e-9))
    return slope, icept, viol


def verify_heat_upper(spec: FractalSpec, m: int, t_grid, pairs,
                      c_cal: float = 1.0) -> dict:
    """Sub-Gaussian upper-bound diagnostics for the Dirichlet heat kernel.

    On-diagonal decay is fitted in log-log over the time grid; off the
    diagonal the deficit -log(t^gamma p_t) is enveloped from below by a
    line in the partition distance at scale k(1/t).
    """
    gamma = spec.S / (spec.S + 1.0)
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    lg = build_level_graph(spec, m)
    # absorbing-boundary suppression steepens the on-diagonal fit near the
    # corners, so the diagonal is read at the first-level junction vertices,
    # the deepest interior anchors the structure provides
    ids = level1_vertex_ids(spec, m)
    diag_pts = [lg.point_at(int(ids[lbl])) for lbl in junction_labels(spec)]
    dpairs = [(p, p) for p in diag_pts[:6]]

    diag = np.empty((len(t_grid), len(dpairs)))
    offd = np.empty((len(t_grid), len(pairs)))
    for i, t in enumerate(t_grid):
        diag[i] = _spectral_kernel(spec, m, heat_symbol(t), dpairs).real
        offd[i] = _spectral_kernel(spec, m, heat_symbol(t), pairs).real
    # the short-time end of the window carries the clean power law; repeated
    # corner reflections bend the curve near the top
    sub = t_grid <= t_grid[-1] / 3.0
    if sub.sum() < 3:
        sub = np.ones(len(t_grid), dtype=bool)
    slopes = np.polyfit(np.log(t_grid[sub]), np.log(diag[sub]), 1)[0]
    on_slope = float(np.median(slopes))

    dvals, yvals = [], []
    for i, t in enumerate(t_grid):
        k = k_of_lambda(spec, 1.0 / t, c_cal)
        pm = partition_metric(spec, k)
        for j, (x, y) in enumerate(pairs):
            p = offd[i, j]
            if p <= 0.0:
                continue
            dvals.append(pm.distance(x, y))
            yvals.append(-math.log(t**gamma * p))
    kappa7, icept, viol = _lower_envelope(np.array(dvals, dtype=float),
                                          np.array(yvals))
    return {
        "on_diag_slope": on_slope,
        "on_diag_target": -gamma,
        "kappa7": kappa7,
        "envelope_intercept": icept,
        "envelope_violations": viol,
        "nsamples": len(dvals),
        "positive": bool(np.all(diag > 0.0)),
        "passed": bool(kappa7 > 0.0 and viol == 0 and
                       abs(on_slope + gamma) < 0.05),
    }


def heat_pair_sample(spec: FractalSpec, m: int, npairs: int, seed: int = 0) -> list:
    """Seeded vertex pairs spanning several partition distances."""
    lg = build_level_graph(spec, m)
    rng = make_rng(seed)
    ids = lg.interior
    pairs = []
    seen = set()
    while len(pairs) < npairs:
        a, b = rng.choice(ids, size=2, replace=False)
        key = (int(a), int(b))
        if key in seen or a == b:
            continue
        seen.add(key)
        pairs.append((lg.point_at(int(a)), lg.point_at(int(b))))
    return pairs
