"""Sector extension machinery.

Builds exponent sequences and comparison maps from axis decay data, and
checks that off-axis samples of eta and the Green kernel stay under the
resulting sector envelopes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .eigenfields import eta_fields
from .graphs import build_level_graph
from .operators import green_column, normal_derivative, spectrum
from .partitions import estimate_gamma, k_of_lambda, partition_metric
from .specs import FractalSpec, Point
from .util import ModelError


@dataclass(frozen=True)
class DoublingModel:
    """Two-sided power bounds on the growth of an axis decay function.

    Constrains f(M^{j+1})/f(M^j) to [c1*M^beta1, c2*M^beta2] with
    0 < beta1 < beta2 < 1.
    """

    beta1: float
    beta2: float
    c1: float = 1.0
    c2: float = 1.0
    eps: float = 0.02

    def __post_init__(self):
        if not 0.0 < self.beta1 < self.beta2 < 1.0:
            raise ModelError(
                f"doubling exponents ({self.beta1}, {self.beta2}) outside 0<b1<b2<1"
            )
        slack = min(self.beta1, 1.0 - self.beta2, self.beta2 - self.beta1)
        if 3.0 * self.eps > slack:
            raise ModelError(f"eps={self.eps} too large; requires 3*eps <= {slack}")

    @property
    def window(self) -> tuple[float, float]:
        # admissible range for partial sums of the exponent sequence
        return 1.0 - self.beta2 - self.eps, 1.0 - self.beta1 + self.eps


def doubling_model_for(spec: FractalSpec, slack: float = 0.06, eps: float = 0.02) -> DoublingModel:
    """Doubling model of lambda -> d_{k(lambda)} growth for a builtin set.

    The partition diameter count grows like e^{gamma k} while k advances as
    log(lambda)/(S+1), so the doubling exponent sits near gamma/(S+1).
    """
    gamma = estimate_gamma(spec)["gamma"]
    mid = gamma / (spec.S + 1.0)
    b1 = max(0.02, mid - slack)
    b2 = min(0.98, mid + slack)
    e = min(eps, min(b1, 1.0 - b2, b2 - b1) / 3.0)
    return DoublingModel(beta1=b1, beta2=b2, eps=e)


@dataclass
class SCMap:
    """Comparison map data: vertex scale M and exponent sequence tau.

    H(z) integrates w^{-tau0} * prod_j (1 - w/M^j)^{-tau_j} from 0 to z
    along a radial path, with principal powers cut on the negative axis.
    """

    M: float
    eps: float
    tau: np.ndarray          # tau[0] is the origin exponent
    l: np.ndarray            # growth exponents, l[j] from f(M^{j+1})
    model: DoublingModel
    enlarged: bool = False
    quad_nodes: int = 24
    _jac_cache: dict = field(default_factory=dict, repr=False)

    @property
    def nvertices(self) -> int:
        return len(self.tau) - 1

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.tau)

    def telescoping_gap(self) -> float:
        """Max defect of 1 - sum_{j<=k}(1-j/k)tau_j = l_{k-1} over all k."""
        worst = 0.0
        for k in range(1, len(self.tau)):
            j = np.arange(k + 1)
            lhs = 1.0 - np.sum((1.0 - j / k) * self.tau[: k + 1])
            worst = max(worst, abs(lhs - self.l[k - 1]))
        return worst

    def growth_exponent(self, r: float) -> float:
        """Exponent of the comparison growth |z|^e at modulus r."""
        K = int(math.floor(math.log(max(r, self.M)) / math.log(self.M)))
        K = min(K, len(self.l))
        return float(self.l[K - 1])

    def _jacobi(self, a: float, b: float):
        key = (round(a, 12), round(b, 12))
        if key not in self._jac_cache:
            self._jac_cache[key] = roots_jacobi(self.quad_nodes, a, b)
        return self._jac_cache[key]

    def _tail_product(self, w, first_skipped: int) -> complex:
        # factors beyond the data range are taken as exponent zero; the
        # dropped log-product tail is then identically zero
        out = np.ones_like(w, dtype=complex)
        for j in range(1, self.nvertices + 1):
            if j == first_skipped:
                continue
            out = out * (1.0 - w / self.M**j) ** (-self.tau[j])
        return out

    def evaluate(self, z: complex) -> complex:
        """H(z) for z in the closed upper half plane, z not 0.

        Real z beyond the first vertex picks up the phase of each passed
        factor as a boundary value from above.
        """
        if z == 0:
            raise ModelError("comparison map is singular at the origin")
        if abs(z.imag) < 1e-14 and z.real > 0:
            return self._evaluate_axis(z.real)
        return self._evaluate_radial(z)

    def _crossing_radii(self, r: float) -> list[int]:
        return [j for j in range(1, self.nvertices + 1) if self.M**j < r]

    def _evaluate_radial(self, z: complex) -> complex:
        # radial substitution w = z*u pulls the path onto [0, 1]
        r = abs(z)
        cuts = [self.M**j / r for j in self._crossing_radii(r)]
        edges = [0.0] + cuts + [1.0]
        tau0 = self.tau[0]
        total = 0.0 + 0.0j
        for i in range(len(edges) - 1):
            a, b = edges[i], edges[i + 1]
            if b - a < 1e-15:
                continue
            if i == 0:
                xj, wj = self._jacobi(0.0, -tau0)
                u = a + (b - a) * (1.0 + xj) / 2.0
                vals = self._tail_product(z * u, 0)
                scale = ((b - a) / 2.0) ** (1.0 - tau0)
                total += scale * np.sum(wj * vals)
            else:
                total += self._panel_gl(z, a, b, tau0)
        return z ** (1.0 - tau0) * total

    def _panel_gl(self, z: complex, a: float, b: float, tau0: float) -> complex:
        # graded subpanels; the integrand is analytic off the real axis but
        # steepens near each vertex radius when arg z is small
        sigma = np.array([0.0, 0.03, 0.12, 0.35, 0.65, 0.88, 0.97, 1.0])
        xg, wg = roots_legendre(self.quad_nodes)
        total = 0.0 + 0.0j
        for s0, s1 in zip(sigma[:-1], sigma[1:]):
            pa = a + (b - a) * s0
            pb = a + (b - a) * s1
            u = pa + (pb - pa) * (1.0 + xg) / 2.0
            vals = u ** (-tau0) * self._tail_product(z * u, 0)
            total += (pb - pa) / 2.0 * np.sum(wg * vals)
        return total

    def _evaluate_axis(self, x: float) -> complex:
        crossings = self._crossing_radii(x)
        cuts = [self.M**j / x for j in crossings]
        edges = [0.0] + cuts + [1.0]
        tau0 = self.tau[0]
        total = 0.0 + 0.0j
        for i in range(len(edges) - 1):
            a, b = edges[i], edges[i + 1]
            if b - a < 1e-15:
                continue
            # exponents of the endpoint singularities of this panel
            jl = crossings[i - 1] if i >= 1 else None
            jr = crossings[i] if i < len(crossings) else None
            tl = self.tau[jl] if jl is not None else 0.0
            tr = self.tau[jr] if jr is not None else 0.0
            beta_exp = -tl if jl is not None else -tau0
            xj, wj = self._jacobi(-tr if jr is not None else 0.0, beta_exp)
            u = a + (b - a) * (1.0 + xj) / 2.0
            vals = np.ones_like(u, dtype=complex)
            if jl is None:
                scale = ((b - a) / 2.0) ** (1.0 - tau0 - tr)
            else:
                vals = vals * u ** (-tau0)
                scale = ((b - a) / 2.0) ** (1.0 - tl - tr)
                scale *= (x / self.M**jl) ** (-tl)
            if jr is not None:
                scale *= (x / self.M**jr) ** (-tr)
            for j in range(1, self.nvertices + 1):
                if j == jl or j == jr:
                    continue
                t = x * u / self.M**j
                fac = np.abs(1.0 - t) ** (-self.tau[j])
                vals = vals * fac
            # factors already passed contribute the upper-boundary phase
            phase = cmath.exp(1j * math.pi * sum(self.tau[j] for j in crossings[:i]))
            total += phase * scale * np.sum(wj * vals)
        return x ** (1.0 - tau0) * total


def tau_sequence(
    f, M: float, eps: float, levels: int = 12, model: DoublingModel | None = None
) -> SCMap:
    """Exponent sequence of the comparison map matched to axis decay f.

    f is a callable on [1, inf) with f(1) > 0; samples are taken at the
    vertex scales M^j.  When a model with non-unit c constants is supplied,
    M is doubled until their contribution drops below eps, and the
    enlargement is reported on the returned map.
    """
    if M <= 1.0:
        raise ModelError("vertex scale M must exceed 1")
    if levels < 3:
        raise ModelError("need at least three sample levels")

    enlarged = False
    if model is not None:
        while max(abs(math.log(model.c1)), abs(math.log(model.c2))) / math.log(M) >= eps:
            M *= 2.0
            enlarged = True

    f1 = float(f(1.0))
    if f1 <= 0.0:
        raise ModelError("axis decay samples must be positive")
    logM = math.log(M)
    fvals = np.array([float(f(M ** (j + 1))) for j in range(levels)]) / f1
    if np.any(fvals <= 0.0):
        raise ModelError("axis decay samples must be positive")

    ratios = np.empty(levels)
    ratios[0] = fvals[0]
    ratios[1:] = fvals[1:] / fvals[:-1]
    exponents = np.log(ratios) / logM

    if model is None:
        b1, b2 = float(np.min(exponents)), float(np.max(exponents))
        spread = b2 - b1
        pad = max(0.03, 0.25 * spread)
        b1, b2 = max(0.01, b1 - pad), min(0.99, b2 + pad)
        if not b1 < b2:
            raise ModelError(f"degenerate doubling exponents near {b1}")
        eps_ok = min(eps, min(b1, 1.0 - b2, b2 - b1) / 3.0)
        model = DoublingModel(beta1=b1, beta2=b2, eps=eps_ok)
        eps = eps_ok
    else:
        slack = min(model.beta1, 1.0 - model.beta2, model.beta2 - model.beta1)
        if 3.0 * eps > slack:
            raise ModelError(f"eps={eps} too large; requires 3*eps <= {slack}")
        lo = model.c1 * M**model.beta1
        hi = model.c2 * M**model.beta2
        bad = [j for j, r in enumerate(ratios) if not lo <= r <= hi]
        if bad:
            raise ModelError(f"doubling hypothesis fails at levels {bad}")

    l = np.log(fvals) / (np.arange(1, levels + 1) * logM)
    tau = np.empty(levels)
    tau[0] = 1.0 - l[0]
    if levels > 1:
        tau[1] = 2.0 * (l[0] - l[1])
    for j in range(2, levels):
        tau[j] = j * (2.0 * l[j - 1] - l[j] - l[j - 2]) + l[j - 2] - l[j]

    if np.max(np.abs(tau)) >= 1.0:
        raise ModelError(f"exponent sequence leaves (-1, 1): sup {np.max(np.abs(tau))}")
    lo, hi = model.window
    sums = np.cumsum(tau)
    bad = [int(k) for k, s in enumerate(sums) if not lo - 1e-12 <= s <= hi + 1e-12]
    if bad:
        raise ModelError(f"partial sums leave window [{lo}, {hi}] at {bad}")

    sc = SCMap(M=M, eps=eps, tau=tau, l=l, model=model, enlarged=enlarged)
    gap = sc.telescoping_gap()
    if gap > 1e-12:
        raise ModelError(f"telescoping identity defect {gap} exceeds 1e-12")
    return sc


def power_map(b: float, M: float = 8.0, levels: int = 12) -> SCMap:
    """Comparison map of the pure power axis decay f(x) = x^b."""
    return tau_sequence(lambda x: x**b, M, eps=min(0.02, b / 4, (1 - b) / 4), levels=levels)


def im_part_sandwich(sc: SCMap, moduli, split: float = 0.5) -> dict:
    """Two-sided comparison of Im H(i r) against the growth power r^{e(r)}.

    Bracketing constants are fitted on the low-modulus samples and must
    hold on the rest within a fixed slack factor; stability of the ratio
    across decades is what the sandwich asserts.
    """
    moduli = np.sort(np.asarray(moduli, dtype=float))
    if np.any(moduli < sc.M):
        raise ModelError("sandwich samples must sit beyond the first vertex scale")
    ratios = []
    for r in moduli:
        h = sc.evaluate(complex(0.0, r))
        base = r ** sc.growth_exponent(r)
        ratios.append(h.imag / base)
    ratios = np.array(ratios)
    ncal = max(2, int(len(ratios) * split))
    c_lo, c_hi = float(np.min(ratios[:ncal])), float(np.max(ratios[:ncal]))
    slack = 3.0
    ok = (ratios >= c_lo / slack) & (ratios <= c_hi * slack)
    return {
        "moduli": moduli.tolist(),
        "ratios": ratios.tolist(),
        "c_lo": c_lo,
        "c_hi": c_hi,
        "slack": slack,
        "positive": bool(np.all(ratios > 0.0)),
        "violations": int(np.sum(~ok)),
        "passed": bool(np.all(ok) and np.all(ratios > 0.0)),
    }


def pl_classical_envelope(a1: float, a2: float, alpha: float):
    """Sector envelope for |g| <= exp(-a1 x^{a2}) on the axis, |g| <= 1 on the sector.

    Returns a callable of (r, beta) valid for |beta| <= alpha < pi/a2 ... the
    sine ratio interpolates the axis decay to zero decay on the sector edge.
    """
    if not 0.0 < a2 * alpha < math.pi:
        raise ModelError("sector too wide for the decay exponent")

    def env(r: float, beta: float) -> float:
        s = math.sin(a2 * (alpha - abs(beta))) / math.sin(a2 * alpha)
        return math.exp(-a1 * s * r**a2)

    return env


def pl_general_envelope(f, model: DoublingModel, alpha: float, c: float = 1.0):
    """Sector envelope exp(-c f(r^{pi/alpha}) sin(ct(1-|beta|/alpha)) / norm)."""
    ct = (model.beta1 - model.eps) * math.pi
    norm = math.sin(math.pi * (model.beta2 + model.eps))

    def env(r: float, beta: float) -> float:
        s = math.sin(ct * (1.0 - abs(beta) / alpha))
        return math.exp(-c * f(r ** (math.pi / alpha)) * s / norm)

    env.ctilde = ct
    env.norm = norm
    return env


def verify_pl_classical(
    alpha: float = math.pi / 2, nbeta: int = 9, moduli=(1.0, 10.0, 100.0)
) -> dict:
    """Envelope domination check on the closed form g(z) = exp(-sqrt(z))."""
    env = pl_classical_envelope(1.0, 0.5, alpha)
    rows = []
    violations = 0
    for beta in np.linspace(-alpha, alpha, nbeta):
        for r in moduli:
            z = r * cmath.exp(1j * beta)
            g = abs(cmath.exp(-cmath.sqrt(z)))
            e = env(r, beta)
            if g > e * (1.0 + 1e-12):
                violations += 1
            rows.append({"beta": float(beta), "r": float(r), "g": g, "envelope": e})
    return {"samples": rows, "violations": violations, "passed": violations == 0}


def _lower_envelope_fit(d: np.ndarray, y: np.ndarray, nbins: int = 8):
    # slope through per-bin minima, intercept dropped to the lowest residual
    # so the fitted line sits under every sample
    order = np.argsort(d)
    d, y = d[order], y[order]
    edges = np.quantile(d, np.linspace(0.0, 1.0, nbins + 1))
    centers, minima = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        mask = (d >= a) & (d <= b)
        if np.sum(mask) == 0:
            continue
        centers.append(np.mean(d[mask]))
        minima.append(np.min(y[mask]))
    centers, minima = np.array(centers), np.array(minima)
    if len(centers) < 2 or np.ptp(centers) < 1e-12:
        raise ModelError("predictor range too narrow for an envelope fit")
    slope = float(np.polyfit(centers, minima, 1)[0])
    intercept = float(np.min(y - slope * d))
    viol = int(np.sum(y < slope * d + intercept - 1e-9))
    resid = y - (slope * d + intercept)
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    return slope, intercept, viol, r2


DEFAULT_RAYS = (math.pi / 4, math.pi / 2, 3 * math.pi / 4)


def sector_samples(
    spec: FractalSpec,
    m: int,
    pairs: list[tuple],
    rays=DEFAULT_RAYS,
    moduli=None,
    eta_sample: int = 40,
):
    """Resolvent and eta samples on rays z = r e^{i beta} off the spectrum.

    Returns one record per ray and modulus carrying the Green values on the
    requested vertex pairs and the sup of each corner eta field.
    """
    if moduli is None:
        moduli = np.geomspace(1.0, 1.0e4, 9)
    lg = build_level_graph(spec, m)
    xs = sorted({lg.vertex_of(x) for x, _ in pairs})
    ys = [lg.vertex_of(y) for _, y in pairs]
    xv = [lg.vertex_of(x) for x, _ in pairs]
    step = max(1, len(lg.interior) // eta_sample)
    eta_ids = lg.interior[::step]
    out = []
    for beta in rays:
        for r in moduli:
            z = r * cmath.exp(1j * beta)
            eta = eta_fields(spec, m, z)
            cols = {x: green_column(lg, z, x) for x in xs}
            gvals = [complex(cols[x][y]) for x, y in zip(xv, ys)]
            nd_eta = [
                normal_derivative(lg, eta[p], lg.corners[0, q], z=z)
                for p in range(spec.nboundary)
                for q in range(spec.nboundary)
                if q != p
            ]
            out.append(
                {
                    "beta": beta,
                    "r": r,
                    "z": z,
                    "green": gvals,
                    "eta_sup": [float(np.max(np.abs(eta[p, eta_ids]))) for p in range(spec.nboundary)],
                    "eta_rows": eta[:, eta_ids].copy(),
                    "nd_eta_max": float(np.max(np.abs(nd_eta))),
                }
            )
    return out, eta_ids


def verify_sector_estimates(
    spec: FractalSpec,
    m: int,
    pairs: list[tuple],
    rays=DEFAULT_RAYS,
    moduli=None,
    alpha: float = 7 * math.pi / 8,
    c_cal: float = 1.0,
) -> dict:
    """Weak ray bounds plus the calibrated sector envelope for the Green kernel.

    The envelope exponent couples the partition distance at the rescaled
    modulus with the sine factor of the sector construction; its rate is
    fitted from below and must come out positive with no sample above the
    shifted envelope.
    """
    if max(abs(b) for b in rays) >= alpha:
        raise ModelError("all rays must lie strictly inside the sector")
    model = doubling_model_for(spec)
    ct = (model.beta1 - model.eps) * math.pi
    tan_fac = 1.0 + math.tan(alpha / 2.0)
    samples, eta_ids = sector_samples(spec, m, pairs, rays, moduli)
    lg = build_level_graph(spec, m)

    inv_power = 1.0 / (spec.S + 1.0)
    weak_eta = max(max(s["eta_sup"]) for s in samples) / tan_fac
    weak_green = max(
        max(abs(g) for g in s["green"]) * (1.0 + s["r"]) ** inv_power for s in samples
    ) / tan_fac

    # pooled envelope fit for |G| over (pair, ray, modulus) samples
    dvals, yvals = [], []
    eta_d, eta_y = [], []
    eta_points = [lg.point_at(int(v)) for v in eta_ids]
    corner_pts = [Point((), p) for p in range(spec.nboundary)]
    for s in samples:
        k = k_of_lambda(spec, s["r"] ** (math.pi / alpha), c_cal)
        pm = partition_metric(spec, k)
        sine = math.sin(ct * (1.0 - abs(s["beta"]) / alpha))
        for (px, py), g in zip(pairs, s["green"]):
            if abs(g) < 1e-300:
                continue
            dvals.append(pm.distance(px, py) * sine)
            yvals.append(-math.log(abs(g) * (1.0 + s["r"]) ** inv_power / tan_fac))
        for p in range(spec.nboundary):
            row = np.abs(s["eta_rows"][p])
            for pt, val in zip(eta_points, row):
                if val < 1e-300:
                    continue
                eta_d.append(pm.distance(corner_pts[p], pt) * sine)
                eta_y.append(-math.log(val / tan_fac))

    kappa5, icept, viol, r2 = _lower_envelope_fit(np.array(dvals), np.array(yvals))
    kappa5_eta, icept_eta, viol_eta, r2_eta = _lower_envelope_fit(
        np.array(eta_d), np.array(eta_y)
    )
    return {
        "alpha": alpha,
        "ctilde": ct,
        "model": {"beta1": model.beta1, "beta2": model.beta2, "eps": model.eps},
        "weak_eta_constant": weak_eta,
        "weak_green_constant": weak_green,
        "green_kappa5": kappa5,
        "green_intercept": icept,
        "green_violations": viol,
        "green_fit_r2": r2,
        "eta_kappa5": kappa5_eta,
        "eta_intercept": icept_eta,
        "eta_violations": viol_eta,
        "eta_fit_r2": r2_eta,
        "nd_eta_max": max(s["nd_eta_max"] for s in samples),
        "nsamples": len(dvals),
        "passed": bool(kappa5 > 0.0 and viol == 0),
    }


def eigen_sup_ratio(
    spec: FractalSpec, m: int, lams: list[float], trials: int = 20, seed: int = 0
) -> dict:
    """Sup-norm versus L2-norm ratios over random spans of low eigenfunctions.

    Fits the constants in the eigenfunction sup bound (exponent S/2(S+1))
    and the multiplier kernel bound (exponent S/(S+1)) and reports their
    stability as the spectral cutoff doubles.
    """
    from .util import make_rng

    rng = make_rng(seed)
    sp = spectrum(spec, m, "dirichlet", count=512)
    expo = spec.S / (2.0 * (spec.S + 1.0))
    rows = []
    for lam in lams:
        nj = int(np.searchsorted(sp.eigenvalues, lam, side="right"))
        if nj == 0:
            raise ModelError(f"no eigenvalues at or below {lam}")
        if nj > sp.count:
            sp = spectrum(spec, m, "dirichlet", count=nj)
        phi = sp.fields[:nj]
        best = 0.0
        for _ in range(trials):
            b = rng.standard_normal(nj)
            u = phi.T @ b
            ratio = np.max(np.abs(u)) / (lam**expo * np.linalg.norm(b))
            best = max(best, ratio)
        # multiplier kernel with random bounded coefficients
        b = rng.uniform(-1.0, 1.0, nj)
        kern = (phi.T * b) @ phi
        mult = np.max(np.abs(kern)) / (np.max(np.abs(b)) * lam ** (2.0 * expo))
        rows.append({"lam": lam, "nterms": nj, "sup_constant": best, "mult_constant": mult})
    consts = [r["sup_constant"] for r in rows]
    stable = all(b <= a * 1.25 for a, b in zip(consts, consts[1:]))
    return {"rows": rows, "stable": stable, "exponent": expo}
