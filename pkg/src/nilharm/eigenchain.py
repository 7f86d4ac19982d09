"""Eigenfunctions h_lambda of the sublaplacian, chains L f_k = f_{k+1}, and probes.

For nondegenerate lambda with frame weights d(lambda) and a multi-index alpha,

    lambda~ = |lambda| / ((2 alpha + 1).d(lambda)) * lambda,
    h_lambda(z, t) = Phi^{d(lambda~)}_{alpha alpha}(z) exp(i lambda~ . t),

satisfies L h_lambda = -|lambda| h_lambda.  A ChainSpec is a finite spectral
recipe; its chain f_k = sum c (-|lambda|)^k h_lambda obeys L f_k = f_{k+1}
exactly, and is bounded in both directions iff every |lambda| equals 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .config import DEFAULTS
from .errors import DimensionError, TruncationError
from .hermite import multi_index, special_hermite_scaled
from .invariant_ops import PointEvaluator, sublaplacian_apply
from .nilgroup import TwoStepAlgebra
from .schrodinger_rep import grid_points, matrix_coefficient
from .symplectic import as_functional, frame


@dataclass(frozen=True)
class ChainTerm:
    lam: np.ndarray
    alpha: tuple
    coeff: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lam", as_functional(self.lam))
        object.__setattr__(self, "alpha", multi_index(self.alpha))
        coeff = complex(self.coeff)
        if not np.isfinite(coeff):
            raise ValueError("chain coefficients must be finite")
        object.__setattr__(self, "coeff", coeff)

    @property
    def scale(self) -> float:
        return float(np.linalg.norm(self.lam))


@dataclass(frozen=True)
class ChainSpec:
    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(
            t if isinstance(t, ChainTerm) else ChainTerm(*t) for t in self.terms))

    @property
    def scales(self) -> list[float]:
        return [t.scale for t in self.terms]

    def dominant_scale(self, forward: bool = True) -> float:
        """|lambda| governing growth as k -> +inf (or -inf when forward=False)."""
        live = [t.scale for t in self.terms if t.coeff != 0]
        if not live:
            return 0.0
        return max(live) if forward else min(live)


@dataclass(frozen=True)
class BumpSpec:
    """Smooth bump exp(-order / (1 - |x|^2)), x = (lambda - center)/radius, on |x| < 1."""

    center: np.ndarray
    radius: float
    order: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        if not self.radius > 0:
            raise ValueError("bump radius must be positive")
        if not self.order > 0:
            raise ValueError("bump order must be positive")

    def __call__(self, lam):
        x = (np.asarray(lam, dtype=float) - self.center) / self.radius
        r2 = np.sum(x * x, axis=-1)
        inside = r2 < 1
        out = np.zeros(r2.shape)
        out[inside] = np.exp(-self.order / (1 - r2[inside]))
        return out

    def nodes(self, points: int = DEFAULTS.lambda_points):
        """Tensor trapezoid nodes over the bounding box, keeping those where the bump is nonzero."""
        axes = [np.linspace(c - self.radius, c + self.radius, points) for c in self.center]
        h = 2 * self.radius / (points - 1)
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.center.size)
        vals = self(pts)
        keep = vals > 0
        # the bump vanishes on the box faces, so interior trapezoid weights are uniform
        return pts[keep], vals[keep] * h ** self.center.size

    def support_distance(self):
        """(min |lambda|, max |lambda|) over the support."""
        c = np.linalg.norm(self.center)
        return max(c - self.radius, 0.0), c + self.radius


# -- eigenfunctions ------------------------------------------------------------

def _tilde(a, lam, alpha, tol, allow_degenerate):
    fr = frame(a, lam, tol, allow_degenerate)
    if len(alpha) != fr.n:
        raise DimensionError(f"multi-index has length {len(alpha)}, frame has n={fr.n}")
    weight = float(np.dot(2 * np.array(alpha) + 1, fr.d))
    return np.linalg.norm(lam) / weight * lam, weight


def lambda_tilde(a: TwoStepAlgebra, lam, alpha, tol: float = DEFAULTS.nondegeneracy_tol,
                 allow_degenerate: bool = False, verify: bool = True) -> np.ndarray:
    """lambda~ = |lambda| / ((2 alpha + 1).d(lambda)) * lambda.

    With ``verify`` the result is checked against (2 alpha + 1).d(lambda~) = |lambda|
    and the inverse map back to lambda, both to 1e-10 relative.
    """
    lam = as_functional(lam)
    alpha = multi_index(alpha)
    lt, _ = _tilde(a, lam, alpha, tol, allow_degenerate)
    if verify:
        res = _residuals(a, lam, lt, alpha, tol, allow_degenerate)
        scale = 1.0 + np.linalg.norm(lam)
        if max(res.values()) > 1e-10 * scale:
            raise ArithmeticError(f"lambda~ relations fail at lambda={lam.tolist()}: {res}")
    return lt


def _residuals(a, lam, lt, alpha, tol, allow_degenerate):
    _, weight = _tilde(a, lt, alpha, tol, allow_degenerate)
    back = weight / np.linalg.norm(lt) * lt
    return {
        "eigenvalue": float(abs(weight - np.linalg.norm(lam))),
        "inverse": float(np.abs(back - lam).max()),
    }


def lambda_tilde_residuals(a: TwoStepAlgebra, lam, alpha, allow_degenerate: bool = False) -> dict:
    """Residuals of (2a+1).d(lambda~) = |lambda| and of the inverse map back to lambda."""
    lam = as_functional(lam)
    alpha = multi_index(alpha)
    lt = lambda_tilde(a, lam, alpha, allow_degenerate=allow_degenerate, verify=False)
    return _residuals(a, lam, lt, alpha, DEFAULTS.nondegeneracy_tol, allow_degenerate)


@dataclass(frozen=True)
class Eigenfunction(PointEvaluator):
    lam: np.ndarray = None
    lam_tilde: np.ndarray = None
    alpha: tuple = ()

    @property
    def eigenvalue(self) -> float:
        return -float(np.linalg.norm(self.lam))


def h_lambda(a: TwoStepAlgebra, lam, alpha, method: str = "closed-form",
             allow_degenerate: bool = False) -> Eigenfunction:
    """h_lambda(v, z) with L h_lambda = -|lambda| h_lambda.

    ``method="quadrature"`` evaluates the matrix coefficient by Gauss-Hermite
    quadrature instead of the Laguerre closed form.  For degenerate lambda
    (``allow_degenerate``) the radical directions of v are ignored, which still
    gives an eigenfunction with eigenvalue -|lambda|.
    """
    lam = as_functional(lam)
    alpha = multi_index(alpha)
    lt = lambda_tilde(a, lam, alpha, allow_degenerate=allow_degenerate)
    fr = frame(a, lt, allow_degenerate=allow_degenerate)
    if method == "closed-form":
        def radial(v):
            zc = v @ fr.X + 1j * (v @ fr.Y)
            return special_hermite_scaled(alpha, fr.d, zc)
    elif method == "quadrature":
        if fr.degenerate:
            raise ValueError("quadrature evaluation needs a nondegenerate lambda")

        def radial(v):
            return matrix_coefficient(fr, lt, alpha, alpha, v)
    else:
        raise ValueError(f"unknown method {method!r}")

    def func(v, z):
        v = np.asarray(v, dtype=float)
        z = np.asarray(z, dtype=float)
        return radial(v) * np.exp(1j * (z @ lt))

    return Eigenfunction(func, a.m, a.k, lam=lam, lam_tilde=lt, alpha=alpha)


def eigen_residual(a: TwoStepAlgebra, h: Eigenfunction, points, step: float = DEFAULTS.second_step):
    """Pointwise |L h + |lambda| h| at the given (v, z) points."""
    v, z = points
    lh = sublaplacian_apply(a, h, (v, z), step)
    return np.abs(lh - h.eigenvalue * h(v, z))


def sample_points(a: TwoStepAlgebra, count: int = DEFAULTS.n_sample_points, seed: int = DEFAULTS.seed,
                  box: float = DEFAULTS.sample_box):
    """Seeded uniform points in [-box, box]^(m + k), returned as (v, z)."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-box, box, size=(count, a.m + a.k))
    return pts[:, :a.m], pts[:, a.m:]


# -- chains ------------------------------------------------------------------

def build_chain(a: TwoStepAlgebra, spec: ChainSpec, k_range, method: str = "closed-form",
                allow_degenerate: bool = False) -> dict:
    """{k: f_k} with f_k = sum_terms coeff (-|lambda|)^k h_lambda."""
    hs = [h_lambda(a, t.lam, t.alpha, method, allow_degenerate) for t in spec.terms]
    chain = {}
    for k in k_range:
        weights = [t.coeff * (-t.scale) ** k for t in spec.terms]

        def func(v, z, weights=weights):
            total = 0
            for w, h in zip(weights, hs):
                total = total + w * h(v, z)
            return total * np.ones(np.broadcast_shapes(np.shape(v)[:-1], np.shape(z)[:-1]))

        chain[k] = PointEvaluator(func, a.m, a.k)
    return chain


def chain_relation_check(a: TwoStepAlgebra, spec: ChainSpec, k: int, points,
                         step: float = DEFAULTS.second_step, allow_degenerate: bool = False) -> float:
    """max over points of |L f_k - f_{k+1}|."""
    if not spec.terms:
        return 0.0
    chain = build_chain(a, spec, [k, k + 1], allow_degenerate=allow_degenerate)
    v, z = points
    lf = sublaplacian_apply(a, chain[k], (v, z), step)
    return float(np.max(np.abs(lf - chain[k + 1](v, z))))


def sup_norm_estimate(f, m: int, k: int, budget: int = DEFAULTS.sup_budget, seed: int = DEFAULTS.seed,
                      box: float = 3.0, refine_steps: int = 60) -> float:
    """Lower bound for sup |f| over [-box, box]^(m + k).

    Scrambled Halton points pick a start, then a coordinate search with
    halving steps climbs from the best sample.
    """
    dim = m + k
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    pts = qmc.scale(sampler.random(budget), -box, box)
    vals = np.abs(np.asarray(f(pts[:, :m], pts[:, m:]))) * np.ones(budget)
    best_i = int(np.argmax(vals))
    best = float(vals[best_i])
    x = pts[best_i].copy()
    step = box / budget ** (1.0 / dim)
    for _ in range(refine_steps):
        moved = False
        for j in range(dim):
            for sgn in (1.0, -1.0):
                trial = x.copy()
                trial[j] = np.clip(trial[j] + sgn * step, -box, box)
                val = float(np.abs(f(trial[:m], trial[m:])))
                if val > best:
                    best, x, moved = val, trial, True
        if not moved:
            step *= 0.5
            if step < 1e-9:
                break
    return best


def chain_sup_norms(a: TwoStepAlgebra, spec: ChainSpec, ks=range(-6, 7), budget: int = DEFAULTS.sup_budget,
                    seed: int = DEFAULTS.seed, box: float = 3.0, allow_degenerate: bool = False) -> dict:
    chain = build_chain(a, spec, ks, allow_degenerate=allow_degenerate)
    return {k: sup_norm_estimate(chain[k], a.m, a.k, budget, seed, box) for k in ks}


def boundedness_summary(sups: dict) -> dict:
    """max/min ratio of the sup norms and the successive growth ratios."""
    ks = sorted(sups)
    vals = np.array([sups[k] for k in ks])
    ratios = [sups[k + 1] / sups[k] for k in ks[:-1] if sups[k] > 0]
    return {
        "max_min_ratio": float(vals.max() / vals.min()) if vals.min() > 0 else float("inf"),
        "successive_ratios": ratios,
        "log2_steps": [float(np.log2(sups[k + 1]) - np.log2(sups[k])) for k in ks[:-1] if sups[k] > 0],
    }


# -- F_alpha and the concentration probe -------------------------------------------

def _node_eigenfunctions(a, alpha, bump, points):
    nodes, weights = bump.nodes(points)
    return [(w, h_lambda(a, lam, alpha)) for lam, w in zip(nodes, weights)]


def build_F_alpha(a: TwoStepAlgebra, alpha, phi: BumpSpec, points: int = DEFAULTS.lambda_points) -> PointEvaluator:
    """F_alpha = int h_lambda phi(lambda) d lambda by tensor trapezoid quadrature."""
    alpha = multi_index(alpha)
    if phi.center.size != a.k:
        raise DimensionError(f"bump lives in R^{phi.center.size}, centre has dimension k={a.k}")
    terms = _node_eigenfunctions(a, alpha, phi, points)

    def func(v, z):
        total = 0
        for w, h in terms:
            total = total + w * h(v, z)
        return total

    return PointEvaluator(func, a.m, a.k)


def F_alpha_prediction(a: TwoStepAlgebra, alpha, phi: BumpSpec, lam) -> float:
    """Diagonal value of the group Fourier transform of F_alpha at lambda.

    With Lebesgue measure in exponential coordinates and f^(lambda) =
    int f pi_lambda^*, F_alpha^(lambda) = c P_alpha with

        c = (2 pi)^(n + k) ((2 alpha + 1).d(omega))^k phi(mu) / prod_j d_j(lambda),

    where omega = lambda/|lambda| and mu = (2 alpha + 1).d(lambda) / |lambda| * lambda is
    the functional whose lambda~ is lambda.  The transform is therefore
    supported on the lambda~-image of the bump.
    """
    lam = as_functional(lam)
    alpha = multi_index(alpha)
    fr = frame(a, lam)
    weight = float(np.dot(2 * np.array(alpha) + 1, fr.d))
    norm = np.linalg.norm(lam)
    mu = weight / norm * lam
    jac = (weight / norm) ** a.k
    return float((2 * np.pi) ** (fr.n + a.k) * jac * phi(mu) / np.prod(fr.d))


@dataclass
class ProbeTable:
    radius: float
    values: list = field(default_factory=list)

    @property
    def magnitudes(self) -> list[float]:
        return [abs(p) for p in self.values]

    @property
    def ratio(self) -> float:
        """Geometric growth ratio |P_l| / |P_{l-1}| at the largest l."""
        mags = self.magnitudes
        if len(mags) < 2 or mags[-2] == 0:
            return float("nan")
        return mags[-1] / mags[-2]

    def as_dict(self):
        return {"R": self.radius, "l": list(range(len(self.values))),
                "abs_P": self.magnitudes, "ratio": self.ratio}


def concentration_probe(a: TwoStepAlgebra, spec: ChainSpec, phi: BumpSpec, psi: BumpSpec, l_max: int,
                        R: float, v_box: float = 8.0, v_points: int = 41, t_step: float = 0.05,
                        lambda_points: int = DEFAULTS.lambda_points) -> ProbeTable:
    """Windowed pairings P_l = int_{|t|<=R} int_v f_l(z, t) W(z, t) dz dt, l = 0..l_max.

    W = int h_lambda psi(lambda) phi(lambda) d lambda.  The pairing is bilinear
    (no conjugation), so the pairing with a chain built at lambda_0 concentrates
    where psi phi meets -lambda_0.
    """
    if a.k != phi.center.size or a.k != psi.center.size:
        raise DimensionError("bumps must live in the dual of the centre")
    lo = np.maximum(phi.center - phi.radius, psi.center - psi.radius)
    hi = np.minimum(phi.center + phi.radius, psi.center + psi.radius)
    nodes, weights = phi.nodes(lambda_points)
    prod = weights * psi(nodes)
    keep = prod > 0
    probe_alpha = _alpha_for(a, spec)
    W_terms = [(w, h_lambda(a, lam, probe_alpha))
               for lam, w in zip(nodes[keep], prod[keep])] if np.all(hi >= lo) else []

    zs = grid_points(a.m, v_box, v_points).reshape(-1, a.m)
    nt = max(int(np.ceil(2 * R / t_step)) + 1, 3)
    taxis = np.linspace(-R, R, nt)
    tw = np.full(nt, taxis[1] - taxis[0])
    tw[[0, -1]] *= 0.5
    tmesh = np.stack(np.meshgrid(*([taxis] * a.k), indexing="ij"), axis=-1).reshape(-1, a.k)
    twt = np.prod(np.stack(np.meshgrid(*([tw] * a.k), indexing="ij"), axis=-1).reshape(-1, a.k), axis=1)
    inside = np.linalg.norm(tmesh, axis=1) <= R + 1e-12
    tmesh, twt = tmesh[inside], twt[inside]
    dz = (2 * v_box / (v_points - 1)) ** a.m

    V = zs[:, None, :]
    T = tmesh[None, :, :]
    W = np.zeros((zs.shape[0], tmesh.shape[0]), dtype=complex)
    for w, h in W_terms:
        W += w * h(V, T)
    hs = [h_lambda(a, t.lam, t.alpha) for t in spec.terms]
    base = [h(V, T) for h in hs]

    edge = np.any(np.isclose(np.abs(zs), v_box), axis=1)
    f0 = sum(t.coeff * b for t, b in zip(spec.terms, base))
    integrand = np.abs(f0 * W) if spec.terms else np.zeros(1)
    if integrand.max() > 0 and integrand[edge].max() > 1e-6 * integrand.max():
        raise TruncationError(
            f"probe integrand has not decayed at |z| = {v_box}: "
            f"edge/max = {integrand[edge].max() / integrand.max():.2e}")

    pairings = [np.sum(b * W, axis=0) @ twt * dz for b in base]
    table = ProbeTable(radius=R)
    for l in range(l_max + 1):
        table.values.append(complex(sum(t.coeff * (-t.scale) ** l * p for t, p in zip(spec.terms, pairings))))
    return table


def _alpha_for(a, spec):
    """Multi-index used for the probe's test family (the chain's first term, else zero)."""
    if spec.terms:
        return spec.terms[0].alpha
    fr_n = a.m // 2
    return (0,) * fr_n
