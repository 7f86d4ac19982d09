"""Schrodinger-type representations pi_lambda and the Fourier analysis built on them.

In the frame of lambda a group element is (x, y, t) and

    (pi_lambda(x, y, t) phi)(xi) = exp(i lambda.t - i sum_j d_j (x_j xi_j + x_j y_j / 2)) phi(xi + y).

The minus sign on the d-phase makes pi_lambda a homomorphism for the group
law (v, z)(v', z') = (v + v', z + z' + [v, v']/2) together with the frame
normalisation lambda([X_j, Y_j]) = +d_j; with the opposite sign the same
formula composes in reverse order.  Diagonal matrix coefficients do not
depend on this choice.

The group Fourier transform is f^(lambda) = int f(g) pi_lambda(g)^* dg, so that
its matrix entries are pairings of the central transform
f^lambda(z) = int f(z, t) exp(-i lambda.t) dt with matrix coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import product as iproduct

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .config import DEFAULTS
from .errors import DimensionError, TruncationError
from .hermite import dilate, dilation_vector, multi_index, multi_indices
from .nilgroup import GroupElement, TwoStepAlgebra
from .symplectic import SymplecticFrame, as_functional, b_matrix

_PI_QUARTER = np.pi ** -0.25


# -- discretisation carriers -------------------------------------------------

@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values on the uniform grid linspace(-box, box, points) along every axis."""

    values: np.ndarray
    box: float
    flags: tuple = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim < 1:
            raise ValueError("a sampled function needs at least one axis")
        if len(set(values.shape)) != 1:
            raise ValueError(f"grid must have equal points per axis, got {values.shape}")
        if values.shape[0] < 2:
            raise ValueError("need at least 2 points per axis")
        if not self.box > 0:
            raise ValueError("box half-width must be positive")
        if not np.all(np.isfinite(values)):
            raise ValueError("sampled values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def points(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        return 2 * self.box / (self.points - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.box, self.box, self.points)

    def grid(self) -> np.ndarray:
        """Coordinates with shape (points, ..., points, dim)."""
        return grid_points(self.dim, self.box, self.points)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.spacing ** self.dim))

    def same_grid(self, other) -> bool:
        return self.values.shape == other.values.shape and self.box == other.box

    def with_values(self, values, flags=None):
        return replace(self, values=values, flags=self.flags if flags is None else flags)

    @classmethod
    def from_function(cls, func, dim: int, box: float, points: int):
        return cls(np.asarray(func(grid_points(dim, box, points))), box)


def grid_points(dim: int, box: float, points: int) -> np.ndarray:
    axis = np.linspace(-box, box, points)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack(mesh, axis=-1)


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = "trapezoid"
    points: int = DEFAULTS.t_points
    box: float = DEFAULTS.t_box

    def __post_init__(self):
        if self.scheme not in ("trapezoid", "gauss-hermite"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.points < 2:
            raise ValueError("quadrature order must be >= 2")
        if self.scheme == "trapezoid" and not self.box > 0:
            raise ValueError("trapezoid quadrature needs a positive box")

    def nodes_weights(self, dim: int = 1):
        """Tensor nodes (N^dim, dim) and weights (N^dim,)."""
        if self.scheme == "trapezoid":
            x = np.linspace(-self.box, self.box, self.points)
            w = np.full(self.points, x[1] - x[0])
            w[[0, -1]] *= 0.5
        else:
            x, w = np.polynomial.hermite.hermgauss(self.points)
            w = w * np.exp(x * x)
        nodes = np.stack(np.meshgrid(*([x] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
        weights = np.prod(np.stack(np.meshgrid(*([w] * dim), indexing="ij"), axis=-1).reshape(-1, dim), axis=1)
        return nodes, weights


@dataclass(frozen=True)
class FrameCoordinates:
    x: np.ndarray
    y: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        x, y = np.atleast_1d(np.asarray(self.x, float)), np.atleast_1d(np.asarray(self.y, float))
        if x.shape != y.shape:
            raise DimensionError("x and y must have the same length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", np.atleast_1d(np.asarray(self.t, float)))


def to_frame(fr: SymplecticFrame, g: GroupElement) -> FrameCoordinates:
    if g.v.shape != (fr.m,):
        raise DimensionError(f"element has dim v = {g.v.shape[0]}, frame expects {fr.m}")
    return FrameCoordinates(fr.X.T @ g.v, fr.Y.T @ g.v, g.z.copy())


def from_frame(fr: SymplecticFrame, c: FrameCoordinates) -> GroupElement:
    if c.x.shape != (fr.n,):
        raise DimensionError(f"coordinates have n = {c.x.shape[0]}, frame expects {fr.n}")
    return GroupElement(fr.X @ c.x + fr.Y @ c.y, c.t.copy())


# -- the representation ------------------------------------------------------

def _shift_spectral(values, h, shifts):
    """values(xi + shift) per axis via a zero-padded Fourier shift."""
    out = np.asarray(values, dtype=complex)
    for ax, s in enumerate(shifts):
        if s == 0:
            continue
        n = out.shape[ax]
        pad = max(n, int(np.ceil(abs(s) / h)) + 2)
        widths = [(0, 0)] * out.ndim
        widths[ax] = (pad, pad)
        padded = np.pad(out, widths)
        k = 2 * np.pi * np.fft.fftfreq(padded.shape[ax], d=h)
        shape = [1] * out.ndim
        shape[ax] = -1
        moved = np.fft.ifft(np.fft.fft(padded, axis=ax) * np.exp(1j * k * s).reshape(shape), axis=ax)
        out = np.take(moved, np.arange(pad, pad + n), axis=ax)
    return out


def _shift_linear(phi: SampledFunction, shifts):
    axes = [phi.axis] * phi.dim
    interp = RegularGridInterpolator(axes, phi.values.astype(complex), method="linear",
                                     bounds_error=False, fill_value=0.0)
    pts = phi.grid() + np.asarray(shifts)
    return interp(pts.reshape(-1, phi.dim)).reshape(phi.values.shape)


def apply_pi(fr: SymplecticFrame, lam, g: FrameCoordinates, phi: SampledFunction,
             interp: str = "spectral") -> SampledFunction:
    """pi_lambda(g) phi on the grid of phi.

    ``interp="spectral"`` translates by a zero-padded FFT shift, which is exact
    for band-limited samples; ``"linear"`` interpolates (values outside the box
    are zero).  A grid coarser than box/8 is flagged in ``result.flags``.
    """
    lam = as_functional(lam)
    if phi.dim != fr.n or g.x.shape != (fr.n,):
        raise DimensionError(f"representation space has dim {fr.n}; got grid dim {phi.dim}, x of length {g.x.size}")
    if lam.shape != g.t.shape:
        raise DimensionError("central coordinates and functional differ in length")
    if fr.degenerate:
        raise DimensionError("pi_lambda needs a nondegenerate frame")
    if interp == "spectral":
        shifted = _shift_spectral(phi.values, phi.spacing, g.y)
    elif interp == "linear":
        shifted = _shift_linear(phi, g.y)
    else:
        raise ValueError(f"unknown interpolation {interp!r}")
    xi = phi.grid()
    phase = lam @ g.t - np.sum(fr.d * (g.x * xi + 0.5 * g.x * g.y), axis=-1)
    flags = phi.flags
    if phi.spacing > phi.box / 8:
        flags = flags + ("coarse-grid",)
    return phi.with_values(np.exp(1j * phase) * shifted, flags)


def _normalized_hermite_polys(pmax, x):
    """phi_p(x) * exp(x^2/2) for p = 0..pmax (no Gaussian factor)."""
    out = np.empty((pmax + 1,) + np.shape(x))
    out[0] = _PI_QUARTER
    if pmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for p in range(2, pmax + 1):
        out[p] = np.sqrt(2.0 / p) * x * out[p - 1] - np.sqrt((p - 1) / p) * out[p - 2]
    return out


def _coefficient_1d(a, b, X, Y, order):
    """int exp(-i X w) phi_a(w + Y/2) phi_b(w - Y/2) dw by Gauss-Hermite."""
    w, wt = np.polynomial.hermite.hermgauss(order)
    X = np.asarray(X)[..., None]
    Y = np.asarray(Y)[..., None]
    pa = _normalized_hermite_polys(a, w + Y / 2)[a]
    pb = _normalized_hermite_polys(b, w - Y / 2)[b]
    # phi_a phi_b = pa pb exp(-w^2 - Y^2/4); the exp(-w^2) is the GH weight
    return np.sum(wt * pa * pb * np.exp(-1j * X * w), axis=-1) * np.exp(-Y[..., 0] ** 2 / 4)


def matrix_coefficient(fr: SymplecticFrame, lam, alpha, beta, z, order: int = DEFAULTS.gh_order):
    """Phi^{d(lambda)}_{alpha beta}(z) = (pi_lambda(z, 0) phi^d_alpha, phi^d_beta).

    ``z`` holds v-coordinates (trailing axis m).  The defining integral factors
    over the frame pairs; each factor is evaluated by Gauss-Hermite quadrature
    of analytically evaluated Hermite functions.
    """
    lam = as_functional(lam)
    alpha, beta = multi_index(alpha), multi_index(beta)
    if len(alpha) != fr.n or len(beta) != fr.n:
        raise DimensionError(f"multi-indices must have length n={fr.n}")
    if fr.degenerate:
        raise DimensionError("matrix coefficients need a nondegenerate frame")
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != fr.m:
        raise DimensionError(f"z has trailing length {z.shape[-1]}, expected m={fr.m}")
    x = z @ fr.X
    y = z @ fr.Y
    sd = np.sqrt(fr.d)
    out = np.ones(z.shape[:-1], dtype=complex)
    for j in range(fr.n):
        out = out * _coefficient_1d(alpha[j], beta[j], sd[j] * x[..., j], sd[j] * y[..., j], order)
    return out


# -- Fourier analysis on G ---------------------------------------------------

def _edge_mask(nodes, box):
    return np.any(np.isclose(np.abs(nodes), box), axis=-1)


def central_ft(f, lam, v_box: float, v_points: int, quad: QuadratureSpec = QuadratureSpec(),
               m: int | None = None, chunk: int = 4096, check_decay: bool = True) -> SampledFunction:
    """f^lambda(z) = int f(z, t) exp(-i lambda.t) dt on a uniform v-grid.

    ``f`` is called as ``f(v, t)`` with broadcastable arrays of trailing
    lengths m and k.  Raises TruncationError when |f| on the faces of the
    t-box exceeds 1e-6 of its maximum.
    """
    lam = as_functional(lam)
    k = lam.size
    if m is None:
        m = getattr(f, "m", None)
        if m is None:
            raise ValueError("dimension m of v must be given")
    if quad.scheme != "trapezoid":
        raise ValueError("central transforms use trapezoid quadrature")
    tn, tw = quad.nodes_weights(k)
    kernel = tw * np.exp(-1j * (tn @ lam))
    edge = _edge_mask(tn, quad.box)
    zs = grid_points(m, v_box, v_points).reshape(-1, m)
    out = np.empty(zs.shape[0], dtype=complex)
    peak = 0.0
    edge_peak = 0.0
    for start in range(0, zs.shape[0], chunk):
        block = zs[start:start + chunk]
        vals = np.asarray(f(block[:, None, :], tn[None, :, :]))
        mags = np.abs(vals)
        peak = max(peak, float(mags.max()))
        edge_peak = max(edge_peak, float(mags[:, edge].max()))
        out[start:start + chunk] = vals @ kernel
    if check_decay and peak > 0 and edge_peak > 1e-6 * peak:
        raise TruncationError(
            f"integrand has not decayed at |t| = {quad.box}: edge/max = {edge_peak / peak:.2e} > 1e-6")
    return SampledFunction(out.reshape((v_points,) * m), v_box)


def twisted_convolution(a: TwoStepAlgebra, f: SampledFunction, g: SampledFunction, lam,
                        at=None):
    """(f *_lambda g)(z) = int f(z - w) g(w) exp(-(i/2) lambda([z, w])) dw.

    Direct summation over the grid, O(N^2).  Grids must coincide and have an
    odd number of points per axis so that z - w is again a grid node.  With
    ``at`` (a sequence of grid multi-indices) only those outputs are computed
    and returned as an array; otherwise a SampledFunction is returned.
    """
    if not f.same_grid(g):
        raise DimensionError("twisted convolution needs both factors on the same grid")
    if f.dim != a.m:
        raise DimensionError(f"grid dimension {f.dim} != dim v = {a.m}")
    N = f.points
    if N % 2 == 0:
        raise ValueError("twisted convolution needs an odd number of grid points per axis")
    B = b_matrix(a, lam)
    c = (N - 1) // 2
    h = f.spacing
    axis = f.axis
    fflip = np.flip(np.pad(np.asarray(f.values, dtype=complex), N))
    gvals = np.asarray(g.values, dtype=complex)
    wgrid = f.grid()
    if at is None:
        targets = list(iproduct(range(N), repeat=a.m))
    else:
        targets = [tuple(int(i) for i in np.atleast_1d(idx)) for idx in at]
    out = np.empty(len(targets), dtype=complex)
    for n_out, idx in enumerate(targets):
        starts = [2 * N - 1 - c - i for i in idx]
        fshift = fflip[tuple(slice(s, s + N) for s in starts)]
        z = axis[list(idx)]
        phase = np.exp(-0.5j * (wgrid @ (B.T @ z)))
        out[n_out] = np.sum(fshift * gvals * phase)
    out *= h ** a.m
    if at is not None:
        return out
    return SampledFunction(out.reshape(f.values.shape), f.box)


def group_ft(fr: SymplecticFrame, lam, f, N: int, v_box: float = 8.0, v_points: int = 41,
             quad: QuadratureSpec = QuadratureSpec(), order: int = DEFAULTS.gh_order,
             check_decay: bool = True):
    """Block of f^(lambda) on the Hermite basis {phi^d_alpha : |alpha| <= N}.

    Returns (indices, M) with M[i, j] = <f^(lambda) phi_{alpha_i}, phi_{alpha_j}>
    = int f^lambda(z) conj(Phi_{alpha_j alpha_i}(z)) dz.
    """
    lam = as_functional(lam)
    indices = multi_indices(fr.n, N)
    flam = central_ft(f, lam, v_box, v_points, quad, m=fr.m, check_decay=check_decay)
    z = flam.grid().reshape(-1, fr.m)
    fz = flam.values.reshape(-1)
    dz = flam.spacing ** fr.m
    M = np.empty((len(indices), len(indices)), dtype=complex)
    for i, ai in enumerate(indices):
        for j, aj in enumerate(indices):
            coeff = matrix_coefficient(fr, lam, aj, ai, z, order)
            M[i, j] = np.sum(fz * np.conj(coeff)) * dz
    return indices, M


# -- the oscillator ----------------------------------------------------------

def _second_difference(values, h, stride):
    out = -2.0 * values * values.ndim
    for ax in range(values.ndim):
        widths = [(0, 0)] * values.ndim
        widths[ax] = (stride, stride)
        padded = np.pad(values, widths)
        n = values.shape[ax]
        out = out + np.take(padded, np.arange(0, n), axis=ax) + np.take(padded, np.arange(2 * stride, n + 2 * stride), axis=ax)
    return out / (stride * h) ** 2


def laplacian(values, h, richardson: int = 1):
    """Grid Laplacian (zero outside the box), optionally Richardson-extrapolated.

    richardson=0 is the plain three-point stencil (second order); each level
    combines strides s and 2s and raises the order by two.
    """
    levels = [_second_difference(values, h, 2 ** i) for i in range(richardson + 1)]
    for lvl in range(1, richardson + 1):
        factor = 4.0 ** lvl
        levels = [(factor * levels[i] - levels[i + 1]) / (factor - 1) for i in range(len(levels) - 1)]
    return levels[0]


def hamiltonian_apply(d, phi: SampledFunction, richardson: int = 1) -> SampledFunction:
    """pi_lambda(L) phi = -H(d) phi = sum_j (d^2/dxi_j^2 - d_j^2 xi_j^2) phi.

    Derivatives use central differences; by default one Richardson level is
    applied on top of the three-point stencil.
    """
    d = dilation_vector(d)
    if d.size != phi.dim:
        raise DimensionError(f"{d.size} weights for a {phi.dim}-dimensional grid")
    xi = phi.grid()
    potential = np.sum((d * xi) ** 2, axis=-1)
    return phi.with_values(laplacian(phi.values, phi.spacing, richardson) - potential * phi.values)


def sampled_hermite(d, alpha, box: float, points: int) -> SampledFunction:
    """phi^d_alpha sampled on the grid."""
    alpha = multi_index(alpha)
    return SampledFunction.from_function(lambda xi: dilate(d, alpha, xi), len(alpha), box, points)


def oscillator_residual(d, alpha, box: float = DEFAULTS.osc_box, points: int = DEFAULTS.osc_points,
                        richardson: int = 1) -> float:
    """||pi(L) phi^d_a + (2a+1).d phi^d_a|| / ||phi^d_a|| on the grid."""
    d = dilation_vector(d)
    alpha = multi_index(alpha)
    phi = sampled_hermite(d, alpha, box, points)
    eig = float(np.dot(2 * np.array(alpha) + 1, d))
    res = hamiltonian_apply(d, phi, richardson).values + eig * phi.values
    return float(np.linalg.norm(res) / np.linalg.norm(phi.values))
