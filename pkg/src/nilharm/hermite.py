"""Hermite functions, the dilations U(r), and diagonal special Hermite functions.

Conventions
-----------
``phi_p`` is the L^2-normalised Hermite function, computed by the three-term
recurrence on the functions themselves::

    phi_0(x) = pi^{-1/4} exp(-x^2/2)
    phi_p(x) = sqrt(2/p) x phi_{p-1}(x) - sqrt((p-1)/p) phi_{p-2}(x)

The diagonal special Hermite functions are the matrix coefficients
``Phi_aa(z) = (pi(z, 0) phi_a, phi_a)`` for unit weights d = 1, which in closed
form are ``prod_j exp(-|z_j|^2/4) L_{a_j}(|z_j|^2/2)``.  The closed form is
checked against direct quadrature of the matrix coefficient in the test-suite.
"""
from __future__ import annotations

from itertools import product as iproduct

import numpy as np
from scipy.special import eval_laguerre

_PI_QUARTER = np.pi ** -0.25


def multi_index(alpha) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if any(a < 0 for a in alpha):
        raise ValueError(f"multi-index entries must be >= 0, got {alpha}")
    return alpha


def dilation_vector(r) -> np.ndarray:
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(~(r > 0)):
        raise ValueError(f"dilation weights must be positive, got {r}")
    return r


def multi_indices(n: int, N: int) -> list[tuple[int, ...]]:
    """All alpha in N^n with |alpha| <= N, ordered by degree then lexicographically."""
    out = [a for a in iproduct(range(N + 1), repeat=n) if sum(a) <= N]
    return sorted(out, key=lambda a: (sum(a), tuple(-x for x in a)))


def hermite_functions(pmax: int, x) -> np.ndarray:
    """phi_0..phi_pmax at x; result has shape (pmax + 1, *x.shape)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((pmax + 1,) + x.shape)
    out[0] = _PI_QUARTER * np.exp(-0.5 * x * x)
    if pmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for p in range(2, pmax + 1):
        out[p] = np.sqrt(2.0 / p) * x * out[p - 1] - np.sqrt((p - 1) / p) * out[p - 2]
    return out


def hermite_1d(p: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = _PI_QUARTER * np.exp(-0.5 * x * x)
    for q in range(1, p + 1):
        prev, cur = cur, np.sqrt(2.0 / q) * x * cur - np.sqrt((q - 1) / q) * prev
    return cur


def hermite_eval(alpha, xi) -> np.ndarray:
    """prod_j phi_{alpha_j}(xi_j); xi has trailing axis of length n."""
    alpha = multi_index(alpha)
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 0:
        xi = xi[None]
    if xi.shape[-1] != len(alpha):
        raise ValueError(f"point has {xi.shape[-1]} coordinates, multi-index has {len(alpha)}")
    out = np.ones(xi.shape[:-1])
    for j, a in enumerate(alpha):
        out = out * hermite_1d(a, xi[..., j])
    return out


def dilate(r, alpha, xi) -> np.ndarray:
    """(U(r) phi_alpha)(xi) = prod r_j^{1/4} phi_alpha(sqrt(r_j) xi_j)."""
    r = dilation_vector(r)
    xi = np.asarray(xi, dtype=float)
    if xi.ndim == 0:
        xi = xi[None]
    return np.prod(r ** 0.25) * hermite_eval(alpha, np.sqrt(r) * xi)


def special_hermite_diag(alpha, z) -> np.ndarray:
    """Phi_{alpha alpha}(z) for complex z in C^n (trailing axis n)."""
    alpha = multi_index(alpha)
    z = np.asarray(z)
    if z.ndim == 0:
        z = z[None]
    if z.shape[-1] != len(alpha):
        raise ValueError(f"point has {z.shape[-1]} coordinates, multi-index has {len(alpha)}")
    out = np.ones(z.shape[:-1])
    for j, a in enumerate(alpha):
        s = 0.5 * np.abs(z[..., j]) ** 2
        out = out * np.exp(-0.5 * s) * eval_laguerre(a, s)
    return out


def special_hermite_scaled(alpha, d, z) -> np.ndarray:
    """Phi^{d}_{alpha alpha}(z) = Phi_{alpha alpha}(sqrt(d_1) z_1, ..., sqrt(d_n) z_n)."""
    d = dilation_vector(d)
    return special_hermite_diag(alpha, np.sqrt(d) * np.asarray(z))


def recurrence_check(alpha, j: int, z, step: float = 1e-4) -> float:
    """Residual of the radial-derivative identity for Phi_{alpha alpha} in slot j.

        (z_j d/dz_j + conj(z_j) d/dconj(z_j)) Phi_aa
            = (a_j + 1) Phi_{a+e_j} - a_j Phi_{a-e_j} - Phi_aa

    The left side is the derivative of s -> Phi_aa(z with z_j -> (1+s) z_j)
    at s = 0, taken by a central difference.
    """
    alpha = multi_index(alpha)
    z = np.asarray(z, dtype=complex)
    if not 0 <= j < len(alpha):
        raise IndexError(f"slot {j} out of range for n={len(alpha)}")
    zp, zm = z.copy(), z.copy()
    zp[..., j] *= 1 + step
    zm[..., j] *= 1 - step
    lhs = (special_hermite_diag(alpha, zp) - special_hermite_diag(alpha, zm)) / (2 * step)
    up = list(alpha)
    up[j] += 1
    rhs = (alpha[j] + 1) * special_hermite_diag(up, z) - special_hermite_diag(alpha, z)
    if alpha[j] > 0:
        down = list(alpha)
        down[j] -= 1
        rhs = rhs - alpha[j] * special_hermite_diag(down, z)
    return float(np.max(np.abs(lhs - rhs)))
