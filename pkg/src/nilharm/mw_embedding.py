"""Embedding of any two-step algebra into an MW one, and lifts of functions.

For g = v + z with dim v = m, dim z = k, the child algebra is
h = (v x v*) + (z x R) with coordinates (v, eta, z, t).  Its bracket keeps the
parent bracket on v and pairs eta with v in the new central slot so that the
left-invariant fields are

    V~_i     = V_i + (1/2) eta_i d/dt,
    V~_{m+i} = d/deta_i - (1/2) v_i d/dt.

A function f(v, z) on the parent lifts to f~(v, eta, z, t) = f(v, z), and the
child sublaplacian of f~ is the lift of the parent sublaplacian of f.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULTS
from .eigenchain import ChainSpec, ChainTerm, build_chain
from .invariant_ops import PointEvaluator, left_field_apply, sublaplacian_apply
from .nilgroup import TwoStepAlgebra


@dataclass(frozen=True, eq=False)
class EmbeddedAlgebra:
    parent: TwoStepAlgebra
    child: TwoStepAlgebra

    @property
    def v_index(self) -> np.ndarray:
        return np.arange(self.parent.m)

    @property
    def eta_index(self) -> np.ndarray:
        return np.arange(self.parent.m, 2 * self.parent.m)

    @property
    def z_index(self) -> np.ndarray:
        return np.arange(self.parent.k)

    @property
    def t_index(self) -> int:
        return self.parent.k

    def split(self, v, z):
        """Child coordinates (v', z') -> (v, eta, z, t)."""
        v = np.asarray(v, dtype=float)
        z = np.asarray(z, dtype=float)
        m, k = self.parent.m, self.parent.k
        return v[..., :m], v[..., m:], z[..., :k], z[..., k]

    def join(self, v, eta, z, t):
        """(v, eta, z, t) -> child coordinates (v', z'); t has no trailing axis."""
        t = np.asarray(t, dtype=float)[..., None]
        return (np.concatenate([np.asarray(v, dtype=float), np.asarray(eta, dtype=float)], axis=-1),
                np.concatenate([np.asarray(z, dtype=float), t], axis=-1))


def embed(a: TwoStepAlgebra) -> EmbeddedAlgebra:
    """Child structure constants; the new central slot pairs eta_i with v_i.

    c'(m+i, i, k) = +1 and c'(i, m+i, k) = -1 (0-based slot k is the new one),
    which is the sign that produces the lifted fields in the module docstring.
    """
    m, k = a.m, a.k
    c = np.zeros((2 * m, 2 * m, k + 1))
    c[:m, :m, :k] = np.asarray(a.c, dtype=float)
    for i in range(m):
        c[m + i, i, k] = 1.0
        c[i, m + i, k] = -1.0
    name = f"{a.name}~mw" if a.name else "mw-child"
    return EmbeddedAlgebra(a, TwoStepAlgebra(2 * m, k + 1, c, name=name))


def lift(emb: EmbeddedAlgebra, f) -> PointEvaluator:
    """f~(v, eta, z, t) = f(v, z)."""
    m, k = emb.parent.m, emb.parent.k

    def func(v, z):
        return f(v[..., :m], z[..., :k])

    return PointEvaluator(func, emb.child.m, emb.child.k)


def restrict(emb: EmbeddedAlgebra, f) -> PointEvaluator:
    """Parent function (v, z) -> f(v, 0, z, 0) of a child function."""
    m = emb.parent.m

    def func(v, z):
        v = np.asarray(v, dtype=float)
        z = np.asarray(z, dtype=float)
        shape = np.broadcast_shapes(v.shape[:-1], z.shape[:-1])
        v = np.broadcast_to(v, shape + (m,))
        z = np.broadcast_to(z, shape + (z.shape[-1],))
        return f(np.concatenate([v, np.zeros_like(v)], axis=-1),
                 np.concatenate([z, np.zeros(shape + (1,))], axis=-1))

    return PointEvaluator(func, emb.parent.m, emb.parent.k)


def child_points(emb: EmbeddedAlgebra, points, seed: int = DEFAULTS.seed, box: float = DEFAULTS.sample_box):
    """Extend parent points (v, z) with seeded random (eta, t)."""
    v, z = (np.asarray(x, dtype=float) for x in points)
    rng = np.random.default_rng(seed)
    eta = rng.uniform(-box, box, size=v.shape)
    t = rng.uniform(-box, box, size=v.shape[:-1] + (1,))
    return np.concatenate([v, eta], axis=-1), np.concatenate([z, t], axis=-1)


def lifted_field_check(emb: EmbeddedAlgebra, f, points, h: float = DEFAULTS.first_step, seed: int = DEFAULTS.seed):
    """(max |V~_i f~ - V_i f|, max |V~_{m+i} f~|) over i and the points."""
    m = emb.parent.m
    ft = lift(emb, f)
    cv, cz = child_points(emb, points, seed)
    v, z = cv[..., :m], cz[..., :emb.parent.k]
    horizontal = 0.0
    vertical = 0.0
    for i in range(m):
        lhs = left_field_apply(emb.child, i, ft, (cv, cz), h)
        rhs = left_field_apply(emb.parent, i, f, (v, z), h)
        horizontal = max(horizontal, float(np.max(np.abs(lhs - rhs))))
        vertical = max(vertical, float(np.max(np.abs(left_field_apply(emb.child, m + i, ft, (cv, cz), h)))))
    return horizontal, vertical


def field_formula_check(emb: EmbeddedAlgebra, points, h: float = DEFAULTS.first_step,
                        seed: int = DEFAULTS.seed) -> float:
    """Residual of the lifted-field formulas (module docstring) on t- and eta-dependent tests.

    Lifts cannot see the sign of the new central slot, so this applies the
    child fields to t and to eta_i t and compares with V_i + eta_i/2 d/dt and
    d/deta_i - v_i/2 d/dt.
    """
    m, k = emb.parent.m, emb.parent.k
    cv, cz = child_points(emb, points, seed)
    worst = 0.0
    t_only = PointEvaluator(lambda v, z: z[..., k], emb.child.m, emb.child.k)
    for i in range(m):
        eta_t = PointEvaluator(lambda v, z, i=i: v[..., m + i] * z[..., k], emb.child.m, emb.child.k)
        # V~_i t = eta_i/2, V~_{m+i} t = -v_i/2
        worst = max(worst, float(np.max(np.abs(
            left_field_apply(emb.child, i, t_only, (cv, cz), h) - 0.5 * cv[..., m + i]))))
        worst = max(worst, float(np.max(np.abs(
            left_field_apply(emb.child, m + i, t_only, (cv, cz), h) + 0.5 * cv[..., i]))))
        # V~_{m+i}(eta_i t) = t - eta_i v_i / 2
        worst = max(worst, float(np.max(np.abs(
            left_field_apply(emb.child, m + i, eta_t, (cv, cz), h)
            - (cz[..., k] - 0.5 * cv[..., m + i] * cv[..., i])))))
    return worst


def lifted_sublaplacian_check(emb: EmbeddedAlgebra, f, points, h: float = DEFAULTS.second_step,
                              seed: int = DEFAULTS.seed) -> float:
    """max |L~ f~ - L f| over the points (random eta, t appended)."""
    m, k = emb.parent.m, emb.parent.k
    cv, cz = child_points(emb, points, seed)
    lhs = sublaplacian_apply(emb.child, lift(emb, f), (cv, cz), h)
    rhs = sublaplacian_apply(emb.parent, f, (cv[..., :m], cz[..., :k]), h)
    return float(np.max(np.abs(lhs - rhs)))


def child_spec(emb: EmbeddedAlgebra, spec: ChainSpec) -> ChainSpec:
    """Parent chain recipe with each lambda extended by 0 in the new slot."""
    return ChainSpec(tuple(ChainTerm(np.append(t.lam, 0.0), t.alpha, t.coeff) for t in spec.terms))


def nonmw_chain_check(emb: EmbeddedAlgebra, spec: ChainSpec, k: int, points,
                      h: float = DEFAULTS.second_step, seed: int = DEFAULTS.seed) -> dict:
    """Chain built on the child, read back on the parent.

    Functionals (lambda, 0) are degenerate on the child; their eigenfunctions
    ignore the radical (which contains every eta direction), so the child chain
    depends on (v, z) only.  Reports the child relation L~ f_k = f_{k+1},
    agreement with the lift of the parent chain, and the parent relation
    L f_k = f_{k+1} for the restricted functions.
    """
    cspec = child_spec(emb, spec)
    child = build_chain(emb.child, cspec, [k, k + 1], allow_degenerate=True)
    parent = build_chain(emb.parent, spec, [k, k + 1], allow_degenerate=True)
    cv, cz = child_points(emb, points, seed)
    m, kk = emb.parent.m, emb.parent.k
    child_rel = sublaplacian_apply(emb.child, child[k], (cv, cz), h) - child[k + 1](cv, cz)
    lift_gap = child[k](cv, cz) - parent[k](cv[..., :m], cz[..., :kk])
    fk = restrict(emb, child[k])
    fk1 = restrict(emb, child[k + 1])
    v, z = points
    parent_rel = sublaplacian_apply(emb.parent, fk, (v, z), h) - fk1(v, z)
    return {
        "child_relation": float(np.max(np.abs(child_rel))),
        "lift_agreement": float(np.max(np.abs(lift_gap))),
        "parent_relation": float(np.max(np.abs(parent_rel))),
    }
