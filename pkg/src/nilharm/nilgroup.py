"""Two-step nilpotent Lie algebras, their groups in exponential coordinates.

An algebra is stored by its dense structure constants ``c[i, j, l]`` with
``[V_i, V_j] = sum_l c[i, j, l] T_l``.  Group elements are pairs ``(v, z)``
and multiply by the truncated Baker-Campbell-Hausdorff formula

    (v, z) . (v', z') = (v + v', z + z' + 1/2 [v, v']).

Indices are 0-based in the Python API and 1-based in group-definition files.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import DEFAULTS
from .errors import DimensionError, GroupFileError


@dataclass(frozen=True, eq=False)
class TwoStepAlgebra:
    """Structure constants of g = v + z with dim v = m, dim z = k."""

    m: int
    k: int
    c: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise ValueError(f"need m >= 1 and k >= 1, got m={self.m}, k={self.k}")
        c = np.array(self.c)
        if c.dtype != object:
            c = c.astype(float)
        if c.shape != (self.m, self.m, self.k):
            raise DimensionError(f"structure constants have shape {c.shape}, expected {(self.m, self.m, self.k)}")
        if c.dtype != object and not np.all(np.isfinite(c)):
            raise ValueError("structure constants must be finite")
        asym = c + np.swapaxes(c, 0, 1)
        if np.any(asym != 0):
            i, j, l = np.argwhere(asym != 0)[0]
            raise ValueError(
                f"structure constants are not antisymmetric: c({i + 1},{j + 1},{l + 1}) = {c[i, j, l]} "
                f"but c({j + 1},{i + 1},{l + 1}) = {c[j, i, l]}"
            )
        if c.dtype != object:
            c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        """Half the dimension of v (meaningful when m is even)."""
        return self.m // 2

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"TwoStepAlgebra{label}(m={self.m}, k={self.k})"


@dataclass(frozen=True)
class GroupElement:
    """Exponential coordinates (v, z) of exp(V + T)."""

    v: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v)
        if v.dtype != object:
            v = v.astype(float)
        z = np.asarray(self.z)
        if z.dtype != object:
            z = z.astype(float)
        object.__setattr__(self, "v", np.atleast_1d(v))
        object.__setattr__(self, "z", np.atleast_1d(z))

    def allclose(self, other, atol=1e-12):
        return (self.v.shape == other.v.shape and self.z.shape == other.z.shape
                and np.allclose(self.v, other.v, rtol=0, atol=atol)
                and np.allclose(self.z, other.z, rtol=0, atol=atol))


def _check_v(a, v, what="vector"):
    v = np.asarray(v)
    if v.shape[-1:] != (a.m,):
        raise DimensionError(f"{what} has trailing length {v.shape[-1:] or ()}, expected m={a.m}")
    return v


def _check_element(a, g):
    if g.v.shape != (a.m,) or g.z.shape != (a.k,):
        raise DimensionError(f"element with shapes v{g.v.shape}, z{g.z.shape} does not conform to {a!r}")


def bracket(a: TwoStepAlgebra, v, w):
    """[v, w] as a k-vector; broadcasts over leading axes."""
    v = _check_v(a, v, "first argument")
    w = _check_v(a, w, "second argument")
    return np.einsum("...i,...j,ijl->...l", v, w, a.c)


def product(a, v1, z1, v2, z2):
    """Array form of the group law; all arguments broadcast."""
    return v1 + v2, z1 + z2 + 0.5 * bracket(a, v1, v2)


def multiply(a: TwoStepAlgebra, g: GroupElement, h: GroupElement) -> GroupElement:
    _check_element(a, g)
    _check_element(a, h)
    v, z = product(a, g.v, g.z, h.v, h.z)
    return GroupElement(v, z)


def inverse(a: TwoStepAlgebra, g: GroupElement) -> GroupElement:
    _check_element(a, g)
    return GroupElement(-g.v, -g.z)


def identity(a: TwoStepAlgebra) -> GroupElement:
    return GroupElement(np.zeros(a.m), np.zeros(a.k))


def axiom_residuals(a: TwoStepAlgebra, count: int = 1000, seed: int = 0) -> dict:
    """Max residuals of associativity, identity and inverse on seeded random triples."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((3, count, a.m))
    z = rng.standard_normal((3, count, a.k))
    left = product(a, *product(a, v[0], z[0], v[1], z[1]), v[2], z[2])
    right = product(a, v[0], z[0], *product(a, v[1], z[1], v[2], z[2]))
    zero_v, zero_z = np.zeros(a.m), np.zeros(a.k)
    unit = [product(a, v[0], z[0], zero_v, zero_z), product(a, zero_v, zero_z, v[0], z[0])]
    inv = [product(a, v[0], z[0], -v[0], -z[0]), product(a, -v[0], -z[0], v[0], z[0])]

    def gap(p, q):
        return max(float(np.abs(p[0] - q[0]).max()), float(np.abs(p[1] - q[1]).max()))

    return {
        "associativity": gap(left, right),
        "identity": max(gap(u, (v[0], z[0])) for u in unit),
        "inverse": max(gap(w, (zero_v, zero_z)) for w in inv),
    }


def make_heisenberg(n: int) -> TwoStepAlgebra:
    """Heisenberg algebra with [V_j, V_{n+j}] = T."""
    if n < 1:
        raise ValueError("Heisenberg dimension n must be positive")
    c = np.zeros((2 * n, 2 * n, 1))
    for j in range(n):
        c[j, n + j, 0] = 1.0
        c[n + j, j, 0] = -1.0
    return TwoStepAlgebra(2 * n, 1, c, name=f"heisenberg-{n}")


def free_pairs(m: int):
    """Central index order of the free algebra: (0,1), (0,2), ..., (m-2,m-1)."""
    return [(i, j) for i in range(m) for j in range(i + 1, m)]


def make_free_two_step(m: int) -> TwoStepAlgebra:
    """Free two-step algebra on m generators, k = m(m-1)/2."""
    if m < 2:
        raise ValueError("free two-step algebra needs m >= 2 generators")
    pairs = free_pairs(m)
    c = np.zeros((m, m, len(pairs)))
    for l, (i, j) in enumerate(pairs):
        c[i, j, l] = 1.0
        c[j, i, l] = -1.0
    return TwoStepAlgebra(m, len(pairs), c, name=f"free2step-{m}")


def random_unit_functionals(k, trials, seed):
    rng = np.random.default_rng(seed)
    lam = rng.standard_normal((trials, k))
    return lam / np.linalg.norm(lam, axis=1, keepdims=True)


def is_mw(a: TwoStepAlgebra, trials: int = DEFAULTS.mw_trials, seed: int = 0,
          tol: float = DEFAULTS.mw_tol) -> bool:
    """Decide the MW condition by sampling B_lambda at random unit lambda.

    Nondegeneracy is generic once it occurs at all, so a handful of seeded
    draws decides the question with overwhelming probability.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if trials < 1:
        raise ValueError("trials must be positive")
    if a.m % 2:
        return False
    c = np.asarray(a.c, dtype=float)
    for lam in random_unit_functionals(a.k, trials, seed):
        B = np.einsum("ijl,l->ij", c, lam)
        if np.linalg.svd(B, compute_uv=False)[-1] > tol:
            return True
    return False


# -- group-definition files ------------------------------------------------

def parse_group_text(text: str, name: str = "") -> TwoStepAlgebra:
    """Parse ``dims m k`` / ``bracket i j l value`` records (1-based, i < j)."""
    dims = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].lower()
        if key == "dims":
            if dims is not None:
                raise GroupFileError("duplicate dims header", lineno)
            if len(parts) != 3:
                raise GroupFileError("expected 'dims m k'", lineno)
            try:
                dims = (int(parts[1]), int(parts[2]))
            except ValueError:
                raise GroupFileError(f"non-integer dims {parts[1:]}", lineno) from None
            if dims[0] < 1 or dims[1] < 1:
                raise GroupFileError("dims must be positive", lineno)
        elif key == "bracket":
            if dims is None:
                raise GroupFileError("bracket record before dims header", lineno)
            if len(parts) != 5:
                raise GroupFileError("expected 'bracket i j l value'", lineno)
            try:
                i, j, l = (int(p) for p in parts[1:4])
                value = float(parts[4])
            except ValueError:
                raise GroupFileError(f"cannot parse bracket record {parts[1:]}", lineno) from None
            m, k = dims
            if not (1 <= i <= m and 1 <= j <= m and 1 <= l <= k):
                raise GroupFileError(f"index out of range for dims {m} {k}", lineno)
            if i == j:
                raise GroupFileError(f"diagonal bracket [V_{i}, V_{i}] must vanish", lineno)
            entries.append((lineno, i, j, l, value))
        else:
            raise GroupFileError(f"unknown record {parts[0]!r}", lineno)
    if dims is None:
        raise GroupFileError("missing 'dims m k' header")
    m, k = dims
    c = np.zeros((m, m, k))
    seen = {}
    for lineno, i, j, l, value in entries:
        if i > j:
            # an explicit lower-triangle entry must agree with antisymmetry
            i, j, value = j, i, -value
        key = (i, j, l)
        if key in seen and seen[key][1] != value:
            raise GroupFileError(
                f"c({i},{j},{l}) given inconsistently (also on line {seen[key][0]}); "
                "the symmetric part of the bracket must vanish", lineno)
        seen[key] = (lineno, value)
        c[i - 1, j - 1, l - 1] = value
        c[j - 1, i - 1, l - 1] = -value
    return TwoStepAlgebra(m, k, c, name=name)


def load_group_file(path) -> TwoStepAlgebra:
    path = Path(path)
    return parse_group_text(path.read_text(), name=path.stem)


def format_group_text(a: TwoStepAlgebra) -> str:
    lines = [f"dims {a.m} {a.k}"]
    for i in range(a.m):
        for j in range(i + 1, a.m):
            for l in range(a.k):
                if a.c[i, j, l] != 0:
                    lines.append(f"bracket {i + 1} {j + 1} {l + 1} {float(a.c[i, j, l])!r}")
    return "\n".join(lines) + "\n"


_BUILTIN = re.compile(r"^(heisenberg|free2step)-(\d+)$")


def group_from_name(name: str) -> TwoStepAlgebra:
    """Builtins ``heisenberg-n`` and ``free2step-m``."""
    match = _BUILTIN.match(name.strip().lower())
    if not match:
        raise ValueError(f"unknown builtin group {name!r} (expected heisenberg-N or free2step-M)")
    kind, size = match.group(1), int(match.group(2))
    if kind == "heisenberg":
        return make_heisenberg(size)
    return make_free_two_step(size)
