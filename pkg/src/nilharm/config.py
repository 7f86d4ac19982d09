"""Central defaults: resolutions, steps, seeds and check tolerances.

Every number a report compares against lives here so that a run can be
reproduced from a single document (see ``Defaults.from_mapping``).
"""
from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Defaults:
    # nilgroup
    mw_trials: int = 16
    mw_tol: float = 1e-10
    # symplectic
    nondegeneracy_tol: float = 1e-10
    # schrodinger_rep
    rep_box: float = 12.0
    rep_points: int = 512
    gh_order: int = 80
    t_box: float = 20.0
    t_points: int = 401
    osc_box: float = 14.0
    osc_points: int = 1024
    # invariant_ops
    first_step: float = 1e-4
    second_step: float = 1e-3
    # eigenchain
    lambda_points: int = 41
    sample_box: float = 2.0
    n_sample_points: int = 20
    sup_budget: int = 1024
    seed: int = 0

    # check tolerances (the module invariants)
    tol_group_axioms: float = 1e-12
    tol_frame_orthonormal: float = 1e-10
    tol_frame_pairing: float = 1e-8  # times (1 + ||B||)
    tol_homogeneity: float = 1e-10
    tol_eigen_residual: float = 1e-4  # times (1 + |lambda|^2)
    tol_chain_relation: float = 1e-4
    tol_bounded_ratio: float = 1.01
    tol_growth_exact: float = 1e-6
    tol_growth_relative: float = 5e-2
    tol_probe_shrink: float = 0.25
    tol_lifted_field: float = 1e-6
    tol_lifted_sublaplacian: float = 1e-5

    @classmethod
    def from_mapping(cls, mapping):
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise KeyError(f"unknown config keys: {sorted(unknown)}")
        return replace(cls(), **mapping)

    def as_dict(self):
        return asdict(self)


DEFAULTS = Defaults()
