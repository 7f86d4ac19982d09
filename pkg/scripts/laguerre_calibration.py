"""Matrix coefficients against the Laguerre closed form, and the F_alpha transform.

Part one compares Gauss-Hermite matrix coefficients with the special Hermite
closed form.  Part two computes the group Fourier transform of F_alpha by
quadrature and prints it next to the closed-form prefactor.
"""
import argparse

import numpy as np

from nilharm.eigenchain import BumpSpec, F_alpha_prediction, build_F_alpha, lambda_tilde
from nilharm.hermite import special_hermite_scaled
from nilharm.nilgroup import make_heisenberg
from nilharm.schrodinger_rep import QuadratureSpec, group_ft, matrix_coefficient
from nilharm.symplectic import frame


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--skip-transform", action="store_true")
    args = parser.parse_args()

    a = make_heisenberg(1)
    rng = np.random.default_rng(0)
    z = rng.uniform(-3, 3, size=(50, 2))
    for lam in (0.5, 1.0, 2.5):
        fr = frame(a, [lam])
        for alpha in range(5):
            quad = matrix_coefficient(fr, [lam], (alpha,), (alpha,), z)
            closed = special_hermite_scaled((alpha,), fr.d, (z[:, 0] + 1j * z[:, 1])[:, None])
            print(f"lambda={lam:4.1f} alpha={alpha}  max gap {np.abs(quad - closed).max():.2e}")
    if args.skip_transform:
        return

    phi = BumpSpec([1.0], 0.5, order=4.0)
    quad = QuadratureSpec("trapezoid", 421, 420.0)
    for alpha in [(0,), (1,)]:
        F = build_F_alpha(a, alpha, phi, points=121)
        for lam_b in (0.8, 1.0, 1.2):
            lam = lambda_tilde(a, [lam_b], alpha)
            idx, M = group_ft(frame(a, lam), lam, F, 4, v_box=12.0, v_points=61, quad=quad)
            dom = M[idx.index(alpha), idx.index(alpha)]
            pred = F_alpha_prediction(a, alpha, phi, lam)
            print(f"alpha={alpha[0]} lambda~={float(lam[0]):.4f}  quadrature {dom.real:+.6e}{dom.imag:+.1e}j"
                  f"  closed form {pred:+.6e}  rel {abs(dom - pred) / abs(pred):.1e}")


if __name__ == "__main__":
    main()
