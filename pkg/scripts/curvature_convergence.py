"""Small-loop holonomy divided by loop area, against the finite-difference curvature."""

import argparse

import numpy as np

from threewave import KahlerStructure
from threewave.curvature import curvature, small_loop_holonomy
from threewave.reduction import phi_gradient, project


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    K = KahlerStructure.unit()
    rng = np.random.default_rng(args.seed)
    print(f"{'point':>5} {'eps':>8} {'rel. error':>12}")
    for i in range(args.points):
        q = rng.normal(size=3) + 1j * rng.normal(size=3)
        y = project(K, q)
        n = phi_gradient(K, y.leaf, y.mu)
        n /= np.linalg.norm(n)
        t1 = np.cross(n, [0, 0, 1.0])
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(n, t1)
        c = curvature(K, y.leaf, y.mu, t1, t2)
        for eps in (3e-2, 1e-2, 3e-3, 1e-3):
            hol = small_loop_holonomy(K, y.leaf, y.mu, t1, t2, eps) / eps**2
            print(f"{i:>5} {eps:>8.0e} {np.linalg.norm(hol - c) / np.linalg.norm(c):>12.3e}")


if __name__ == "__main__":
    main()
