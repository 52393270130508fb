"""Cap-integral geometric phase against holonomy for increasing mesh levels."""

import argparse
import time

import numpy as np

from threewave import KahlerStructure, MeshConfig, compute_phases, geometric_phase_surface
from threewave.symmetry import wrap_signed


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--levels", type=int, nargs="+", default=[0, 1, 2, 3])
    p.add_argument("--q0", type=complex, nargs=3, default=[1, 0.5, 0.6 + 0.2j])
    args = p.parse_args()

    K = KahlerStructure.unit()
    pb = compute_phases(K, np.array(args.q0))
    geom = wrap_signed(np.asarray(pb.theta_geom.theta))
    print(f"holonomy: {geom}")
    for level in args.levels:
        t0 = time.perf_counter()
        r = geometric_phase_surface(K, pb.orbit, MeshConfig(level))
        rel = np.max(np.abs(wrap_signed(r.flux - geom))) / np.max(np.abs(geom))
        print(f"level {level}: {r.triangles:6d} triangles  flux {r.flux}  rel. diff {rel:.3e}  "
              f"({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
