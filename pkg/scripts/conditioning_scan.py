"""Compare Gram-sum and lattice-coordinate orthonormality errors of the RICS basis across (N, |alpha0|).

Small residue weights g~(q) force huge, cancelling coherent coefficients;
the scan shows where the direct Gram path loses accuracy.
"""

import numpy as np

from quasibell.circle import CircleConfig, gram_g_tilde, rics, rics_coordinates
from quasibell.coherent_algebra import inner


def main():
    print(f"{'N':>3} {'|a0|':>5} {'min g~':>10} {'gram err':>10} {'lattice err':>12}")
    for n in [2, 4, 8, 16]:
        for a in [0.3, 0.5, 1.0, 2.0]:
            cfg = CircleConfig(n, a)
            states = [rics(cfg, q) for q in range(n)]
            g = np.array([[inner(x, y) for y in states] for x in states])
            c = np.array([rics_coordinates(cfg, s) for s in states])
            lat = c.conj() @ c.T
            wmin = min(gram_g_tilde(cfg, q) for q in range(n))
            print(
                f"{n:3d} {a:5.2f} {wmin:10.2e} {np.abs(g - np.eye(n)).max():10.2e} "
                f"{np.abs(lat - np.eye(n)).max():12.2e}"
            )


if __name__ == "__main__":
    main()
