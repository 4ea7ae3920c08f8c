"""How fast does the integral of |K(z, .)|^p (1 - |w|)^alpha blow up?

Near the boundary it behaves like delta(z)^(alpha + 2 - 2p) on the disk. A
least-squares fit over delta in [1e-3, 0.5] picks up lower-order terms, so the
fitted slope drifts from the exponent when the window reaches deep into the
interior. Fitting only on [1e-5, 1e-2] brings it back.
"""

import numpy as np

from bergman_interp.exceptions import DomainError
from bergman_interp.kernel import forelli_rudin_slope


def main():
    wide = np.geomspace(1e-3, 0.5, 25)
    narrow = np.geomspace(1e-5, 1e-2, 15)
    print(f"{'p':>4} {'alpha':>6} {'expected':>9} {'[1e-3,0.5]':>11} {'[1e-5,1e-2]':>12}")
    for p in (1.5, 2.0, 3.0):
        for alpha in (0.0, 0.5, 1.0):
            try:
                a = forelli_rudin_slope(p, alpha, deltas=wide)
                b = forelli_rudin_slope(p, alpha, deltas=narrow)
            except DomainError:
                print(f"{p:4g} {alpha:6g}   endpoint: logarithmic growth")
                continue
            print(f"{p:4g} {alpha:6g} {a.expected:9.3f} {a.slope:11.4f} {b.slope:12.4f}")


if __name__ == "__main__":
    main()
