"""Moving an interpolation problem by a disk automorphism, then adding a node.

Transport multiplies the targets by K(a_k, a)^e, solves on the original nodes
and pulls the solution back; the result interpolates the original values at
the moved nodes phi_a(a_k). Augmentation adds one node b by combining an
interpolant g with a function f vanishing at the old nodes.
"""

import numpy as np

from bergman_interp import io
from bergman_interp.interpolation import (
    augment_point,
    solve_neumann,
    transport,
    vanishing_function,
)


def main():
    data = io.load_bundled("two_point_disk")
    prob, opts = io.problem_from_dict(data)
    a = io.decode_point(opts["a_param"])

    tp = transport(prob, a)
    F, trace = solve_neumann(tp.problem)
    G = tp.pull_back(F)
    print("moved nodes:", tp.moved_nodes.points[:, 0])
    print("G at moved nodes:", G(tp.moved_nodes.points), "targets:", prob.targets.values)

    g, _ = solve_neumann(prob)
    b = io.decode_point(opts["b"])
    v0 = io.decode_complex(opts["v0"])
    f = vanishing_function(prob, b)
    H = augment_point(g, f, b, v0, nodes=prob.seq)
    print("H at old nodes:", H(prob.seq.points))
    print(f"H(b) = {complex(H(b)):.6f}, wanted {v0}")
    print(f"{len(H)} kernel terms after consolidation")
    assert np.allclose(H(prob.seq.points), prob.targets.values, atol=1e-8)


if __name__ == "__main__":
    main()
