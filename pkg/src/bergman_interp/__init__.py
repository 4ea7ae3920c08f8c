"""Interpolating sequences for weighted Bergman spaces on the unit disk and ball.

Submodules
----------
geometry
    Moebius maps, Kobayashi distance and balls, point indexing.
kernel
    Bergman kernel, its powers and the standard kernel estimates.
quadrature
    Gauss and quasi-Monte Carlo rules on the disk and ball.
integration
    Weighted Bergman norms, Carleson measures, local integral bounds.
sequences
    Sequence norms, separation, lattices, Borel partitions, kernel double sums.
interpolation
    Approximate extensions, Neumann iteration, direct solves, transport and
    one-point augmentation.
cli
    Command-line front end.
"""

from .exceptions import ConvergenceError, DomainError, HypothesisError, SingularGramError
from .geometry import (
    DomainSpec,
    KobayashiBall,
    PointIndex,
    ball_volume,
    boundary_distance,
    kobayashi_distance,
    mobius,
    pseudo_distance,
)
from .integration import AtomicMeasure, SpaceParams, carleson_test, weighted_norm
from .interpolation import (
    Interpolant,
    InterpolationProblem,
    NeumannTrace,
    augment_point,
    extend_p1,
    extend_pgen,
    oracle_solve,
    restrict,
    solve_neumann,
    truncate_to_contracting_tail,
    transport,
)
from .kernel import KernelPower, forelli_rudin_integral, jacobian, kernel, reproduce
from .quadrature import GaussRule, QMCRule
from .sequences import (
    BorelPartition,
    Lattice,
    PointSequence,
    WeightedValueSequence,
    borel_partition,
    generate_lattice,
    k_sum,
    separation_diagnostics,
    separation_margin,
    sequence_norm,
)

__version__ = "0.1.0"
