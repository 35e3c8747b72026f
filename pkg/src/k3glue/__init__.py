"""Computational model of a K3 gluing construction from plane blow-ups.

Subpackages, one per concern:

* ``torus``     -- Pic0 arithmetic, invariant distance, Diophantine estimation
* ``cover``     -- disk covers, U(1) cocycles, cochain norms, Ueda constants
* ``modes``     -- quasi-periodic Fourier series and vertical series algebra
* ``linearize`` -- delta-equation solver, Schroder/extension recursions, majorants
* ``surgery``   -- the glued annulus-bundle model W* and its invariants
* ``family``    -- Kodaira-Spencer cocycles, fixed loci, separation radii
* ``lattice``   -- exact K3-lattice linear algebra
* ``cli``       -- the ``k3glue`` command-line surface
"""

from . import errors
from .torus import (
    FlatBundleClass,
    TorusShape,
    class_add,
    class_neg,
    class_scale,
    diophantine_estimate,
    golden_class,
    invariant_distance,
    liouville_class,
    ninth_point,
    power_distance_sequence,
)
from .cover import (
    CoverAtlas,
    FlatCocycle,
    build_cover,
    cocycle_distance,
    delta,
    restriction_cocycle,
    schwarz_pick_s,
    ueda_constants,
    verify_ueda_inequality,
)

__all__ = [
    "errors",
    "FlatBundleClass",
    "TorusShape",
    "class_add",
    "class_neg",
    "class_scale",
    "diophantine_estimate",
    "golden_class",
    "invariant_distance",
    "liouville_class",
    "ninth_point",
    "power_distance_sequence",
    "CoverAtlas",
    "FlatCocycle",
    "build_cover",
    "cocycle_distance",
    "delta",
    "restriction_cocycle",
    "schwarz_pick_s",
    "ueda_constants",
    "verify_ueda_inequality",
]

__version__ = "0.1.0"
