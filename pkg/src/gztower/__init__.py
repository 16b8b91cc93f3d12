"""Gelfand-Zetlin integrable structure on T*GL(N).

Exact commuting families from characteristic minors, the quantum commuting
subalgebra via quantum determinants, canonical charts on coadjoint orbits,
and the associated action-angle / spectral-tower geometry, with exact
symbolic checks where possible and independent numerical oracles elsewhere.
"""

from .poisson import (
    CanonicalPoint,
    PoissonPoly,
    bracket,
    canonical_bracket,
    evaluate,
    evaluate_at,
    random_canonical_point,
    u_as_canonical,
    utilde_as_canonical,
)
from .families import (
    CommutingFamily,
    FamilySpec,
    build_family,
    char_minor,
    independence_rank,
    verify_commutes,
    verify_trivial_numeric,
)
from .quantum import (
    NCPoly,
    diffop_realization_check,
    qdet,
    quantum_family,
    verify_quantum_commutes,
)
from .orbits import (
    GZChart,
    MinorConvention,
    OrbitPoint,
    OrbitTangent,
    gz_forward,
    kk_bracket,
    residue_form_check,
    sample_orbit,
    verify_canonical_chart,
)
from .tower import (
    TowerDescriptor,
    TowerLevel,
    action_angle_bracket_table,
    angle_variables,
    build_tower,
    differentials,
    hamiltonian_flow,
    linearization_check,
)

__version__ = "0.1.0"
