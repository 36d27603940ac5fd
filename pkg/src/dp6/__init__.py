"""Classification toolkit for sextic del Pezzo surfaces of Picard rank 1."""

from .fieldtower import (
    ClassFact,
    CompositeGroup,
    ExtensionDescriptor,
    FactRegistry,
    FieldElement,
    GaloisTower,
    VarAutomorphism,
    apply,
    composite_group,
    hilbert90_witness,
    is_fixed,
    norm,
    norm_class,
)
from .curveconfig import (
    CurveClass,
    CurveConfig,
    hexagon_action,
    induced_sigma_prime_action,
    intersection,
    invariant_picard_rank,
)
from .surface import (
    SurfaceSpec,
    TwistedAutomorphism,
    are_cohomologous,
    automorphism_description,
    cocycle_assignments,
    equivalence_move,
    index,
    is_automorphism,
    is_isomorphic,
    make_surface,
    sb_class_equivalent,
    severi_brauer_data,
)
from .points import (
    ClosedPointSpec,
    construct_2point,
    construct_3point,
    general_position,
    twisted_orbit,
    validate_point,
)
from .sarkisov import (
    LinkRecord,
    are_birational,
    fields_d_probe,
    is_birationally_rigid,
    link,
)
from .birgroup import (
    BirGraph,
    check_relation,
    classify_edge,
    explore_graph,
    psi_image,
    word_to_generators,
)

__all__ = [n for n in dir() if not n.startswith("_")]
__version__ = "0.1.0"
