"""Gaudin and shift-of-argument operator families, opers with an irregular point, and monodromy."""
__version__ = "0.1.0"

from .gaudin import (  # noqa: F401
    JointSpectrum,
    OperatorFamily,
    classical_mf_generators,
    cyclic_span_dimension,
    homogeneous_hamiltonians,
    inhomogeneous_hamiltonians,
    joint_spectrum,
    poisson_bracket,
    principal_contraction_check,
    quantum_mf_family,
    rescaling_limit_check,
)
from .lie import (  # noqa: F401
    IrreducibleModule,
    RootSystemData,
    TensorModule,
    Weight,
    build_irreducible,
    build_root_system,
    coroot_pairing,
    killing_orthonormal_basis,
    principal_grading_character,
    q_weyl_dimension,
)
from .monodromy import (  # noqa: F401
    Connection,
    FormalNormalForm,
    MonodromyResult,
    SeparationRaySet,
    formal_normal_form,
    monodromy_matrix,
    ramified_pullback,
    rigidity_scan,
    separation_rays,
    transport,
    trivial_monodromy_test,
)
from .opers import (  # noqa: F401
    OperPoint,
    OperSpace,
    ResidueConstraint,
    build_oper_space,
    canonical_mu,
    gorenstein_series_check,
    relation_degrees,
    residue_constraint,
    sl2_oper_connection,
    sl2_spectrum_to_oper,
)
