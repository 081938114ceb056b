"""Positivity certificates for heat-semigroup coefficients on finite groups."""
from .certify import (
    CertificateReport,
    Conclusion,
    InequalitySystem,
    Status,
    certify,
    check_point,
    inequality_system,
)
from .characters import (
    CharacterTable,
    FusionTensor,
    character_table,
    fusion_coefficients,
    fusion_multi,
    verify_orthogonality,
)
from .groups import (
    FiniteGroup,
    build_cyclic,
    build_dihedral,
    build_product,
    build_symmetric,
    from_table,
)
from .semigroup import (
    Decomposition,
    ExpSum,
    LengthFunction,
    decompose,
    derivative_at_zero,
    eval_expsum,
    validate_length,
)
from .verify import (
    positivity_scan,
    power_expansion_check,
    sigma_orthogonality_check,
    theorem_sweep,
)

__version__ = "0.1.0"
