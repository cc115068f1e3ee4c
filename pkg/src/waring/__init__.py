"""Waring decompositions of homogeneous forms and their parameter spaces.

The package computes additive decompositions F = sum w_i L_i^d of complex
homogeneous polynomials into powers of linear forms, decides when a point
configuration is a polar polyhedron through apolarity, and measures the
dimension of the space of such decompositions via tangent and secant
computations.
"""

__version__ = "0.1.0"

from .errors import PreconditionError, RejectedSampleError
from .forms import (
    Decomposition,
    HomogeneousForm,
    LinearForm,
    ProjectivePoint,
    canonical_form,
    decompositions_close,
    derivative_span,
    make_decomposition,
    monomial_basis,
    monomial_index,
    multinomial,
    num_monomials,
    partial_derivative,
    power_form,
    projective_normalize,
    projective_separation,
    random_decomposition,
    random_form,
    synthesize,
    veronese,
)
from .apolarity import (
    ApolarBasis,
    CatalecticantMatrix,
    PolyhedronCertificate,
    apolar_pairing,
    apolar_space,
    catalecticant,
    is_polar_polyhedron,
    vanishing_forms,
)
from .decompose import (
    ChainCertificate,
    PencilResult,
    VspSample,
    chain_connect,
    chain_step,
    check_chain,
    conic_intersection,
    conic_plane_from_forms,
    conic_vsp4_sample,
    decomposition_residual,
    plane_cubic_recover_parameter,
    plane_cubic_vsp4,
    quadric_pencil_decompose,
    quadric_sample_vsp,
    random_conic_plane,
    sample_decompositions,
    solve_weights,
    sylvester_parametrize,
    tangent_dimension,
)
from .secant import (
    SecantReport,
    expected_secant_dim,
    stable_report,
    terracini_dim,
    veronese_tangent_basis,
)
