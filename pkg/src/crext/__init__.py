"""Extension of CR functions near CR singular points of real hypersurfaces in C^n x R."""
from .poly import CPolynomial, SPolynomial
from .quadric import (
    Inertia,
    NumericModel,
    QuadricModel,
    Verdict,
    block_reduce_B,
    cr_singular_locus,
    extension_verdict,
    inertia,
    is_q_nondegenerate,
    normalize,
    real_form,
)

__version__ = "0.1.0"
