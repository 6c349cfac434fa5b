"""twistlab: exact computations with perfect complexes over graded algebras.

Twisted complexes of shifted projectives with exact linear algebra underneath
(prime field or rationals), spherical and P-twist endofunctors, entropy
estimation from Hom-dimension growth, cone-decomposition certificates, and
numerical Grothendieck group invariants.
"""

__version__ = "0.1.0"

from .exactlin import ScalarField, ExactMatrix, QQ, DEFAULT_PRIME_FIELD

__all__ = [
    "ScalarField",
    "ExactMatrix",
    "QQ",
    "DEFAULT_PRIME_FIELD",
    "__version__",
]
