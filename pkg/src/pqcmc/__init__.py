"""Code-based implicit certificates: McEliece-style keys, certificate
issuance without signatures, key expansion and public-key reconstruction."""

from .gf2 import Gf2Matrix, identity, invert, multiply, rank, transpose
from .mceliece import PRESETS, McElieceKeyPair, ParameterSet, get_params, keygen
from .protocol import (
    CaContext,
    ExpandedKeyPair,
    IssuanceRequest,
    IssuanceResponse,
    IssuerValidationError,
    MalformedReconstructionValue,
    ca_issue,
    ee_expand,
    expanded_decrypt,
    expanded_sign,
    reconstruct_public,
)
from .rand_gen import Prng, permutation_pair, random_invertible

__version__ = "0.1.0"
