"""
Implicit-certificate issuance over McEliece-style keys.

The CA signs a seeded permutation M_r with its private key (T), encrypts T
to the end entity's public key without an error term (B = T L_E), and puts
B in the certificate.  The end entity decrypts B back to T, checks
L_CA T == M_r, and folds everything into a new scrambler

    K1' = M_h L_CA T K1_E,      K1'^-1 = K1_E^-1 M_r^-1 M_h^-1

while any verifier obtains the matching public key Q = M_h L_CA B from
public data only.  M_h is derived from the hashes of both certificates.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from . import certs
from .certs import CertType, ImplicitCert, Validity
from .gf2 import Gf2Matrix, multiply, serialize
from .mceliece import (
    LinearCode,
    McElieceKeyPair,
    ParameterSet,
    UncorrectableError,
    decrypt_report,
    sign,
    sign_with,
)
from .rand_gen import permutation_pair

CERT_VERSION = 1


class ProtocolError(ValueError):
    pass


class IssuerValidationError(ProtocolError):
    """The issuance response does not verify against the CA."""


class MalformedReconstructionValue(IssuerValidationError):
    """B does not decrypt cleanly under the end entity's private key."""


def root_cert(keypair: McElieceKeyPair, info: bytes = b"") -> bytes:
    """Canonical self-descriptor C_CA for a CA keypair."""
    cert = ImplicitCert(
        version=CERT_VERSION,
        cert_type=CertType.ROOT,
        issuer_digest=hashlib.sha256(serialize(keypair.public_l)).digest(),
        param_set=keypair.params.name,
        info_e=info,
        reconstruction_b=keypair.public_l,
    )
    return certs.encode_cert(cert)


@dataclass(frozen=True)
class CaContext:
    keypair: McElieceKeyPair
    ca_cert: bytes

    @classmethod
    def create(cls, keypair: McElieceKeyPair, info: bytes = b"") -> "CaContext":
        return cls(keypair, root_cert(keypair, info))


@dataclass(frozen=True)
class IssuanceRequest:
    ee_public_l: Gf2Matrix
    info: bytes


@dataclass(frozen=True)
class IssuanceResponse:
    seed_r: int
    cert: ImplicitCert

    @property
    def cert_bytes(self) -> bytes:
        return certs.encode_cert(self.cert)


@dataclass(frozen=True)
class ExpandedKeyPair:
    params: ParameterSet
    k1_new: Gf2Matrix
    k1_new_inv: Gf2Matrix
    code: LinearCode
    k3: Gf2Matrix
    k3_inv: Gf2Matrix
    public_q: Gf2Matrix


def _check_dims(params: ParameterSet, m: Gf2Matrix, shape: tuple[int, int], what: str):
    if m.shape != shape:
        raise ProtocolError(
            f"{what} is {m.rows}x{m.cols}, parameter set {params.name} needs "
            f"{shape[0]}x{shape[1]}"
        )


def ca_issue(ca: CaContext, req: IssuanceRequest, seed_r: int,
             validity: Validity | None = None) -> IssuanceResponse:
    """Issue C_E for `req`.  Reusing seed_r is not detected."""
    params = ca.keypair.params
    _check_dims(params, req.ee_public_l, (params.zeta1, params.zeta2), "L_E")
    m_r = permutation_pair(seed_r, params.zeta1).m1
    t = sign(m_r, ca.keypair)
    b = multiply(t, req.ee_public_l)
    cert = ImplicitCert(
        version=CERT_VERSION,
        cert_type=CertType.IMPLICIT,
        issuer_digest=certs.cert_digest(ca.ca_cert),
        param_set=params.name,
        info_e=req.info,
        reconstruction_b=b,
        validity=validity,
    )
    return IssuanceResponse(seed_r, cert)


def derive_mh(cert_e: bytes, cert_ca: bytes, zeta1: int) -> Gf2Matrix:
    """Permutation seeded by SHA-256(H(C_E) || H(C_CA)), first 8 octets big-endian."""
    if not cert_e or not cert_ca:
        raise ValueError("certificate encodings must be nonempty")
    h = hashlib.sha256(certs.cert_digest(cert_e) + certs.cert_digest(cert_ca)).digest()
    return permutation_pair(int.from_bytes(h[:8], "big"), zeta1).m1


def ee_expand(ee: McElieceKeyPair, resp: IssuanceResponse, ca_cert: bytes,
              ca_public_l: Gf2Matrix) -> ExpandedKeyPair:
    params = ee.params
    z1, z2 = params.zeta1, params.zeta2
    cert = resp.cert
    if cert.cert_type != CertType.IMPLICIT:
        raise ProtocolError(f"expected an implicit certificate, got {cert.cert_type.name}")
    if cert.issuer_digest != certs.cert_digest(ca_cert):
        raise IssuerValidationError("certificate names a different issuer")
    _check_dims(params, ca_public_l, (z1, z2), "L_CA")
    b = cert.reconstruction_b
    if b.shape != (z2, z2):
        raise MalformedReconstructionValue(f"B is {b.rows}x{b.cols}, expected {z2}x{z2}")

    try:
        dec = decrypt_report(b, ee.k1_inv, ee.code, ee.k3_inv)
    except UncorrectableError as exc:
        raise MalformedReconstructionValue(f"B does not decrypt: {exc}") from exc
    if dec.flagged:
        # B must be exactly T L_E for Q to match the expanded key
        raise MalformedReconstructionValue("B carries an error pattern")
    t = dec.messages

    pair = permutation_pair(resp.seed_r, z1)
    if multiply(ca_public_l, t) != pair.m1:
        raise IssuerValidationError("L_CA T does not reproduce M_r")

    cert_bytes = certs.encode_cert(cert)
    mh = derive_mh(cert_bytes, ca_cert, z1)
    mh_l = multiply(mh, ca_public_l)
    k1_new = multiply(multiply(mh_l, t), ee.k1)
    k1_new_inv = multiply(multiply(ee.k1_inv, pair.m2), mh.T)
    q = multiply(mh_l, b)
    return ExpandedKeyPair(params, k1_new, k1_new_inv, ee.code, ee.k3, ee.k3_inv, q)


def reconstruct_public(cert_e: ImplicitCert | bytes, ca_cert: bytes,
                       ca_public_l: Gf2Matrix) -> Gf2Matrix:
    """Q = M_h L_CA B from the certificate and CA public data alone."""
    if isinstance(cert_e, ImplicitCert):
        cert, cert_bytes = cert_e, certs.encode_cert(cert_e)
    else:
        cert_bytes = bytes(cert_e)
        cert = certs.decode_cert(cert_bytes)
    z1, z2 = ca_public_l.shape
    b = cert.reconstruction_b
    if b.shape != (z2, z2):
        raise ProtocolError(f"B is {b.rows}x{b.cols}, expected {z2}x{z2}")
    mh = derive_mh(cert_bytes, ca_cert, z1)
    return multiply(multiply(mh, ca_public_l), b)


def expanded_sign(m: Gf2Matrix, key: ExpandedKeyPair) -> Gf2Matrix:
    return sign_with(m, key.k1_new_inv, key.code.decoder, key.k3_inv)


def expanded_decrypt(z: Gf2Matrix, key: ExpandedKeyPair) -> Gf2Matrix:
    return decrypt_report(z, key.k1_new_inv, key.code, key.k3_inv).messages
