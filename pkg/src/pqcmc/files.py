"""
File containers built on the certificate TLV framing.

    PQCK  private McEliece key     header + K1, K1_INV, K2, K3, K3_INV, K4, K5, L
    PQCP  public key               header + L (or a reconstructed Q)
    PQCX  expanded private key     header + K1', K1'^-1, K2, K3, K3^-1, K4, K5, Q
    PQCR  issuance request         header-less: L_E, E
    PQCS  issuance response        seed_r (8 octets big-endian), C_E
"""

from __future__ import annotations

import enum

from . import gf2
from .certs import (
    MissingField,
    decode_cert,
    decode_tlv,
    encode_cert,
    encode_tlv,
    matrix,
    require,
    u32,
    u64,
)
from .mceliece import LinearCode, McElieceKeyPair, ParameterSet
from .protocol import ExpandedKeyPair, IssuanceRequest, IssuanceResponse

PRIVATE_MAGIC = b"PQCK"
PUBLIC_MAGIC = b"PQCP"
EXPANDED_MAGIC = b"PQCX"
REQUEST_MAGIC = b"PQCR"
RESPONSE_MAGIC = b"PQCS"


class KeyTag(enum.IntEnum):
    PARAM_NAME = 0x01
    ZETA1 = 0x02
    ZETA2 = 0x03
    FAMILY = 0x04
    T = 0x05
    K1 = 0x10
    K1_INV = 0x11
    K2 = 0x12
    K3 = 0x13
    K3_INV = 0x14
    K4 = 0x15
    K5 = 0x16
    L = 0x17


class MsgTag(enum.IntEnum):
    SEED_R = 0x01
    MATRIX = 0x02
    INFO = 0x03
    CERT = 0x04


def _header(params: ParameterSet) -> list[tuple[int, bytes]]:
    return [
        (KeyTag.PARAM_NAME, params.name.encode()),
        (KeyTag.ZETA1, params.zeta1.to_bytes(4, "big")),
        (KeyTag.ZETA2, params.zeta2.to_bytes(4, "big")),
        (KeyTag.FAMILY, params.code_family.encode()),
        (KeyTag.T, params.t.to_bytes(4, "big")),
    ]


def _params(f: dict[int, bytes]) -> ParameterSet:
    require(f, KeyTag.PARAM_NAME, KeyTag.ZETA1, KeyTag.ZETA2, KeyTag.FAMILY, KeyTag.T)
    return ParameterSet(
        f[KeyTag.PARAM_NAME].decode(),
        u32(f[KeyTag.ZETA1], "zeta1"),
        u32(f[KeyTag.ZETA2], "zeta2"),
        f[KeyTag.FAMILY].decode(),
        u32(f[KeyTag.T], "t"),
    )


def _blocks(named: dict[KeyTag, gf2.Gf2Matrix | None]) -> list[tuple[int, bytes]]:
    return [(tag, gf2.serialize(m)) for tag, m in named.items() if m is not None]


def _code(f: dict[int, bytes], t: int) -> LinearCode:
    k5 = matrix(f[KeyTag.K5], "K5") if KeyTag.K5 in f else None
    return LinearCode(matrix(f[KeyTag.K2], "K2"), matrix(f[KeyTag.K4], "K4"), k5, t)


_PRIVATE_TAGS = (KeyTag.K1, KeyTag.K1_INV, KeyTag.K2, KeyTag.K3, KeyTag.K3_INV,
                 KeyTag.K4, KeyTag.L)


def encode_private(key: McElieceKeyPair) -> bytes:
    return encode_tlv(PRIVATE_MAGIC, _header(key.params) + _blocks({
        KeyTag.K1: key.k1, KeyTag.K1_INV: key.k1_inv, KeyTag.K2: key.k2,
        KeyTag.K3: key.k3, KeyTag.K3_INV: key.k3_inv, KeyTag.K4: key.k4,
        KeyTag.K5: key.k5, KeyTag.L: key.public_l,
    }))


def decode_private(octets: bytes) -> McElieceKeyPair:
    f = decode_tlv(PRIVATE_MAGIC, octets, KeyTag)
    params = _params(f)
    require(f, *_PRIVATE_TAGS)
    return McElieceKeyPair(
        params,
        matrix(f[KeyTag.K1], "K1"), matrix(f[KeyTag.K1_INV], "K1_INV"),
        _code(f, params.t),
        matrix(f[KeyTag.K3], "K3"), matrix(f[KeyTag.K3_INV], "K3_INV"),
        matrix(f[KeyTag.L], "L"),
    )


def encode_expanded(key: ExpandedKeyPair) -> bytes:
    return encode_tlv(EXPANDED_MAGIC, _header(key.params) + _blocks({
        KeyTag.K1: key.k1_new, KeyTag.K1_INV: key.k1_new_inv,
        KeyTag.K2: key.code.generator, KeyTag.K3: key.k3, KeyTag.K3_INV: key.k3_inv,
        KeyTag.K4: key.code.decoder, KeyTag.K5: key.code.parity_check,
        KeyTag.L: key.public_q,
    }))


def decode_expanded(octets: bytes) -> ExpandedKeyPair:
    f = decode_tlv(EXPANDED_MAGIC, octets, KeyTag)
    params = _params(f)
    require(f, *_PRIVATE_TAGS)
    return ExpandedKeyPair(
        params,
        matrix(f[KeyTag.K1], "K1'"), matrix(f[KeyTag.K1_INV], "K1'^-1"),
        _code(f, params.t),
        matrix(f[KeyTag.K3], "K3"), matrix(f[KeyTag.K3_INV], "K3_INV"),
        matrix(f[KeyTag.L], "Q"),
    )


def encode_public(params: ParameterSet, public: gf2.Gf2Matrix) -> bytes:
    return encode_tlv(PUBLIC_MAGIC, _header(params) + [(KeyTag.L, gf2.serialize(public))])


def decode_public(octets: bytes) -> tuple[ParameterSet, gf2.Gf2Matrix]:
    f = decode_tlv(PUBLIC_MAGIC, octets, KeyTag)
    params = _params(f)
    if set(f) - {KeyTag.PARAM_NAME, KeyTag.ZETA1, KeyTag.ZETA2, KeyTag.FAMILY,
                 KeyTag.T, KeyTag.L}:
        raise MissingField("public key files hold only the header and L")
    require(f, KeyTag.L)
    return params, matrix(f[KeyTag.L], "L")


def encode_request(req: IssuanceRequest) -> bytes:
    return encode_tlv(REQUEST_MAGIC, [
        (MsgTag.MATRIX, gf2.serialize(req.ee_public_l)),
        (MsgTag.INFO, bytes(req.info)),
    ])


def decode_request(octets: bytes) -> IssuanceRequest:
    f = decode_tlv(REQUEST_MAGIC, octets, (MsgTag.MATRIX, MsgTag.INFO))
    require(f, MsgTag.MATRIX, MsgTag.INFO)
    return IssuanceRequest(matrix(f[MsgTag.MATRIX], "L_E"), f[MsgTag.INFO])


def encode_response(resp: IssuanceResponse) -> bytes:
    return encode_tlv(RESPONSE_MAGIC, [
        (MsgTag.SEED_R, resp.seed_r.to_bytes(8, "big")),
        (MsgTag.CERT, encode_cert(resp.cert)),
    ])


def decode_response(octets: bytes) -> IssuanceResponse:
    f = decode_tlv(RESPONSE_MAGIC, octets, (MsgTag.SEED_R, MsgTag.CERT))
    require(f, MsgTag.SEED_R, MsgTag.CERT)
    return IssuanceResponse(u64(f[MsgTag.SEED_R], "seed_r"), decode_cert(f[MsgTag.CERT]))
