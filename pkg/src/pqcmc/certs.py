"""
Certificate codec, digests, and length arithmetic.

Wire format: 4-octet magic, then fields as (1-octet tag, 4-octet big-endian
length, value) in ascending tag order.  Matrices are embedded as GF2M
blocks.  The same TLV framing is reused by the key and message containers
in :mod:`pqcmc.files`.
"""

from __future__ import annotations

import enum
import hashlib
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from . import gf2
from .gf2 import Gf2Matrix

CERT_MAGIC = b"PQCC"
_TL = struct.Struct(">BI")


class TlvError(ValueError):
    pass


class BadContainerMagic(TlvError):
    pass


class UnknownTag(TlvError):
    pass


class DuplicateTag(TlvError):
    pass


class TruncatedField(TlvError):
    pass


class FieldOrderError(TlvError):
    pass


class MissingField(TlvError):
    pass


class InvalidField(TlvError):
    pass


def encode_tlv(magic: bytes, fields: Iterable[tuple[int, bytes]]) -> bytes:
    out = bytearray(magic)
    for tag, value in fields:
        out += _TL.pack(tag, len(value))
        out += value
    return bytes(out)


def decode_tlv(magic: bytes, octets: bytes, known: Iterable[int]) -> dict[int, bytes]:
    """Parse a TLV container, enforcing known tags, no duplicates, tag order."""
    known = set(known)
    octets = bytes(octets)
    if octets[: len(magic)] != magic:
        raise BadContainerMagic(f"expected magic {magic!r}, got {octets[:len(magic)]!r}")
    pos = len(magic)
    fields: dict[int, bytes] = {}
    last = -1
    while pos < len(octets):
        if pos + _TL.size > len(octets):
            raise TruncatedField(f"truncated field header at offset {pos}")
        tag, length = _TL.unpack_from(octets, pos)
        pos += _TL.size
        if tag not in known:
            raise UnknownTag(f"unknown tag 0x{tag:02x}")
        if tag in fields:
            raise DuplicateTag(f"duplicate tag 0x{tag:02x}")
        if tag < last:
            raise FieldOrderError(f"tag 0x{tag:02x} after 0x{last:02x}")
        if pos + length > len(octets):
            raise TruncatedField(
                f"tag 0x{tag:02x} declares {length} octets, {len(octets) - pos} remain"
            )
        fields[tag] = octets[pos : pos + length]
        pos += length
        last = tag
    return fields


def require(fields: Mapping[int, bytes], *tags: int) -> None:
    missing = [t for t in tags if t not in fields]
    if missing:
        raise MissingField("missing tags " + ", ".join(f"0x{t:02x}" for t in missing))


def u32(value: bytes, what: str) -> int:
    if len(value) != 4:
        raise InvalidField(f"{what}: expected 4 octets, got {len(value)}")
    return int.from_bytes(value, "big")


def u64(value: bytes, what: str) -> int:
    if len(value) != 8:
        raise InvalidField(f"{what}: expected 8 octets, got {len(value)}")
    return int.from_bytes(value, "big")


def matrix(value: bytes, what: str) -> Gf2Matrix:
    try:
        return gf2.deserialize(value)
    except gf2.MatrixDecodeError as exc:
        raise InvalidField(f"{what}: {exc}") from exc


class CertType(enum.IntEnum):
    IMPLICIT = 1
    # self-descriptor of a CA: the matrix field carries the CA public key
    ROOT = 2


class Tag(enum.IntEnum):
    VERSION = 0x01
    CERT_TYPE = 0x02
    ISSUER = 0x03
    PARAM_SET = 0x04
    INFO = 0x05
    RECONSTRUCTION = 0x06
    VALIDITY = 0x07


@dataclass(frozen=True)
class Validity:
    start: int
    end: int


@dataclass(frozen=True)
class ImplicitCert:
    """Implicit certificate.  There is deliberately no signature field."""

    version: int
    cert_type: CertType
    issuer_digest: bytes
    param_set: str
    info_e: bytes
    reconstruction_b: Gf2Matrix
    validity: Validity | None = None


def encode_cert(cert: ImplicitCert) -> bytes:
    if len(cert.issuer_digest) != 32:
        raise InvalidField("issuer digest must be 32 octets")
    fields = [
        (Tag.VERSION, cert.version.to_bytes(4, "big")),
        (Tag.CERT_TYPE, bytes([int(cert.cert_type)])),
        (Tag.ISSUER, bytes(cert.issuer_digest)),
        (Tag.PARAM_SET, cert.param_set.encode()),
        (Tag.INFO, bytes(cert.info_e)),
        (Tag.RECONSTRUCTION, gf2.serialize(cert.reconstruction_b)),
    ]
    if cert.validity is not None:
        fields.append(
            (Tag.VALIDITY, struct.pack(">QQ", cert.validity.start, cert.validity.end))
        )
    return encode_tlv(CERT_MAGIC, fields)


def decode_cert(octets: bytes) -> ImplicitCert:
    f = decode_tlv(CERT_MAGIC, octets, Tag)
    require(f, Tag.VERSION, Tag.CERT_TYPE, Tag.ISSUER, Tag.PARAM_SET, Tag.INFO,
            Tag.RECONSTRUCTION)
    if len(f[Tag.CERT_TYPE]) != 1:
        raise InvalidField("cert type must be one octet")
    try:
        cert_type = CertType(f[Tag.CERT_TYPE][0])
    except ValueError:
        raise InvalidField(f"unknown cert type {f[Tag.CERT_TYPE][0]}") from None
    if len(f[Tag.ISSUER]) != 32:
        raise InvalidField("issuer digest must be 32 octets")
    validity = None
    if Tag.VALIDITY in f:
        if len(f[Tag.VALIDITY]) != 16:
            raise InvalidField("validity must be 16 octets")
        validity = Validity(*struct.unpack(">QQ", f[Tag.VALIDITY]))
    try:
        param_set = f[Tag.PARAM_SET].decode()
    except UnicodeDecodeError:
        raise InvalidField("parameter set name is not UTF-8") from None
    return ImplicitCert(
        version=u32(f[Tag.VERSION], "version"),
        cert_type=cert_type,
        issuer_digest=f[Tag.ISSUER],
        param_set=param_set,
        info_e=f[Tag.INFO],
        reconstruction_b=matrix(f[Tag.RECONSTRUCTION], "reconstruction value"),
        validity=validity,
    )


def cert_digest(octets: bytes) -> bytes:
    return hashlib.sha256(octets).digest()


# --- length arithmetic ---------------------------------------------------


def round_half_up(x: Fraction) -> int:
    return int((x + Fraction(1, 2)) // 1)


@dataclass(frozen=True)
class LengthRow:
    zeta1: int
    zeta2: int
    l_bytes: Fraction
    b_bytes: Fraction
    s_bytes: Fraction

    @property
    def l_kb(self) -> int:
        return round_half_up(self.l_bytes / 1024)

    @property
    def b_kb(self) -> int:
        return round_half_up(self.b_bytes / 1024)

    @property
    def s_rounded(self) -> int:
        return round_half_up(self.s_bytes)


@dataclass(frozen=True)
class LengthReport:
    rows: tuple[LengthRow, ...]

    def to_text(self) -> str:
        head = f"{'(zeta1, zeta2)':<16} {'L(E)':>10} {'B':>10} {'s':>12}"
        lines = [head]
        for r in self.rows:
            lines.append(
                f"{f'({r.zeta1}, {r.zeta2})':<16} {f'{r.l_kb} KB':>10}"
                f" {f'{r.b_kb} KB':>10} {f'{r.s_rounded} bytes':>12}"
            )
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        return "".join(
            f"zeta1={r.zeta1} zeta2={r.zeta2} l_bytes={r.l_bytes} b_bytes={r.b_bytes} "
            f"s_bytes={r.s_bytes} l_kb={r.l_kb} b_kb={r.b_kb} s_rounded={r.s_rounded}\n"
            for r in self.rows
        )


def length_report(params: Iterable[tuple[int, int]]) -> LengthReport:
    """Payload sizes of L (zeta1 x zeta2), B (zeta2 x zeta2) and s (zeta2 bits).

    Raw bit counts, no container overhead.  KB is 1024 bytes and values
    are rounded half-up.
    """
    rows = []
    for z1, z2 in params:
        rows.append(LengthRow(z1, z2, Fraction(z1 * z2, 8), Fraction(z2 * z2, 8),
                              Fraction(z2, 8)))
    return LengthReport(tuple(rows))


@dataclass(frozen=True)
class EccSavings:
    coordinate: int
    tag: int
    uncompressed_point: int
    compressed_point: int
    compression_savings: int
    signature_uncompressed: int
    signature_compressed: int
    explicit_total: int
    implicit_total: int
    implicit_savings: int


def ecc_cert_savings(coordinate: int = 32, tag: int = 1) -> EccSavings:
    """NIST P-256 VKI and signature sizes for explicit vs implicit certificates."""
    uncompressed = tag + 2 * coordinate
    compressed = tag + coordinate
    sig_compressed = compressed + coordinate
    explicit = compressed + sig_compressed
    implicit = compressed + 0
    return EccSavings(
        coordinate=coordinate,
        tag=tag,
        uncompressed_point=uncompressed,
        compressed_point=compressed,
        compression_savings=uncompressed - compressed,
        signature_uncompressed=uncompressed + coordinate,
        signature_compressed=sig_compressed,
        explicit_total=explicit,
        implicit_total=implicit,
        implicit_savings=explicit - implicit,
    )
