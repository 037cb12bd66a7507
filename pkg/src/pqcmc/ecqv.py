"""
Toy elliptic-curve baseline: curve arithmetic, point compression, ECDSA in
the (R, s) form, and ECQV issuance / key expansion.

The default curve is y^2 = x^3 + 2x + 2 over GF(17) with G = (5, 1) of
order 19.  It is small enough to enumerate and is insecure by design.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

from sympy.ntheory import sqrt_mod


class CurveError(ValueError):
    pass


class NotOnCurve(CurveError):
    pass


class NotCompressible(CurveError):
    pass


class RetryNeeded(CurveError):
    """The chosen nonce (or hash) gives a degenerate value; pick another."""


# None is the point at infinity
EcPoint = Optional[tuple[int, int]]
INFINITY: EcPoint = None


@dataclass(frozen=True)
class CurveParams:
    p: int
    a: int
    b: int
    g: tuple[int, int]
    n: int

    def contains(self, pt: EcPoint) -> bool:
        if pt is None:
            return True
        x, y = pt
        return 0 <= x < self.p and 0 <= y < self.p and (
            y * y - (x * x * x + self.a * x + self.b)
        ) % self.p == 0

    def check(self, pt: EcPoint) -> None:
        if not self.contains(pt):
            raise NotOnCurve(f"{pt} is not on the curve")

    @property
    def coord_len(self) -> int:
        return (self.p.bit_length() + 7) // 8


TOY = CurveParams(p=17, a=2, b=2, g=(5, 1), n=19)


def point_neg(curve: CurveParams, pt: EcPoint) -> EcPoint:
    curve.check(pt)
    if pt is None:
        return None
    return (pt[0], (-pt[1]) % curve.p)


def point_add(curve: CurveParams, p1: EcPoint, p2: EcPoint) -> EcPoint:
    curve.check(p1)
    curve.check(p2)
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    p = curve.p
    (x1, y1), (x2, y2) = p1, p2
    if x1 == x2 and (y1 + y2) % p == 0:
        return None
    if p1 == p2:
        lam = (3 * x1 * x1 + curve.a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def scalar_mul(curve: CurveParams, k: int, pt: EcPoint) -> EcPoint:
    """k * pt by left-to-right double-and-add; negative k uses -pt."""
    curve.check(pt)
    if k < 0:
        return scalar_mul(curve, -k, point_neg(curve, pt))
    acc: EcPoint = None
    for bit in bin(k)[2:] if k else "":
        acc = point_add(curve, acc, acc)
        if bit == "1":
            acc = point_add(curve, acc, pt)
    return acc


def compress(curve: CurveParams, pt: EcPoint) -> tuple[int, int]:
    """(tag, x) with tag 0x02 for even y, 0x03 for odd y."""
    curve.check(pt)
    if pt is None:
        raise NotCompressible("the point at infinity has no compressed form")
    return 0x02 | (pt[1] & 1), pt[0]


def decompress(curve: CurveParams, tag: int, x: int) -> EcPoint:
    if tag not in (0x02, 0x03) or not 0 <= x < curve.p:
        raise NotCompressible(f"bad compressed point (tag={tag:#x}, x={x})")
    rhs = (x * x * x + curve.a * x + curve.b) % curve.p
    y = sqrt_mod(rhs, curve.p)
    if y is None:
        raise NotCompressible(f"x={x} gives a non-residue")
    if (y & 1) != (tag & 1):
        y = (-y) % curve.p
    return (x, y)


def encode_point(curve: CurveParams, pt: EcPoint) -> bytes:
    tag, x = compress(curve, pt)
    return bytes([tag]) + x.to_bytes(curve.coord_len, "big")


def decode_point(curve: CurveParams, data: bytes) -> EcPoint:
    if len(data) != 1 + curve.coord_len:
        raise NotCompressible(f"compressed point must be {1 + curve.coord_len} octets")
    return decompress(curve, data[0], int.from_bytes(data[1:], "big"))


def hash_to_scalar(curve: CurveParams, data: bytes) -> int:
    return int.from_bytes(hashlib.sha256(data).digest(), "big") % curve.n


# --- ECDSA --------------------------------------------------------------


@dataclass(frozen=True)
class EcdsaSignature:
    r_point: tuple[int, int]
    s: int


def ecdsa_sign(curve: CurveParams, h: int, priv: int, k: int) -> EcdsaSignature:
    """s = (h + a x_R) / r mod n with R = rG; `priv` is a, `k` the nonce r."""
    n = curve.n
    if not 0 < k < n:
        raise RetryNeeded(f"nonce must lie in (0, {n})")
    R = scalar_mul(curve, k, curve.g)
    if R is None or R[0] % n == 0:
        raise RetryNeeded("x_R is zero mod n")
    s = (h + priv * R[0]) * pow(k, -1, n) % n
    if s == 0:
        raise RetryNeeded("s is zero")
    return EcdsaSignature(R, s)


def ecdsa_terms(curve: CurveParams, h: int, sig: EcdsaSignature) -> tuple[int, int, int]:
    """(w, u, v) = (1/s, h/s, x_R/s) mod n."""
    n = curve.n
    w = pow(sig.s, -1, n)
    return w, h * w % n, sig.r_point[0] * w % n


def ecdsa_verify(curve: CurveParams, h: int, sig: EcdsaSignature, pub: EcPoint) -> bool:
    if sig.s % curve.n == 0 or not curve.contains(sig.r_point) or sig.r_point is None:
        return False
    _, u, v = ecdsa_terms(curve, h, sig)
    z = point_add(curve, scalar_mul(curve, u, curve.g), scalar_mul(curve, v, pub))
    return z == sig.r_point


# --- ECQV ---------------------------------------------------------------


@dataclass(frozen=True)
class EcqvIssuance:
    cert_bytes: bytes
    recon_point: tuple[int, int]
    key_recon: int


def encode_ecqv_cert(curve: CurveParams, recon_point: EcPoint, info: bytes) -> bytes:
    """Compressed P followed by E.  Carries no signature."""
    return encode_point(curve, recon_point) + info


def decode_ecqv_cert(curve: CurveParams, cert: bytes) -> tuple[EcPoint, bytes]:
    k = 1 + curve.coord_len
    return decode_point(curve, cert[:k]), cert[k:]


def ecqv_issue(curve: CurveParams, ee_pub: EcPoint, info: bytes, ca_priv: int,
               nonce: int) -> EcqvIssuance:
    """P = A + rG, h = H(C_E) mod n, b = h r + c mod n."""
    P = point_add(curve, ee_pub, scalar_mul(curve, nonce, curve.g))
    if P is None:
        raise RetryNeeded("reconstruction point is the point at infinity")
    cert = encode_ecqv_cert(curve, P, info)
    h = hash_to_scalar(curve, cert)
    return EcqvIssuance(cert, P, (h * nonce + ca_priv) % curve.n)


def ecqv_expand(curve: CurveParams, ee_priv: int, issuance: EcqvIssuance,
                ca_pub: EcPoint) -> tuple[int, EcPoint]:
    """q = h a + b and Q = h P + C."""
    P, _ = decode_ecqv_cert(curve, issuance.cert_bytes)
    h = hash_to_scalar(curve, issuance.cert_bytes)
    q = (h * ee_priv + issuance.key_recon) % curve.n
    Q = point_add(curve, scalar_mul(curve, h, P), ca_pub)
    return q, Q


def ecqv_public(curve: CurveParams, cert_bytes: bytes, ca_pub: EcPoint) -> EcPoint:
    """Verifier side: Q from the certificate and the CA public key."""
    P, _ = decode_ecqv_cert(curve, cert_bytes)
    return point_add(curve, scalar_mul(curve, hash_to_scalar(curve, cert_bytes), P), ca_pub)


def demo_transcript(curve: CurveParams = TOY, ee_priv: int = 7, ca_priv: int = 11,
                    nonce: int = 5, info: bytes = b"EE1") -> dict:
    """Every value of one ECQV issuance, in protocol order."""
    A = scalar_mul(curve, ee_priv, curve.g)
    C = scalar_mul(curve, ca_priv, curve.g)
    iss = ecqv_issue(curve, A, info, ca_priv, nonce)
    q, Q = ecqv_expand(curve, ee_priv, iss, C)
    return {
        "curve": f"y^2 = x^3 + {curve.a}x + {curve.b} mod {curve.p}, G={curve.g}, n={curve.n}",
        "a": ee_priv,
        "A": A,
        "c": ca_priv,
        "C": C,
        "r": nonce,
        "P": iss.recon_point,
        "C_E": iss.cert_bytes.hex(),
        "h": hash_to_scalar(curve, iss.cert_bytes),
        "b": iss.key_recon,
        "q": q,
        "Q": Q,
        "qG": scalar_mul(curve, q, curve.g),
    }
