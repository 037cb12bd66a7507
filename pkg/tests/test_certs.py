import hashlib
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pqcmc import certs
from pqcmc.certs import (
    CertType,
    ImplicitCert,
    Tag,
    Validity,
    cert_digest,
    decode_cert,
    ecc_cert_savings,
    encode_cert,
    length_report,
    round_half_up,
)
from pqcmc.gf2 import Gf2Matrix
from pqcmc.mceliece import SIZE_PRESETS

# Length comparison table: (zeta1, zeta2) -> (L KB, B KB, s bytes)
PRESET_CELLS = {
    (524, 1024): (66, 128, 128),
    (1219, 1702): (253, 354, 213),
    (1696, 2048): (424, 512, 256),
    (1751, 2048): (438, 512, 256),
    (2384, 3178): (925, 1233, 397),
    (3604, 4096): (1802, 2048, 512),
    (5208, 6944): (4415, 5886, 868),
}


def make_cert(seed=0, info=b"vehicle-17", validity=None, size=5):
    rng = np.random.default_rng(seed)
    return ImplicitCert(
        version=1,
        cert_type=CertType.IMPLICIT,
        issuer_digest=bytes(rng.integers(0, 256, 32, dtype=np.uint8)),
        param_set="toy-12-28",
        info_e=info,
        reconstruction_b=Gf2Matrix.from_bits(rng.integers(0, 2, (size, size))),
        validity=validity,
    )


certificates = st.builds(
    make_cert,
    seed=st.integers(0, 2**32 - 1),
    info=st.binary(max_size=40),
    validity=st.none() | st.builds(Validity, st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1)),
    size=st.integers(1, 30),
)


@settings(max_examples=150)
@given(certificates)
def test_round_trip(cert):
    data = encode_cert(cert)
    assert decode_cert(data) == cert
    assert encode_cert(decode_cert(data)) == data


def test_layout_and_no_signature_tag():
    data = encode_cert(make_cert())
    assert data[:4] == b"PQCC"
    fields = certs.decode_tlv(b"PQCC", data, Tag)
    assert list(fields) == sorted(fields)
    assert set(fields) <= {t.value for t in Tag}
    assert not any("SIG" in t.name for t in Tag)
    assert not any("sig" in f for f in ImplicitCert.__dataclass_fields__)


def test_empty_info_is_zero_length_tlv():
    data = encode_cert(make_cert(info=b""))
    assert certs.decode_tlv(b"PQCC", data, Tag)[Tag.INFO] == b""
    assert b"\x05\x00\x00\x00\x00" in data


def test_encoding_injective_on_corpus():
    corpus = [make_cert(seed=s, info=bytes([i])) for s in range(20) for i in range(5)]
    corpus += [make_cert(validity=Validity(1, 2)), make_cert(validity=Validity(1, 3))]
    encodings = {encode_cert(c) for c in corpus}
    assert len(encodings) == len(set(corpus)) == len(corpus)


def _tlv(tag, value):
    return bytes([tag]) + len(value).to_bytes(4, "big") + value


def test_decode_errors():
    data = encode_cert(make_cert())
    with pytest.raises(certs.UnknownTag):
        decode_cert(data + _tlv(0x7F, b""))
    with pytest.raises(certs.DuplicateTag):
        decode_cert(data[:4] + _tlv(1, b"\0\0\0\1") + _tlv(1, b"\0\0\0\1"))
    with pytest.raises(certs.TruncatedField):
        decode_cert(data[:-3])
    with pytest.raises(certs.TruncatedField):
        decode_cert(data + b"\x01\x00")
    with pytest.raises(certs.BadContainerMagic):
        decode_cert(b"NOPE" + data[4:])
    with pytest.raises(certs.MissingField):
        decode_cert(data[:4] + _tlv(1, b"\0\0\0\1"))
    with pytest.raises(certs.FieldOrderError):
        decode_cert(data[:4] + _tlv(2, b"\1") + _tlv(1, b"\0\0\0\1"))
    errors = {certs.UnknownTag, certs.DuplicateTag, certs.TruncatedField}
    assert len(errors) == 3


def test_digest():
    data = encode_cert(make_cert())
    assert cert_digest(data) == cert_digest(data)
    assert cert_digest(b"").hex() == (
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
    )
    assert cert_digest(b"abc").hex() == (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    )


def test_digest_changes_with_any_field():
    base = make_cert()
    variants = [
        replace(base, version=2),
        replace(base, cert_type=CertType.ROOT),
        replace(base, issuer_digest=bytes(32)),
        replace(base, param_set="other"),
        replace(base, info_e=b"x"),
        replace(base, reconstruction_b=base.reconstruction_b.flip(0, 0)),
        replace(base, validity=Validity(0, 1)),
    ]
    digests = {cert_digest(encode_cert(c)) for c in variants} | {cert_digest(encode_cert(base))}
    assert len(digests) == len(variants) + 1


def test_round_half_up():
    assert round_half_up(Fraction(131, 2)) == 66
    assert round_half_up(Fraction(85100, 400)) == 213  # 212.75
    assert round_half_up(Fraction(1589, 4)) == 397     # 397.25
    assert round_half_up(Fraction(5, 2)) == 3
    assert round_half_up(Fraction(7, 2)) == 4


@pytest.mark.parametrize("pair", list(PRESET_CELLS))
def test_length_rows(pair):
    (r,) = length_report([pair]).rows
    assert (r.l_kb, r.b_kb, r.s_rounded) == PRESET_CELLS[pair]
    z1, z2 = pair
    assert r.l_bytes == Fraction(z1 * z2, 8)
    assert r.b_bytes == Fraction(z2 * z2, 8)
    assert r.s_bytes == Fraction(z2, 8)


def test_length_report_exact_bytes():
    r = length_report([(1696, 2048)]).rows[0]
    assert r.l_bytes == 434176
    assert length_report([(524, 1024)]).rows[0].l_bytes / 1024 == Fraction(131, 2)


def test_length_text_rows():
    text = length_report(SIZE_PRESETS).to_text().splitlines()
    assert len(text) == 8
    assert text[1].split() == ["(524,", "1024)", "66", "KB", "128", "KB", "128", "bytes"]
    assert "l_kb=4415" in length_report(SIZE_PRESETS).to_kv()


def test_ecc_savings():
    e = ecc_cert_savings()
    assert e.uncompressed_point == 65
    assert e.compressed_point == 33
    assert e.compression_savings == 32
    assert e.signature_uncompressed == 97
    assert e.signature_compressed == 65
    assert (e.explicit_total, e.implicit_total, e.implicit_savings) == (98, 33, 65)
