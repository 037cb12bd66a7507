import dataclasses
import hashlib

import numpy as np
import pytest

from pqcmc import certs
from pqcmc.gf2 import Gf2Matrix, identity, is_permutation, multiply
from pqcmc.mceliece import column, encrypt, get_params, keygen, row, sign, verify
from pqcmc.protocol import (
    CaContext,
    IssuanceRequest,
    IssuerValidationError,
    MalformedReconstructionValue,
    ProtocolError,
    ca_issue,
    derive_mh,
    ee_expand,
    expanded_decrypt,
    expanded_sign,
    reconstruct_public,
)
from pqcmc.rand_gen import Prng, permutation_pair

TOY = get_params("toy-12-28")
HAM = get_params("hamming-7-4")


@pytest.fixture(scope="module", params=[TOY, HAM], ids=["toy", "hamming"])
def setup(request):
    params = request.param
    ca = CaContext.create(keygen(params, 100), b"root-ca")
    ee = keygen(params, 200)
    return params, ca, ee


def issue(ca, ee, seed_r, info=b"EE1"):
    return ca_issue(ca, IssuanceRequest(ee.public_l, info), seed_r)


def test_issue_shapes(setup):
    params, ca, ee = setup
    resp = issue(ca, ee, 1)
    assert resp.cert.reconstruction_b.shape == (params.zeta2, params.zeta2)
    assert resp.cert.issuer_digest == certs.cert_digest(ca.ca_cert)
    assert resp.seed_r == 1


def test_ca_signature_on_mr_recovers_mr(setup):
    params, ca, _ = setup
    for seed_r in range(20):
        m_r = permutation_pair(seed_r, params.zeta1).m1
        t = sign(m_r, ca.keypair)
        assert multiply(ca.keypair.public_l, t) == m_r


def test_expanded_public_term_by_term(setup):
    params, ca, ee = setup
    for seed_r in range(10):
        resp = issue(ca, ee, seed_r)
        x = ee_expand(ee, resp, ca.ca_cert, ca.keypair.public_l)
        b = resp.cert.reconstruction_b
        t = sign(permutation_pair(seed_r, params.zeta1).m1, ca.keypair)
        mh = derive_mh(resp.cert_bytes, ca.ca_cert, params.zeta1)
        lhs = multiply(multiply(multiply(multiply(mh, ca.keypair.public_l), t), ee.k1),
                       multiply(ee.k2, ee.k3))
        assert multiply(t, ee.public_l) == b
        assert lhs == multiply(multiply(mh, ca.keypair.public_l), b) == x.public_q
        assert multiply(multiply(x.k1_new, ee.k2), ee.k3) == x.public_q


def test_expanded_scrambler_inverse(setup):
    params, ca, ee = setup
    for seed_r in range(10):
        x = ee_expand(ee, issue(ca, ee, seed_r), ca.ca_cert, ca.keypair.public_l)
        assert multiply(x.k1_new, x.k1_new_inv) == identity(params.zeta1)
        assert multiply(x.k1_new_inv, x.k1_new) == identity(params.zeta1)


def test_expanded_inverse_middle_step(setup):
    params, ca, ee = setup
    resp = issue(ca, ee, 5)
    x = ee_expand(ee, resp, ca.ca_cert, ca.keypair.public_l)
    mh = derive_mh(resp.cert_bytes, ca.ca_cert, params.zeta1)
    m_r = permutation_pair(5, params.zeta1).m1
    assert x.k1_new == multiply(multiply(mh, m_r), ee.k1)


def test_reconstruct_matches_expand(setup):
    params, ca, ee = setup
    resp = issue(ca, ee, 3)
    x = ee_expand(ee, resp, ca.ca_cert, ca.keypair.public_l)
    q = reconstruct_public(resp.cert_bytes, ca.ca_cert, ca.keypair.public_l)
    assert q == x.public_q
    assert q.shape == (params.zeta1, params.zeta2)
    assert reconstruct_public(resp.cert, ca.ca_cert, ca.keypair.public_l) == q


def test_reconstruct_uses_public_inputs_only(setup):
    _, ca, ee = setup
    resp = issue(ca, ee, 4)
    expected = ee_expand(ee, resp, ca.ca_cert, ca.keypair.public_l).public_q
    public_inputs = (bytes(resp.cert_bytes), bytes(ca.ca_cert),
                     Gf2Matrix.from_bits(ca.keypair.public_l.to_bits()))
    for value in public_inputs:
        assert not hasattr(value, "k1_inv")
    assert reconstruct_public(*public_inputs) == expected


def test_expanded_sign_and_decrypt(setup):
    params, ca, ee = setup
    x = ee_expand(ee, issue(ca, ee, 8), ca.ca_cert, ca.keypair.public_l)
    rng = np.random.default_rng(0)
    prng = Prng(1)
    for _ in range(100):
        bits = rng.integers(0, 2, params.zeta1)
        m = column(bits)
        assert verify(expanded_sign(m, x), x.public_q) == m
        z = encrypt(row(bits), x.public_q, prng, params.t)
        assert expanded_decrypt(z, x) == row(bits)
    assert expanded_sign(Gf2Matrix.zeros(params.zeta1, 1), x).is_zero()


def test_distinct_issuances_give_distinct_b_and_q():
    # toy set only: at zeta1 = 4 just 4! = 24 distinct M_r exist
    ca = CaContext.create(keygen(TOY, 100))
    ee = keygen(TOY, 200)
    bs, qs = set(), set()
    for seed_r in range(100):
        resp = issue(ca, ee, seed_r)
        bs.add(resp.cert.reconstruction_b)
        qs.add(reconstruct_public(resp.cert_bytes, ca.ca_cert, ca.keypair.public_l))
    assert len(bs) == len(qs) == 100


def test_derive_mh():
    a, c = b"cert-e-bytes", b"cert-ca-bytes"
    assert derive_mh(a, c, 16) == derive_mh(a, c, 16)
    assert is_permutation(derive_mh(a, c, 16))
    rng = np.random.default_rng(9)
    changed = 0
    for _ in range(100):
        cert = bytes(rng.integers(0, 256, 64, dtype=np.uint8))
        i = int(rng.integers(64))
        flipped = cert[:i] + bytes([cert[i] ^ 0xFF]) + cert[i + 1:]
        changed += derive_mh(cert, c, 32) != derive_mh(flipped, c, 32)
    assert changed >= 99
    with pytest.raises(ValueError):
        derive_mh(b"", c, 8)


def test_derive_mh_seed_rule():
    a, c = b"A", b"C"
    h = hashlib.sha256(hashlib.sha256(a).digest() + hashlib.sha256(c).digest()).digest()
    assert derive_mh(a, c, 20) == permutation_pair(int.from_bytes(h[:8], "big"), 20).m1


def test_single_bit_tamper_rejected(setup):
    params, ca, ee = setup
    resp = issue(ca, ee, 12)
    b = resp.cert.reconstruction_b
    for i in range(b.rows):
        for j in range(b.cols):
            cert = dataclasses.replace(resp.cert, reconstruction_b=b.flip(i, j))
            bad = dataclasses.replace(resp, cert=cert)
            with pytest.raises(IssuerValidationError):
                ee_expand(ee, bad, ca.ca_cert, ca.keypair.public_l)


def test_wrong_seed_rejected(setup):
    _, ca, ee = setup
    resp = dataclasses.replace(issue(ca, ee, 12), seed_r=13)
    with pytest.raises(IssuerValidationError) as info:
        ee_expand(ee, resp, ca.ca_cert, ca.keypair.public_l)
    assert not isinstance(info.value, MalformedReconstructionValue)


def test_wrong_ca_rejected(setup):
    params, ca, ee = setup
    other = CaContext.create(keygen(params, 999))
    resp = issue(ca, ee, 1)
    with pytest.raises(IssuerValidationError):
        ee_expand(ee, resp, other.ca_cert, other.keypair.public_l)
    # same issuer digest, but the wrong public key
    with pytest.raises(IssuerValidationError):
        ee_expand(ee, resp, ca.ca_cert, other.keypair.public_l)


def test_b_for_someone_else_rejected(setup):
    params, ca, ee = setup
    other_ee = keygen(params, 201)
    resp = issue(ca, other_ee, 1)
    with pytest.raises(IssuerValidationError):
        ee_expand(ee, resp, ca.ca_cert, ca.keypair.public_l)


def test_dimension_mismatch_rejected():
    ca = CaContext.create(keygen(TOY, 1))
    with pytest.raises(ProtocolError):
        ca_issue(ca, IssuanceRequest(Gf2Matrix.zeros(12, 27), b""), 1)


def test_seed_reuse_not_detected():
    ca = CaContext.create(keygen(TOY, 1))
    ee = keygen(TOY, 2)
    assert issue(ca, ee, 7) == issue(ca, ee, 7)


def test_ca_cert_stable():
    key = keygen(TOY, 1)
    assert CaContext.create(key).ca_cert == CaContext.create(keygen(TOY, 1)).ca_cert
    root = certs.decode_cert(CaContext.create(key).ca_cert)
    assert root.cert_type == certs.CertType.ROOT
    assert root.reconstruction_b == key.public_l
