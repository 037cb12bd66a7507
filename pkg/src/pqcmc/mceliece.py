"""
McEliece-style keys over a pluggable binary linear code.

Encryption works on row vectors (1 x zeta1 -> 1 x zeta2); signatures work on
column vectors (zeta1 x 1 -> zeta2 x 1).  Every routine also accepts a stack
of such vectors as a matrix, which is how the protocol layer signs and
decrypts whole matrices at once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .gf2 import (
    DimensionMismatch,
    Gf2Matrix,
    add,
    hstack,
    identity,
    multiply,
    transpose,
    vstack,
)
from .rand_gen import Prng, permutation_pair, random_invertible

ERRORLESS = "errorless-systematic"
HAMMING_7_4 = "hamming-7-4"
CODE_FAMILIES = (ERRORLESS, HAMMING_7_4)


class UncorrectableError(ValueError):
    """The syndrome shows more errors than the code can correct."""


@dataclass(frozen=True)
class ParameterSet:
    name: str
    zeta1: int
    zeta2: int
    code_family: str = ERRORLESS
    t: int = 0

    def __post_init__(self):
        if self.code_family not in CODE_FAMILIES:
            raise ValueError(f"unknown code family {self.code_family!r}")
        if not 1 <= self.zeta1 <= self.zeta2:
            raise ValueError(f"need 1 <= zeta1 <= zeta2, got ({self.zeta1}, {self.zeta2})")
        if self.code_family == ERRORLESS and self.t != 0:
            raise ValueError("errorless-systematic codes have t == 0")
        if self.code_family == HAMMING_7_4 and (self.zeta1, self.zeta2, self.t) != (4, 7, 1):
            raise ValueError("hamming-7-4 requires (zeta1, zeta2, t) == (4, 7, 1)")


# (zeta1, zeta2) pairs reported by `lengths --all`
SIZE_PRESETS = [
    (524, 1024),
    (1219, 1702),
    (1696, 2048),
    (1751, 2048),
    (2384, 3178),
    (3604, 4096),
    (5208, 6944),
]

PRESETS: dict[str, ParameterSet] = {
    f"mceliece-{z1}-{z2}": ParameterSet(f"mceliece-{z1}-{z2}", z1, z2) for z1, z2 in SIZE_PRESETS
}
PRESETS["toy-12-28"] = ParameterSet("toy-12-28", 12, 28)
PRESETS[HAMMING_7_4] = ParameterSet(HAMMING_7_4, 4, 7, HAMMING_7_4, 1)


def get_params(name: str) -> ParameterSet:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown parameter set {name!r}; choose from {', '.join(PRESETS)}"
        ) from None


@dataclass(frozen=True)
class DecodeResult:
    messages: Gf2Matrix
    corrected: np.ndarray     # per-row weight of the applied correction
    syndromes: Gf2Matrix | None

    @property
    def flagged(self) -> bool:
        return bool(self.corrected.any())


class LinearCode:
    """Generator K2, decoder K4 with K2 K4 = I, parity check K5.

    Decoding corrects any error pattern of weight <= t by coset-leader
    lookup on the syndrome.
    """

    def __init__(self, generator: Gf2Matrix, decoder: Gf2Matrix,
                 parity_check: Gf2Matrix | None, t: int):
        self.generator = generator
        self.decoder = decoder
        self.parity_check = parity_check
        self.t = t
        self._leaders: dict[bytes, np.ndarray] = {}
        if parity_check is not None:
            n = generator.cols
            h_cols = transpose(parity_check)
            for w in range(1, t + 1):
                for pos in itertools.combinations(range(n), w):
                    e = np.zeros(n, np.uint8)
                    e[list(pos)] = 1
                    syn = multiply(Gf2Matrix.from_bits(e[None, :]), h_cols)
                    self._leaders.setdefault(syn.packed.tobytes(), e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearCode):
            return NotImplemented
        return (self.generator, self.decoder, self.parity_check, self.t) == (
            other.generator, other.decoder, other.parity_check, other.t)

    __hash__ = None

    @property
    def k(self) -> int:
        return self.generator.rows

    @property
    def n(self) -> int:
        return self.generator.cols

    def syndromes(self, words: Gf2Matrix) -> Gf2Matrix | None:
        if self.parity_check is None:
            return None
        return multiply(words, transpose(self.parity_check))

    def decode(self, words: Gf2Matrix) -> DecodeResult:
        """Map each row (a noisy codeword) to its message row."""
        if words.cols != self.n:
            raise DimensionMismatch(f"codeword width {words.cols} != code length {self.n}")
        syn = self.syndromes(words)
        corrected = np.zeros(words.rows, np.int64)
        if syn is not None and not syn.is_zero():
            bits = words.to_bits()
            for i in np.flatnonzero(syn.packed.any(axis=1)):
                leader = self._leaders.get(syn.packed[i].tobytes())
                if leader is None:
                    raise UncorrectableError(
                        f"row {i}: syndrome has no coset leader of weight <= {self.t}"
                    )
                bits[i] ^= leader
                corrected[i] = int(leader.sum())
            words = Gf2Matrix.from_bits(bits)
        return DecodeResult(multiply(words, self.decoder), corrected, syn)


def errorless_code(zeta1: int, zeta2: int, prng: Prng) -> LinearCode:
    """Systematic code [I | R] with no error correction.

    R is resampled until it has no zero row and no zero column, so every
    coordinate takes part in a parity check and single-bit changes are
    always visible in the syndrome.
    """
    r = zeta2 - zeta1
    eye = identity(zeta1)
    decoder = vstack([eye, Gf2Matrix.zeros(r, zeta1)]) if r else eye
    if r == 0:
        return LinearCode(eye, decoder, None, 0)
    while True:
        bits = prng.bits(zeta1 * r).reshape(zeta1, r)
        if bits.any(axis=1).all() and bits.any(axis=0).all():
            break
    parity = Gf2Matrix.from_bits(bits)
    generator = hstack([eye, parity])
    check = hstack([transpose(parity), identity(r)])
    return LinearCode(generator, decoder, check, 0)


def hamming_code() -> LinearCode:
    p = Gf2Matrix.from_rows([[1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]])
    generator = hstack([identity(4), p])
    decoder = vstack([identity(4), Gf2Matrix.zeros(3, 4)])
    check = hstack([transpose(p), identity(3)])
    return LinearCode(generator, decoder, check, 1)


@dataclass(frozen=True)
class McElieceKeyPair:
    params: ParameterSet
    k1: Gf2Matrix
    k1_inv: Gf2Matrix
    code: LinearCode
    k3: Gf2Matrix
    k3_inv: Gf2Matrix
    public_l: Gf2Matrix

    @property
    def k2(self) -> Gf2Matrix:
        return self.code.generator

    @property
    def k4(self) -> Gf2Matrix:
        return self.code.decoder

    @property
    def k5(self) -> Gf2Matrix | None:
        return self.code.parity_check


def keygen(params: ParameterSet, seed: int) -> McElieceKeyPair:
    prng = Prng(seed)
    k1, k1_inv = random_invertible(prng.next_u64(), params.zeta1)
    pair = permutation_pair(prng.next_u64(), params.zeta2)
    if params.code_family == HAMMING_7_4:
        code = hamming_code()
    else:
        code = errorless_code(params.zeta1, params.zeta2, prng)
    public_l = multiply(multiply(k1, code.generator), pair.m1)
    return McElieceKeyPair(params, k1, k1_inv, code, pair.m1, pair.m2, public_l)


def error_rows(rows: int, n: int, t: int, prng: Prng) -> Gf2Matrix:
    """Error vectors of Hamming weight exactly t, one per row."""
    bits = np.zeros((rows, n), np.uint8)
    for i in range(rows):
        # partial Fisher-Yates: t distinct positions
        pos = list(range(n))
        for k in range(t):
            j = k + prng.below(n - k)
            pos[k], pos[j] = pos[j], pos[k]
        bits[i, pos[:t]] = 1
    return Gf2Matrix.from_bits(bits)


def encrypt(m: Gf2Matrix, public_l: Gf2Matrix, prng: Prng, t: int = 0) -> Gf2Matrix:
    """z = m L + e, e of weight exactly t per row."""
    if m.cols != public_l.rows:
        raise DimensionMismatch(
            f"message {m.rows}x{m.cols} does not fit public key {public_l.rows}x{public_l.cols}"
        )
    z = multiply(m, public_l)
    if t:
        z = add(z, error_rows(m.rows, public_l.cols, t, prng))
    return z


def decrypt_report(z: Gf2Matrix, k1_inv: Gf2Matrix, code: LinearCode,
                   k3_inv: Gf2Matrix) -> DecodeResult:
    """Undo the permutation, decode, then unscramble; report corrections."""
    if z.cols != k3_inv.rows:
        raise DimensionMismatch(f"ciphertext width {z.cols} != {k3_inv.rows}")
    decoded = code.decode(multiply(z, k3_inv))
    return DecodeResult(multiply(decoded.messages, k1_inv), decoded.corrected,
                        decoded.syndromes)


def decrypt(z: Gf2Matrix, key: McElieceKeyPair) -> Gf2Matrix:
    return decrypt_report(z, key.k1_inv, key.code, key.k3_inv).messages


def sign_with(m: Gf2Matrix, k1_inv: Gf2Matrix, k4: Gf2Matrix, k3_inv: Gf2Matrix) -> Gf2Matrix:
    if m.rows != k1_inv.cols:
        raise DimensionMismatch(f"message height {m.rows} != {k1_inv.cols}")
    return multiply(k3_inv, multiply(k4, multiply(k1_inv, m)))


def sign(m: Gf2Matrix, key: McElieceKeyPair) -> Gf2Matrix:
    """s = K3^-1 K4 K1^-1 m.  Deterministic."""
    return sign_with(m, key.k1_inv, key.k4, key.k3_inv)


def verify(s: Gf2Matrix, public_l: Gf2Matrix) -> Gf2Matrix:
    """Recover the signed message L s; the caller compares it."""
    if s.rows != public_l.cols:
        raise DimensionMismatch(f"signature height {s.rows} != {public_l.cols}")
    return multiply(public_l, s)


def hash_to_message(digest: bytes, zeta1: int) -> Gf2Matrix:
    """First zeta1 bits of `digest`, MSB first, zero-padded, as a column."""
    if not digest:
        raise ValueError("digest must be nonempty")
    bits = np.unpackbits(np.frombuffer(digest, np.uint8))[:zeta1]
    col = np.zeros((zeta1, 1), np.uint8)
    col[: len(bits), 0] = bits
    return Gf2Matrix.from_bits(col)


def column(bits) -> Gf2Matrix:
    return Gf2Matrix.from_bits(np.asarray(bits, dtype=np.uint8).reshape(-1, 1))


def row(bits) -> Gf2Matrix:
    return Gf2Matrix.from_bits(np.asarray(bits, dtype=np.uint8).reshape(1, -1))
