"""
Seeded randomness: splitmix64, the swap-shuffle permutation pair used for
M_r and M_h, dense invertible scramblers, and the rejection-sampling
baseline used in the generation benchmark.
"""

from __future__ import annotations

import gc
import statistics
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gf2 import Gf2Matrix, invert, multiply

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


class Prng:
    """splitmix64.  Not thread-safe; one owner at a time.

    ``draws`` counts every 64-bit output produced, including those from
    :meth:`fill`.
    """

    __slots__ = ("state", "draws")

    def __init__(self, seed: int):
        self.state = seed & MASK64
        self.draws = 0

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        self.draws += 1
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """next_u64() mod bound; modulo bias is accepted."""
        return self.next_u64() % bound

    def fill(self, count: int) -> np.ndarray:
        """The next `count` outputs as a uint64 array, same stream as next_u64."""
        steps = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * np.uint64(GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * GAMMA) & MASK64
        self.draws += count
        return z

    def bits(self, count: int) -> np.ndarray:
        """`count` pseudo-random bits, 64 per output word, MSB first."""
        words = self.fill((count + 63) // 64)
        return np.unpackbits(words.astype(">u8").view(np.uint8))[:count]


class PermutationPair:
    """M1 with M1[i][I[i]] = 1 and its inverse M2 = M1^T.

    Holds the index vector I; the dense matrices are materialized on first
    access, so generating a pair costs O(size) and only callers that need
    the matrices pay for the size^2 / 8 octets of storage.
    """

    __slots__ = ("indices", "_m1", "_m2")

    def __init__(self, indices: Sequence[int]):
        self.indices = tuple(indices)
        self._m1 = self._m2 = None

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def m1(self) -> Gf2Matrix:
        if self._m1 is None:
            self._m1 = Gf2Matrix.from_permutation(self.indices)
        return self._m1

    @property
    def m2(self) -> Gf2Matrix:
        if self._m2 is None:
            inv = np.empty(self.size, np.int64)
            inv[np.asarray(self.indices)] = np.arange(self.size)
            self._m2 = Gf2Matrix.from_permutation(inv)
        return self._m2

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermutationPair):
            return NotImplemented
        return self.indices == other.indices

    def __hash__(self) -> int:
        return hash(self.indices)

    def __repr__(self) -> str:
        return f"PermutationPair(size={self.size})"


def permutation_indices(prng: Prng, size: int) -> list[int]:
    """The shuffled index vector I: one draw and one swap per position."""
    if size < 1:
        raise ValueError(f"permutation size must be >= 1, got {size}")
    idx = list(range(size))
    for i in range(size):
        j = prng.next_u64() % size
        idx[i], idx[j] = idx[j], idx[i]
    return idx


def permutation_pair(r: int, size: int) -> PermutationPair:
    """Seeded permutation pair; M2[I[i]][i] = 1 makes M2 the inverse of M1."""
    return PermutationPair(permutation_indices(Prng(r), size))


def _unit_upper_inverse(u: np.ndarray) -> np.ndarray:
    """Inverse of a unit upper-triangular 0/1 matrix by 2x2 block recursion."""
    n = u.shape[0]
    if n <= 64:
        return invert(Gf2Matrix.from_bits(u)).to_bits()
    h = n // 2
    a_inv = _unit_upper_inverse(u[:h, :h])
    d_inv = _unit_upper_inverse(u[h:, h:])
    # [[A, B], [0, D]]^-1 = [[A^-1, A^-1 B D^-1], [0, D^-1]]
    top = multiply(
        multiply(Gf2Matrix.from_bits(a_inv), Gf2Matrix.from_bits(u[:h, h:])),
        Gf2Matrix.from_bits(d_inv),
    ).to_bits()
    out = np.zeros_like(u)
    out[:h, :h] = a_inv
    out[:h, h:] = top
    out[h:, h:] = d_inv
    return out


def random_invertible(seed: int, n: int) -> tuple[Gf2Matrix, Gf2Matrix]:
    """A dense random invertible matrix M = U W P and its inverse.

    U is unit upper-triangular, W unit lower-triangular, P a permutation;
    the inverse is assembled as P^T W^-1 U^-1.
    """
    if n < 1:
        raise ValueError(f"matrix size must be >= 1, got {n}")
    prng = Prng(seed)
    eye = np.eye(n, dtype=np.uint8)
    u = np.triu(prng.bits(n * n).reshape(n, n), 1) | eye
    w = np.tril(prng.bits(n * n).reshape(n, n), -1) | eye
    pair = permutation_pair(prng.next_u64(), n)

    u_inv = _unit_upper_inverse(u)
    w_inv = _unit_upper_inverse(np.ascontiguousarray(w.T)).T

    U, W = Gf2Matrix.from_bits(u), Gf2Matrix.from_bits(w)
    m = multiply(multiply(U, W), pair.m1)
    m_inv = multiply(
        multiply(pair.m2, Gf2Matrix.from_bits(w_inv)), Gf2Matrix.from_bits(u_inv)
    )
    return m, m_inv


def naive_rank(rows: list[list[int]]) -> int:
    """Textbook O(n^3) elimination on lists of bits."""
    rows = [list(r) for r in rows]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    r = 0
    for c in range(n_cols):
        p = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pivot = rows[r]
        for i in range(r + 1, n_rows):
            if rows[i][c]:
                rows[i] = [x ^ y for x, y in zip(rows[i], pivot)]
        r += 1
    return r


def baseline_random_invertible(seed: int, n: int) -> Gf2Matrix:
    """Rejection-sample uniform n x n matrices until one has full rank."""
    if n < 1:
        raise ValueError(f"matrix size must be >= 1, got {n}")
    prng = Prng(seed)
    while True:
        bits = prng.bits(n * n).reshape(n, n)
        if naive_rank(bits.tolist()) == n:
            return Gf2Matrix.from_bits(bits)


@dataclass
class BenchRow:
    method: str
    n: int
    median_ns: int
    ratio: float | None = None


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def ratios(self, method: str) -> list[float]:
        return [r.ratio for r in self.rows if r.method == method and r.ratio is not None]

    def to_text(self) -> str:
        lines = [f"{'method':<12} {'n':>6} {'median_ms':>12} {'t(n)/t(n/2)':>12}"]
        for r in self.rows:
            ratio = "-" if r.ratio is None else f"{r.ratio:.2f}"
            lines.append(
                f"{r.method:<12} {r.n:>6} {r.median_ns / 1e6:>12.3f} {ratio:>12}"
            )
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        out = []
        for r in self.rows:
            ratio = "" if r.ratio is None else f"{r.ratio:.4f}"
            out.append(f"method={r.method} n={r.n} median_ns={r.median_ns} ratio={ratio}")
        return "\n".join(out) + ("\n" if out else "")


METHODS = {
    "alg1": lambda seed, n: permutation_pair(seed, n),
    "baseline": baseline_random_invertible,
}


def bench_matrix_gen(
    sizes: list[int], trials: int, methods: tuple[str, ...] = ("alg1", "baseline")
) -> BenchReport:
    """Median wall-clock generation time per method and size.

    The ratio column is t(n) / t(previous n) and is meaningful when sizes
    double.  Trial k uses seed k, so methods see identical seeds.  As with
    timeit, each size gets one untimed warm-up call and the garbage
    collector is paused while timing.
    """
    if trials < 3:
        raise ValueError(f"need at least 3 trials, got {trials}")
    report = BenchReport()
    for method in methods:
        fn = METHODS[method]
        for n in sizes:
            fn(trials, n)
        # sizes are interleaved within each round so that slow drift or a
        # burst of background load is shared by every size
        times: dict[int, list[int]] = {n: [] for n in sizes}
        gc_was_enabled = gc.isenabled()
        gc.disable()
        try:
            for seed in range(trials):
                for n in sizes:
                    t0 = time.perf_counter_ns()
                    fn(seed, n)
                    times[n].append(time.perf_counter_ns() - t0)
        finally:
            if gc_was_enabled:
                gc.enable()
        prev = None
        for n in sizes:
            med = int(statistics.median(times[n]))
            ratio = None if prev is None else med / prev
            report.rows.append(BenchRow(method, n, med, ratio))
            prev = med
    return report
