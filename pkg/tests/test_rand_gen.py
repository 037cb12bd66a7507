import ctypes

import numpy as np
import pytest

from pqcmc.gf2 import identity, is_permutation, multiply, rank, transpose
from pqcmc.rand_gen import (
    BenchReport,
    Prng,
    baseline_random_invertible,
    bench_matrix_gen,
    naive_rank,
    permutation_indices,
    permutation_pair,
    random_invertible,
)

from conftest import random_matrix

# Published splitmix64 outputs for seed 0 (Vigna's reference C code).
SPLITMIX_SEED0 = [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def reference_splitmix64(seed, count):
    """Independent re-statement using C unsigned 64-bit wraparound."""
    x = ctypes.c_uint64(seed)
    out = []
    for _ in range(count):
        x = ctypes.c_uint64(x.value + 0x9E3779B97F4A7C15)
        z = ctypes.c_uint64((x.value ^ (x.value >> 30)) * 0xBF58476D1CE4E5B9)
        z = ctypes.c_uint64((z.value ^ (z.value >> 27)) * 0x94D049BB133111EB)
        out.append(z.value ^ (z.value >> 31))
    return out


def test_seed0_reference_stream():
    p = Prng(0)
    assert [p.next_u64() for _ in range(3)] == SPLITMIX_SEED0
    assert reference_splitmix64(0, 3) == SPLITMIX_SEED0


@pytest.mark.parametrize("seed", [0, 1, 42, 2**64 - 1, 0xDEADBEEF])
def test_matches_reference(seed):
    p = Prng(seed)
    assert [p.next_u64() for _ in range(50)] == reference_splitmix64(seed, 50)


def test_determinism():
    a, b = Prng(123), Prng(123)
    assert [a.next_u64() for _ in range(1000)] == [b.next_u64() for _ in range(1000)]


def test_seeds_differ_on_first_draw():
    assert Prng(0).next_u64() != Prng(1).next_u64()


def test_fill_matches_sequential():
    a, b = Prng(99), Prng(99)
    a.next_u64()
    b.next_u64()
    assert [int(x) for x in a.fill(17)] == [b.next_u64() for _ in range(17)]
    assert a.next_u64() == b.next_u64()
    assert a.draws == b.draws == 19


def test_bits_msb_first():
    word = Prng(5).next_u64()
    bits = Prng(5).bits(64)
    assert int("".join(map(str, bits)), 2) == word


def test_permutation_pair_size_one():
    for r in (0, 1, 77):
        pair = permutation_pair(r, 1)
        assert pair.m1.tolist() == [[1]] and pair.m2.tolist() == [[1]]


def test_permutation_pair_deterministic():
    assert permutation_pair(31337, 40) == permutation_pair(31337, 40)


def test_permutation_pair_matrices_follow_indices():
    pair = permutation_pair(5, 9)
    for i, v in enumerate(pair.indices):
        assert pair.m1[i, v] == 1 and pair.m2[v, i] == 1
    assert pair.m1 is pair.m1
    assert len({pair, permutation_pair(5, 9), permutation_pair(6, 9)}) == 2


def test_permutation_pair_product_identity():
    for seed in range(100):
        pair = permutation_pair(seed, 8)
        assert multiply(pair.m1, pair.m2) == identity(8)


def test_permutation_pair_properties():
    for n in range(1, 65):
        for seed in range(20):
            pair = permutation_pair(seed, n)
            assert is_permutation(pair.m1) and is_permutation(pair.m2)
            assert pair.m2 == transpose(pair.m1)
            assert multiply(pair.m1, pair.m2) == identity(n)


def test_permutation_indices_follow_swap_loop():
    # hand-run of the loop against the raw stream
    draws = reference_splitmix64(7, 5)
    idx = list(range(5))
    for i, d in enumerate(draws):
        j = d % 5
        idx[i], idx[j] = idx[j], idx[i]
    assert permutation_indices(Prng(7), 5) == idx
    m1 = permutation_pair(7, 5).m1
    assert all(m1[i, idx[i]] == 1 for i in range(5))


def test_draw_count_is_size():
    for n in range(1, 65):
        p = Prng(n)
        permutation_indices(p, n)
        assert p.draws == n


def test_permutation_size_zero():
    with pytest.raises(ValueError):
        permutation_pair(0, 0)


def test_random_invertible():
    m, mi = random_invertible(0, 1)
    assert m.tolist() == [[1]] and mi.tolist() == [[1]]
    for seed in range(10):
        m, mi = random_invertible(seed, 32)
        assert multiply(m, mi) == identity(32)
        assert multiply(mi, m) == identity(32)
    assert random_invertible(5, 20) == random_invertible(5, 20)


def test_random_invertible_block_path():
    # sizes above the recursion cutoff, odd and even
    for n in (65, 130, 200):
        m, mi = random_invertible(n, n)
        assert multiply(m, mi) == identity(n)


def test_random_invertible_is_dense():
    m, _ = random_invertible(3, 64)
    assert not is_permutation(m)
    assert m.weight() > 64 * 4


def test_naive_rank_matches_library(rng):
    for _ in range(50):
        a = random_matrix(rng, int(rng.integers(1, 15)), int(rng.integers(1, 15)))
        assert naive_rank(a.tolist()) == rank(a)


def test_baseline():
    assert baseline_random_invertible(0, 1).tolist() == [[1]]
    for seed in range(5):
        m = baseline_random_invertible(seed, 24)
        assert rank(m) == 24
    assert baseline_random_invertible(9, 16) == baseline_random_invertible(9, 16)


def test_bench_report_shapes():
    assert bench_matrix_gen([], 3).rows == []
    rep = bench_matrix_gen([8, 16], 3)
    assert [(r.method, r.n) for r in rep.rows] == [
        ("alg1", 8), ("alg1", 16), ("baseline", 8), ("baseline", 16)
    ]
    assert rep.rows[0].ratio is None and rep.rows[1].ratio is not None
    kv = rep.to_kv().splitlines()
    assert kv[1].startswith("method=alg1 n=16 median_ns=")
    assert "median_ms" in rep.to_text()
    with pytest.raises(ValueError):
        bench_matrix_gen([8], 2)


def test_empty_report_renders():
    assert BenchReport().to_kv() == ""
