import random

import pytest
from hypothesis import given, settings, strategies as st

from logclassgroup.zlmod import (
    ZlMatrix, smith_normal_form, decomposition_from_snf, solve_linear,
    kernel_generators, quotient_presentation, invert_unimodular,
    generator_vectors,
)

from oracles import minors_divisor_valuations


def snf_exponents(entries, ell, N):
    A = ZlMatrix(ell, N, entries)
    D, U, V = smith_normal_form(A)
    return decomposition_from_snf(D, U, V), (D, U, V, A)


def check_contract(entries, ell, N):
    """Full SNF contract: U A V = D, unit transforms, chain, minors oracle."""
    A = ZlMatrix(ell, N, entries)
    D, U, V = smith_normal_form(A)
    assert U.mul(A).mul(V).a == D.a
    assert U.det_unit() and V.det_unit()
    k = min(A.rows, A.cols)
    vals = [N if D.a[i][i] == 0 else min_val(D.a[i][i], ell, N) for i in range(k)]
    assert vals == sorted(vals)
    for i in range(k):
        d = D.a[i][i]
        assert d == 0 or d == ell ** min_val(d, ell, N)
    # gcd-of-minors cross-check (products of divisors, capped at N)
    oracle = minors_divisor_valuations(A.a, ell, N)
    acc = 0
    for i in range(k):
        acc += vals[i]
        assert min(acc, N) == oracle[i]
    # idempotence
    D2, _, _ = smith_normal_form(D)
    assert D2.a == D.a
    return D, U, V


def min_val(x, ell, N):
    v = 0
    while x % ell == 0 and v < N:
        x //= ell
        v += 1
    return v


class TestSNF:
    def test_diag_ell_one(self):
        dec, _ = snf_exponents([[3, 0], [0, 1]], 3, 8)
        assert dec.free_rank == 0 and dec.torsion_exponents == [1]
        assert dec.diag_exponents == [0, 1]

    def test_zero_matrix(self):
        dec, _ = snf_exponents([[0, 0, 0], [0, 0, 0]], 3, 8)
        assert dec.free_rank == 2 and dec.torsion_exponents == []

    def test_worked_example_minors(self):
        # [[3,6],[9,12]] over Z/3^5: d1 = 3, d1 d2 = v(det -18) = 3^2
        dec, _ = snf_exponents([[3, 6], [9, 12]], 3, 5)
        assert dec.torsion_exponents == [1, 1]
        assert minors_divisor_valuations([[3, 6], [9, 12]], 3, 5) == [1, 2]

    def test_contract_random(self):
        rng = random.Random(7)
        for _ in range(150):
            ell = rng.choice([2, 3])
            N = rng.choice([6, 16])
            r = rng.randint(1, 5)
            c = rng.randint(1, 5)
            mod = ell ** N
            entries = [[rng.randrange(mod) if rng.random() < 0.8 else
                        rng.randrange(mod) * ell ** rng.randint(0, N) % mod
                        for _ in range(c)] for _ in range(r)]
            check_contract(entries, ell, N)

    def test_precision_stability(self):
        # torsion divisors <= N-8 unchanged at N+8
        rng = random.Random(3)
        for _ in range(40):
            ell, N = 3, 16
            entries = [[rng.randrange(ell ** 6) * ell ** rng.randint(0, 3)
                        for _ in range(3)] for _ in range(3)]
            lo, _ = snf_exponents(entries, ell, N)
            hi, _ = snf_exponents(entries, ell, N + 8)
            lo_t = [e for e in lo.torsion_exponents if e <= N - 8]
            hi_t = [e for e in hi.torsion_exponents if e <= N - 8]
            assert lo_t == hi_t


class TestSolve:
    def test_identity(self):
        A = ZlMatrix.identity(3, 6, 4)
        b = [5, 7, 0, 3 ** 5]
        assert solve_linear(A, b) == [x % 3 ** 6 for x in b]

    def test_valuation_obstruction(self):
        A = ZlMatrix(3, 3, [[3]])
        assert solve_linear(A, [1]) is None

    def test_random_consistent_systems(self):
        rng = random.Random(11)
        for _ in range(60):
            ell, N = 3, 8
            mod = ell ** N
            A = ZlMatrix(ell, N, [[rng.randrange(mod) for _ in range(3)]
                                  for _ in range(3)])
            x0 = [rng.randrange(mod) for _ in range(3)]
            b = A.mul_vec(x0)
            x = solve_linear(A, b)
            assert x is not None
            assert A.mul_vec(x) == b

    def test_solvability_iff_divisible(self):
        # A x = b solvable iff transformed rhs divisible by the diagonal
        A = ZlMatrix(2, 10, [[4, 0], [0, 8]])
        assert solve_linear(A, [4, 16]) is not None
        assert solve_linear(A, [2, 8]) is None

    def test_kernel_generators(self):
        A = ZlMatrix(3, 5, [[3, 6], [9, 12]])
        for g in kernel_generators(A):
            assert A.mul_vec(g) == [0, 0]
        assert kernel_generators(A)  # 3-torsion kernel exists


class TestQuotient:
    def test_free_rank_one(self):
        dec, _ = quotient_presentation(1, [], 3, 8)
        assert dec.free_rank == 1 and not dec.torsion_exponents

    def test_rank_one_plus_z3(self):
        dec, _ = quotient_presentation(2, [[3, 0]], 3, 8)
        assert dec.free_rank == 1 and dec.torsion_exponents == [1]

    def test_z3_plus_z9_roundtrip(self):
        # relations for Z/3 + Z/9 + (trivial): diag(3, 9, 1), scrambled by
        # unimodular row/col mixes
        cols = [[3, 0, 0], [0, 9, 0], [0, 0, 1]]
        mixed = [[c[0] + 3 ** 2 * c[1], c[1] + c[2], c[2] + c[0]] for c in cols]
        dec, _ = quotient_presentation(3, mixed, 3, 6)
        assert dec.torsion_exponents == [1, 2]
        assert dec.free_rank == 0

    def test_generator_vectors_map_to_summands(self):
        cols = [[3, 0], [0, 9]]
        dec, A = quotient_presentation(2, cols, 3, 6)
        gv = generator_vectors(dec)
        # each generator vector reduces to a generator of its cyclic factor:
        # U * gv_i = e_i
        for i, g in enumerate(gv):
            img = dec.U.mul_vec(g)
            want = [1 if j == i else 0 for j in range(len(img))]
            assert img == want


class TestInverse:
    def test_invert_unimodular(self):
        M = ZlMatrix(3, 8, [[1, 4], [2, 3 ** 7 + 1]])
        Minv = invert_unimodular(M)
        assert M.mul(Minv).a == ZlMatrix.identity(3, 8, 2).a

    def test_json_round_trip(self):
        M = ZlMatrix(3, 8, [[1, 4], [2, 9]])
        assert ZlMatrix.from_json(M.to_json()) == M
