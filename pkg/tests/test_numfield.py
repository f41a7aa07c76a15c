import random
from fractions import Fraction

import pytest

from logclassgroup.caps import Caps
from logclassgroup.errors import CapsExceeded, InputError, UnsupportedConfiguration
from logclassgroup.numfield import (
    AlgebraicNum, build_field, compose_quadratics, decompose_prime,
    dedekind_maximal_at, element_divisor, ideal_mul, ideal_pow,
    ideal_valuation, parse_poly, principal_ideal, places_above_ell,
    rational_ideal, unit_ideal,
)
from logclassgroup.padic import PadicScalar


QI = build_field("x^2+1")
Q23 = build_field("x^2+23")
Q5 = build_field("x^2-5")
QQ = build_field("x")


class TestBuildField:
    def test_gaussian_integers(self):
        assert QI.disc == -4
        assert QI.basis_den == 1
        assert QI.index == 1
        assert QI.signature == (0, 1)
        # Dedekind at 2 confirms maximality of Z[i]
        assert dedekind_maximal_at([1, 0, 1], 2)

    def test_sqrt5_half_basis(self):
        assert Q5.disc == 5
        assert Q5.index == 2
        assert Q5.basis_den == 2
        # basis {1, (1+x)/2}
        assert Q5.basis_num[0] == (2, 0)
        assert Q5.basis_num[1] == (1, 1)
        assert Q5.signature == (2, 0)
        assert not dedekind_maximal_at([-5, 0, 1], 2)

    def test_sqrt_minus23(self):
        assert Q23.disc == -23
        assert Q23.index == 2
        assert Q23.basis_num[1] == (1, 1)

    def test_reducible_rejected(self):
        with pytest.raises(InputError):
            build_field("x^2-1")

    def test_nonmonic_rejected(self):
        with pytest.raises(InputError):
            build_field("2*x^2+1")

    def test_degree_cap(self):
        with pytest.raises(CapsExceeded):
            build_field("x^9+2", Caps(degree=8))

    def test_rationals_degree_one(self):
        assert QQ.n == 1 and QQ.disc == 1

    def test_parse_round_trip(self):
        assert parse_poly("x^2 + 23") == [23, 0, 1]
        assert parse_poly("x**3 - x - 1") == [-1, -1, 0, 1]


class TestArithmetic:
    def test_mul_div(self):
        i = QI.theta()
        x = QI.from_rational(2) + i          # 2 + i
        y = x * (QI.from_rational(2) - i)    # (2+i)(2-i) = 5
        assert y == QI.from_rational(5)
        assert (x / x) == QI.one()

    def test_norm_trace(self):
        i = QI.theta()
        x = QI.from_rational(2) + i
        assert x.norm() == 5
        assert x.trace() == 4
        w = Q5.from_basis_ints([0, 1])       # (1+sqrt5)/2
        assert w.norm() == -1
        assert w.trace() == 1

    def test_min_poly(self):
        w = Q5.from_basis_ints([0, 1])
        assert w.min_poly() == [Fraction(-1), Fraction(-1), Fraction(1)]

    def test_non_integral_norm(self):
        x = QI.theta().scale(Fraction(1, 2))
        assert x.norm() == Fraction(1, 4)


class TestDecomposition:
    def test_qi_split_five(self):
        ps = decompose_prime(QI, 5)
        assert len(ps) == 2
        assert all(P.e_ram == 1 and P.f_deg == 1 for P in ps)

    def test_qi_ramified_two(self):
        ps = decompose_prime(QI, 2)
        assert len(ps) == 1 and ps[0].e_ram == 2 and ps[0].f_deg == 1

    def test_qi_inert_three(self):
        ps = decompose_prime(QI, 3)
        assert len(ps) == 1 and ps[0].e_ram == 1 and ps[0].f_deg == 2

    def test_index_divisor_prime(self):
        # 2 divides the index of Z[sqrt 5]; decomposition still works
        ps = decompose_prime(Q5, 2)
        assert sum(P.e_ram * P.f_deg for P in ps) == 2
        assert len(ps) == 1 and ps[0].f_deg == 2  # 5 = 5 mod 8: inert

    def test_sum_ef_random(self):
        rng = random.Random(1)
        fields = [QI, Q23, Q5, build_field("x^2-2"), build_field("x^2+5")]
        for _ in range(40):
            K = rng.choice(fields)
            p = rng.choice([2, 3, 5, 7, 11, 13])
            ps = decompose_prime(K, p)
            assert sum(P.e_ram * P.f_deg for P in ps) == K.n
            norms = 1
            for P in ps:
                assert P.norm == p ** P.f_deg
                norms *= P.norm ** P.e_ram
            assert norms == p ** K.n


class TestIdeals:
    def test_product_of_conjugates_is_five(self):
        p1, p2 = decompose_prime(QI, 5)
        prod = ideal_mul(p1, p2)
        assert prod == rational_ideal(QI, 5)
        assert prod == principal_ideal(QI, QI.from_rational(5))

    def test_unit_identity(self):
        P = decompose_prime(QI, 5)[0]
        assert ideal_mul(P, unit_ideal(QI)).hnf == P.hnf

    def test_norm_above_two(self):
        P = decompose_prime(QI, 2)[0]
        assert P.norm == 2

    def test_hnf_canonical_two_routes(self):
        # same ideal built two ways compares bit-for-bit
        i = QI.theta()
        x = QI.from_rational(2) + i
        a = principal_ideal(QI, x)
        p5 = next(P for P in decompose_prime(QI, 5) if P.contains(x))
        assert a.hnf == p5.hnf

    def test_ideal_valuation(self):
        P = decompose_prime(QI, 2)[0]
        x = QI.from_rational(2)
        assert ideal_valuation(x, P) == 2  # (2) = P^2

    def test_norm_multiplicative(self):
        rng = random.Random(3)
        for _ in range(20):
            a = QI.from_basis_ints([rng.randint(-9, 9), rng.randint(-9, 9)])
            b = QI.from_basis_ints([rng.randint(-9, 9), rng.randint(-9, 9)])
            if a.is_zero or b.is_zero:
                continue
            A, B = principal_ideal(QI, a), principal_ideal(QI, b)
            assert ideal_mul(A, B).norm == A.norm * B.norm


class TestElementDivisor:
    def test_two_plus_i(self):
        d = element_divisor(QI.from_basis_ints([2, 1]))
        assert len(d) == 1
        (P, v), = d.items()
        assert P.p == 5 and v == 1

    def test_one_is_empty(self):
        assert element_divisor(QI.one()) == {}

    def test_six_over_q(self):
        d = element_divisor(QQ.from_rational(6))
        got = {P.p: v for P, v in d.items()}
        assert got == {2: 1, 3: 1}

    def test_fraction_divisor(self):
        d = element_divisor(QQ.from_rational(Fraction(4, 9)))
        got = {P.p: v for P, v in d.items()}
        assert got == {2: 2, 3: -2}

    def test_additive_under_mul(self):
        rng = random.Random(5)
        for _ in range(12):
            a = QI.from_basis_ints([rng.randint(-6, 6), rng.randint(-6, 6)])
            b = QI.from_basis_ints([rng.randint(-6, 6), rng.randint(-6, 6)])
            if a.is_zero or b.is_zero:
                continue
            da = element_divisor(a)
            db = element_divisor(b)
            dab = element_divisor(a * b)
            keys = set(da) | set(db) | set(dab)
            for k in keys:
                assert dab.get(k, 0) == da.get(k, 0) + db.get(k, 0)


class TestPlaces:
    def test_rationals(self):
        pls = places_above_ell(QQ, 3, 16)
        assert len(pls) == 1 and pls[0].kind == "rational"
        v = pls[0].local_norm(QQ.from_rational(Fraction(7, 3)), 12)
        assert v.eq_at_prec(PadicScalar.from_fraction(Fraction(7, 3), 3, 12), slack=0)

    def test_inert_global_norm(self):
        # x^2 - 2 is irreducible mod 3, so there is one inert place
        K = build_field("x^2-2")
        pls = places_above_ell(K, 3, 16)
        assert len(pls) == 1 and pls[0].kind == "global"
        x = K.from_basis_ints([1, 2])
        assert pls[0].local_norm(x, 12).eq_at_prec(
            PadicScalar.from_fraction(x.norm(), 3, 12), slack=2)

    def test_sqrt7_splits_at_three(self):
        # 7 = 1 mod 3 is a square mod 3: two split places (the textbook
        # configuration, despite appearances)
        K = build_field("x^2-7")
        pls = places_above_ell(K, 3, 16)
        assert len(pls) == 2
        for p in pls:
            root, _ = p.data
            assert (root * root - 7) % 3 ** 16 == 0

    def test_split_hensel(self):
        pls = places_above_ell(Q23, 3, 16)
        assert len(pls) == 2 and all(p.kind == "root" for p in pls)
        for p in pls:
            root, prec = p.data
            assert (root * root + 23) % 3 ** 16 == 0

    def test_local_norm_product_is_global(self):
        rng = random.Random(9)
        for K, ell in [(Q23, 3), (QI, 3), (QI, 5), (build_field("x^2-2"), 3), (build_field("x^2-7"), 3)]:
            pls = places_above_ell(K, ell, 24)
            for _ in range(8):
                x = K.from_basis_ints([rng.randint(-9, 9), rng.randint(-9, 9)])
                if x.is_zero:
                    continue
                prod = PadicScalar.one(ell, 20)
                for p in pls:
                    prod = prod * p.local_norm(x, 20)
                want = PadicScalar.from_fraction(x.norm(), ell, 20)
                assert prod.eq_at_prec(want, slack=4)

    def test_qi_five_splits(self):
        pls = places_above_ell(QI, 5, 12)
        assert len(pls) == 2

    def test_unsupported_has_no_wrong_answer(self):
        K = build_field("x^4+1")  # 2 is totally ramified: single place -> ok
        pls = places_above_ell(K, 2, 12)
        assert len(pls) == 1 and pls[0].local_degree == 4


class TestCompositum:
    def test_disc_and_places(self):
        L = compose_quadratics(-7, 2)
        assert L.disc == 3136  # 8 * (-7) * (-56)
        pls = places_above_ell(L, 2, 20)
        assert len(pls) == 2
        assert all(p.kind == "relative2" and p.local_degree == 2 for p in pls)

    def test_relative_norm_product(self):
        L = compose_quadratics(-7, 2)
        rng = random.Random(11)
        pls = places_above_ell(L, 2, 28)
        for _ in range(6):
            x = L.from_basis_ints([rng.randint(-5, 5) for _ in range(4)])
            if x.is_zero:
                continue
            prod = PadicScalar.one(2, 22)
            for p in pls:
                prod = prod * p.local_norm(x, 22)
            want = PadicScalar.from_fraction(x.norm(), 2, 22)
            assert prod.eq_at_prec(want, slack=4)

    def test_sqrt_elements(self):
        L = compose_quadratics(-7, 2)
        rel = L.relative_quadratic
        s = rel.sqrt_delta
        assert (s * s) == L.from_rational(2)
        emb = rel.embed(rel.sub.theta())
        assert (emb * emb) == L.from_rational(-7)
