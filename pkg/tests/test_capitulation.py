import pytest

from logclassgroup.capitulation import (
    build_extension, capitulation_kernel, is_log_unramified,
)
from logclassgroup.logclass import as_word, log_divisor, log_class_group
from logclassgroup.numfield import (
    build_field, compose_quadratics, decompose_prime,
)
from logclassgroup.padic import PadicScalar


QQ = build_field("x")
QI = build_field("x^2+1")


class TestBuildExtension:
    def test_rational_base(self):
        E = build_extension(QQ, QI, 3, 20)
        assert E.rel_degree == 2
        assert E.embed(QQ.from_rational(7)) == QI.from_rational(7)

    def test_identity_extension(self):
        E = build_extension(QI, QI, 3, 20)
        assert E.rel_degree == 1
        one = PadicScalar.one(3, 20)
        for p in (2, 3, 5):
            for P in decompose_prime(QI, p):
                assert E.e_tilde(P).eq_at_prec(one)
                assert E.f_tilde(P).eq_at_prec(one)

    def test_quadratic_over_quadratic_embedding(self):
        L = compose_quadratics(-1, 3)   # Q(i, sqrt 3) = Q(zeta_12)
        E = build_extension(QI, L, 3, 20)
        img = E.embed_theta
        assert (img * img + L.one()).is_zero

    def test_degree_mismatch(self):
        from logclassgroup.errors import InputError
        K3 = build_field("x^3-x-1")
        with pytest.raises(InputError):
            build_extension(K3, QI, 3, 16)


class TestRamification:
    def test_split_five_unramified(self):
        E = build_extension(QQ, QI, 3, 20)
        one = PadicScalar.one(3, 20)
        for P in decompose_prime(QI, 5):
            assert E.e_tilde(P).eq_at_prec(one)

    def test_sqrt3_at_three_ell_adically_invisible(self):
        # Q(sqrt 3)/Q is ramified at 3 in the ordinary sense, but the
        # completion has prime-to-3 degree, so e~ = 1: the pro-3 theory
        # does not see it
        K3 = build_field("x^2-3")
        E = build_extension(QQ, K3, 3, 20)
        P3 = decompose_prime(K3, 3)[0]
        assert E.e_tilde(P3).eq_at_prec(PadicScalar.one(3, 20))
        # ... while the tame ramification at 2 does register: e~ = 2
        P2 = decompose_prime(K3, 2)[0]
        assert E.e_tilde(P2).eq_at_prec(PadicScalar.from_int(2, 3, 20))
        rep = is_log_unramified(E)
        assert not rep.unramified

    def test_identity_unramified(self):
        E = build_extension(QI, QI, 3, 16)
        assert is_log_unramified(E).unramified

    def test_k_sqrt2_log_unramified_ell2(self):
        # the first layer of the cyclotomic Z_2-extension: always
        # logarithmically unramified
        K = build_field("x^2+31")
        L = compose_quadratics(-31, 2)
        E = build_extension(K, L, 2, 24)
        rep = is_log_unramified(E)
        assert rep.unramified
        assert "unchecked" in rep.real_places_note or \
            rep.real_places_note == "not applicable"

    def test_sum_e_f_equals_degree(self):
        pairs = [(QQ, QI, 3), (QQ, build_field("x^2-2"), 3),
                 (QI, compose_quadratics(-1, 3), 3),
                 (build_field("x^2+31"), compose_quadratics(-31, 2), 2),
                 (QQ, build_field("x^2+23"), 3)]
        for K, L, ell in pairs:
            E = build_extension(K, L, ell, 20)
            n = E.rel_degree
            for p in (2, 3, 5, 7):
                for q in decompose_prime(K, p):
                    acc = PadicScalar.zero(ell, 14)
                    for P in E.places_above(q):
                        acc = acc + E.e_tilde(P) * E.f_tilde(P)
                    assert acc.eq_at_prec(PadicScalar.from_int(n, ell, 14)), \
                        (K.label, L.label, ell, p)


class TestFunctoriality:
    def test_j_divisor_of_two(self):
        E = build_extension(QQ, QI, 3, 24)
        d = log_divisor(as_word(QQ.from_rational(2)), E.base_ctx)
        jd = E.extend_divisor(d)
        dL = log_divisor(as_word(QI.from_rational(2)), E.ext_ctx)
        keys = set(jd.coeffs) | set(dL.coeffs)
        for k in keys:
            a = jd.coeffs.get(k)
            b = dL.coeffs.get(k)
            av = a[1] if a else PadicScalar.zero(3, 16)
            bv = b[1] if b else PadicScalar.zero(3, 16)
            assert av.eq_at_prec(bv, slack=4), (k, av.render(), bv.render())

    def test_degree_scaling(self):
        E = build_extension(QQ, QI, 3, 24)
        for n in (2, 7, 10):
            d = log_divisor(as_word(QQ.from_rational(n)), E.base_ctx)
            jd = E.extend_divisor(d)
            lhs = jd.degree()
            rhs = d.degree() * PadicScalar.from_int(E.rel_degree, 3, 24)
            assert lhs.eq_at_prec(rhs, slack=6)

    def test_functoriality_random_elements(self):
        import random
        rng = random.Random(23)
        K = build_field("x^2+31")
        L = compose_quadratics(-31, 2)
        E = build_extension(K, L, 2, 24)
        for _ in range(5):
            vec = [rng.randint(-5, 5), rng.randint(-5, 5)]
            if not any(vec):
                continue
            x = K.from_basis_ints(vec)
            d = log_divisor(as_word(x), E.base_ctx)
            jd = E.extend_divisor(d)
            dL = log_divisor(as_word(E.embed(x)), E.ext_ctx)
            keys = set(jd.coeffs) | set(dL.coeffs)
            for k in keys:
                a = jd.coeffs.get(k)
                b = dL.coeffs.get(k)
                av = a[1] if a else PadicScalar.zero(2, 12)
                bv = b[1] if b else PadicScalar.zero(2, 12)
                assert av.eq_at_prec(bv, slack=6), (vec, k)

    def test_transitivity_on_tower(self):
        M = compose_quadratics(-1, 3)
        E1 = build_extension(QQ, QI, 3, 20)
        E2 = build_extension(QI, M, 3, 20, base_ctx=E1.ext_ctx)
        E3 = build_extension(QQ, M, 3, 20, base_ctx=E1.base_ctx,
                             ext_ctx=E2.ext_ctx)
        for n in (2, 5):
            d = log_divisor(as_word(QQ.from_rational(n)), E1.base_ctx)
            via = E2.extend_divisor(E1.extend_divisor(d))
            direct = E3.extend_divisor(d)
            keys = set(via.coeffs) | set(direct.coeffs)
            for k in keys:
                a = via.coeffs.get(k)
                b = direct.coeffs.get(k)
                av = a[1] if a else PadicScalar.zero(3, 12)
                bv = b[1] if b else PadicScalar.zero(3, 12)
                assert av.eq_at_prec(bv, slack=6)


class TestKernel:
    def test_identity_trivial_kernel(self):
        rep = capitulation_kernel(QI, QI, 3, 20)
        assert rep.verdicts == []
        assert rep.kernel_invariants == []

    def test_identity_with_torsion(self):
        K = build_field("x^2+14")
        rep = capitulation_kernel(K, K, 3, 20)
        assert len(rep.verdicts) == 1
        assert rep.verdicts[0].verdict == "survives"
        assert rep.verdicts[0].image_order == 3
        assert rep.kernel_invariants == []

    @pytest.mark.slow
    def test_quartic_capitulation_pair(self):
        K = build_field("x^2+31")
        L = compose_quadratics(-31, 2)
        rep = capitulation_kernel(K, L, 2, 32)
        assert rep.base_torsion == [1]
        assert rep.certified
        assert len(rep.verdicts) == 1
        assert rep.verdicts[0].verdict in ("capitulates", "survives")
        j = rep.to_json()
        assert j["per_class"][0]["verdict"] == rep.verdicts[0].verdict
