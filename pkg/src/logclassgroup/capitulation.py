"""Extension morphism on logarithmic divisor classes and capitulation.

The logarithmic ramification index is computed semi-locally from global
witnesses:

    e~(P/p) = nu~_P(x) / nu~_p(x)

for a base-field witness x with unit-valued nu~ at p, evaluated through
the embedding on the extension side.  The ratio is witness-independent
(both sides are -Log(N_loc)/deg up to the local degree), and the
implementation still cross-checks a second witness at precision.  An
extension is logarithmically unramified when e~ = 1 at precision at every
finite place in scope; tame places away from l collapse l-adically, which
is the intended reading here (a prime-to-l local extension is invisible
to the pro-l theory).

Capitulation: each torsion generator class of the base degree-zero group
is pushed through j (coefficientwise e~-weighted transfer of places),
rewritten over the extension's generator set, and tested for triviality
against the extension's relation matrix.  Verdicts are three-valued;
"inconclusive" is a first-class outcome when precision or certification
do not support a yes/no.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import sympy

from .caps import Caps, DEFAULT_CAPS
from .errors import CapsExceeded, InputError, UnsupportedConfiguration
from .logclass import (
    LogClassGroup, LogDivisor, LogPlace, PlacesContext, as_word,
    log_class_group, log_divisor, log_valuation, rewrite_prime_over_T,
)
from .numfield import (
    AlgebraicNum, Ideal, NumberField, decompose_prime,
)
from .padic import GUARD_DIGITS, PadicScalar, SLACK_DIGITS
from .zlmod import ZlMatrix, kernel_generators, solve_linear
from .intlinalg import smith_normal_form_int


@dataclass
class ExtensionData:
    base: NumberField
    ext: NumberField
    ell: int
    ndigits: int
    embed_theta: AlgebraicNum       # image of the base generator in ext
    rel_degree: int
    base_ctx: PlacesContext
    ext_ctx: PlacesContext
    _theta_powers: list = dfield(default_factory=list)
    _matching: dict = dfield(default_factory=dict)   # key_L -> LogPlace of K
    _e_tilde: dict = dfield(default_factory=dict)    # key_L -> PadicScalar
    _below_cache: dict = dfield(default_factory=dict)

    def embed(self, x: AlgebraicNum) -> AlgebraicNum:
        assert x.field == self.base
        if not self._theta_powers:
            acc = self.ext.one()
            self._theta_powers.append(acc)
            for _ in range(self.base.n - 1):
                acc = acc * self.embed_theta
                self._theta_powers.append(acc)
        pw = self.base.basis_to_power(x.coords)
        out = self.ext.zero()
        for c, tp in zip(pw, self._theta_powers):
            if c:
                out = out + tp.scale(c)
        return out

    # ----- place matching ------------------------------------------------

    def place_below(self, P: Ideal) -> Ideal:
        """The base prime under an extension prime (exact ideal membership
        of the embedded two-element generators)."""
        key = (P.p, P.hnf)
        hit = self._below_cache.get(key)
        if hit is not None:
            return hit
        cands = decompose_prime(self.base, P.p)
        below = None
        for q in cands:
            if len(cands) == 1:
                below = q
                break
            g = q.gen2
            if g is None:
                raise UnsupportedConfiguration(
                    f"no two-element generator for matching at {q}")
            if P.contains(self.embed(g)):
                assert below is None, "ambiguous place matching"
                below = q
        assert below is not None, "no base place under extension place"
        self._below_cache[key] = below
        return below

    def places_above(self, q: Ideal):
        return [P for P in decompose_prime(self.ext, q.p)
                if self.place_below(P).hnf == q.hnf]

    # ----- logarithmic ramification ---------------------------------------

    def _witnesses_at(self, q_place: LogPlace):
        """Base elements with unit-valued nu~ at the base place, in a
        deterministic order."""
        K, ell = self.base, self.ell
        cands = []
        if not q_place.above_ell and q_place.prime.gen2 is not None:
            cands.append(q_place.prime.gen2)
        cands.append(K.from_rational(1 + ell))
        for p in (2, 3, 5, 7, 11, 13):
            if p != ell:
                cands.append(K.from_rational(p))
        for i in range(1, K.n):
            b = K.from_basis_ints([1 if t == i else 0 for t in range(K.n)])
            cands.extend([b, K.one() + b, K.one() - b])
        out = []
        for x in cands:
            if x.is_zero:
                continue
            v = log_valuation(as_word(x), q_place)
            if not v.is_zero and v.val == 0:
                out.append((x, v))
        if not out:
            raise UnsupportedConfiguration(
                f"no unit-valuation witness at {q_place!r}")
        return out

    def e_tilde(self, P: Ideal) -> PadicScalar:
        """e~(P/p) by the witness ratio, checked against a second witness."""
        key = (P.p, P.hnf)
        hit = self._e_tilde.get(key)
        if hit is not None:
            return hit
        q = self.place_below(P)
        q_place = self.base_ctx.wrap(q)
        P_place = self.ext_ctx.wrap(P)
        wits = self._witnesses_at(q_place)
        ratios = []
        for x, vq in wits[:2]:
            vP = log_valuation(as_word(self.embed(x)), P_place)
            ratios.append(vP / vq)
        if len(ratios) == 2 and not ratios[0].eq_at_prec(ratios[1]):
            raise AssertionError(
                f"witness-dependent ramification index at {P!r}: "
                f"{ratios[0].render()} vs {ratios[1].render()}")
        self._e_tilde[key] = ratios[0]
        return ratios[0]

    def f_tilde(self, P: Ideal) -> PadicScalar:
        q = self.place_below(P)
        return self.ext_ctx.wrap(P).degree() / \
            self.base_ctx.wrap(q).degree()

    # ----- the extension morphism -----------------------------------------

    def extend_divisor(self, d: LogDivisor) -> LogDivisor:
        """j(d) = sum_p coeff(p) sum_{P|p} e~(P/p) P."""
        out = LogDivisor(self.ext, self.ell, d.ndigits)
        for _k, (pl, c) in sorted(d.coeffs.items()):
            if c.is_zero:
                continue
            for P in self.places_above(pl.prime):
                out.add_term(self.ext_ctx.wrap(P), c * self.e_tilde(P))
        return out


def build_extension(K: NumberField, L: NumberField, ell: int, ndigits: int,
                    hint: AlgebraicNum | None = None,
                    caps: Caps = DEFAULT_CAPS,
                    base_ctx=None, ext_ctx=None) -> ExtensionData:
    if L.n % K.n:
        raise InputError(f"[L:Q] = {L.n} not divisible by [K:Q] = {K.n}")
    emb = hint if hint is not None else _find_embedding(K, L, caps)
    if emb is not None:
        from .numfield import _eval_poly_alg
        from fractions import Fraction
        val = _eval_poly_alg([Fraction(c) for c in K.coeffs], emb)
        if not val.is_zero:
            raise InputError("embedding hint does not satisfy the base polynomial")
    W = ndigits + GUARD_DIGITS
    if base_ctx is None:
        base_ctx = PlacesContext(K, ell, W)
    if ext_ctx is None:
        ext_ctx = PlacesContext(L, ell, W)
    return ExtensionData(K, L, ell, ndigits, emb, L.n // K.n,
                         base_ctx, ext_ctx)


def _find_embedding(K: NumberField, L: NumberField, caps: Caps):
    if K.n == 1:
        return L.zero()
    if K == L:
        return L.theta()
    rel = L.relative_quadratic
    if rel is not None and K.n == 2:
        # try the three quadratic subfields
        cands = [rel.sqrt_d, rel.sqrt_delta,
                 rel.sqrt_d * rel.sqrt_delta]
        from .numfield import _eval_poly_alg
        for c in cands:
            for s in (c, -c):
                shifted = _embedding_from_sqrt(K, L, s)
                if shifted is not None:
                    return shifted
    # bounded brute search over small integral combinations
    import itertools
    from .numfield import _eval_poly_alg
    count = 0
    for A in (1, 2, 3):
        for vec in itertools.product(range(-A, A + 1), repeat=L.n):
            if not any(vec):
                continue
            count += 1
            if count > caps.rewrite_box:
                raise CapsExceeded("embedding search box exhausted")
            x = L.from_basis_ints(list(vec))
            if _eval_poly_alg([sympy.Rational(c) for c in K.coeffs], x).is_zero:
                return x
    raise InputError(f"no embedding of {K.label} into {L.label} found")


def _embedding_from_sqrt(K, L, s):
    """If K = Q(theta) with theta = (a + b sqrt(r))-style quadratic and s^2
    matches the radicand scaled suitably, return the image of theta."""
    from .numfield import _eval_poly_alg
    # theta satisfies x^2 + c1 x + c0; its image is (-c1 + t)/2 where
    # t^2 = disc = c1^2 - 4 c0; try t = m * s for small rational m
    c0, c1 = K.coeffs[0], K.coeffs[1]
    disc = c1 * c1 - 4 * c0
    s2 = s * s
    if not all(c.denominator == 1 for c in s2.coords):
        return None
    rad = s2.coords[0]
    if not all(c == 0 for c in s2.coords[1:]):
        return None
    rad = int(rad)
    if rad == 0 or disc % rad:
        return None
    m2 = disc // rad
    from math import isqrt
    m = isqrt(abs(m2))
    if m * m != m2:
        return None
    t = s.scale(m)
    img = (t - L.from_rational(c1)).scale(sympy.Rational(1, 2))
    if _eval_poly_alg([sympy.Rational(c) for c in K.coeffs], img).is_zero:
        return img
    return None


# ---------------------------------------------------------------------------
# logarithmically unramified predicate


@dataclass
class RamificationReport:
    ell: int
    per_place: list          # (p, hnf, e~ render, is_one)
    unramified: bool
    real_places_note: str

    def to_json(self):
        return {
            "per_place": [
                {"p": p, "e_tilde": r, "log_unramified": ok}
                for (p, _h, r, ok) in self.per_place],
            "log_unramified_everywhere_finite": self.unramified,
            "real_places": self.real_places_note,
        }


def is_log_unramified(E: ExtensionData, scope=None) -> RamificationReport:
    """e~(P/p) = 1 at precision for every finite place in scope (default:
    primes dividing ell * disc(ext))."""
    if scope is None:
        scope = sorted(set(sympy.factorint(abs(E.ext.disc)).keys()) | {E.ell})
    rows = []
    allone = True
    one = PadicScalar.one(E.ell, E.ndigits)
    for p in scope:
        for P in decompose_prime(E.ext, p):
            et = E.e_tilde(P)
            ok = et.eq_at_prec(one)
            allone = allone and ok
            rows.append((p, P.hnf, et.render(), ok))
    note = ("unchecked (ell = 2 real-place convention not pinned down)"
            if E.ell == 2 and E.ext.signature[0] + E.base.signature[0] > 0
            else "not applicable")
    return RamificationReport(E.ell, rows, allone, note)


# ---------------------------------------------------------------------------
# capitulation


@dataclass
class ClassVerdict:
    index: int
    order_in_base: int        # l^a
    verdict: str              # 'capitulates' | 'survives' | 'inconclusive'
    image_order: int | None   # l-power order of the image when known

    def to_json(self):
        return {"generator": self.index,
                "order": self.order_in_base,
                "verdict": self.verdict,
                "image_order": self.image_order}


@dataclass
class CapitulationReport:
    base: NumberField
    ext: NumberField
    ell: int
    ndigits: int
    extension: ExtensionData
    base_lcg: LogClassGroup
    ext_lcg: LogClassGroup
    ramification: RamificationReport
    verdicts: list
    kernel_invariants: list     # elementary divisor exponents of ker j
    base_torsion: list
    ext_torsion: list
    certified: bool

    @property
    def all_capitulate(self):
        return all(v.verdict == "capitulates" for v in self.verdicts)

    def to_json(self):
        return {
            "base": self.base.label,
            "ext": self.ext.label,
            "ell": self.ell,
            "precision": self.ndigits,
            "e_tilde_table": self.ramification.to_json(),
            "base_torsion_exponents": list(self.base_torsion),
            "ext_torsion_exponents": list(self.ext_torsion),
            "per_class": [v.to_json() for v in self.verdicts],
            "kernel_invariants": list(self.kernel_invariants),
            "certified_inputs": self.certified,
        }


def capitulation_kernel(K: NumberField, L: NumberField, ell: int,
                        ndigits: int, caps: Caps = DEFAULT_CAPS,
                        hint=None, base_lcg=None, ext_lcg=None) -> CapitulationReport:
    lcgK = base_lcg if base_lcg is not None else \
        log_class_group(K, ell, ndigits, caps)
    lcgL = ext_lcg if ext_lcg is not None else \
        log_class_group(L, ell, ndigits, caps)
    E = build_extension(K, L, ell, ndigits, hint=hint, caps=caps,
                        base_ctx=lcgK.ctx, ext_ctx=lcgL.ctx)
    ram = is_log_unramified(E)
    mod = ell ** ndigits
    TL = lcgL.places
    orderL = {pl.key(): i for i, pl in enumerate(TL)}
    verdicts = []
    images = []
    for idx, (a, vec) in enumerate(lcgK.torsion_generators):
        d = _vector_to_divisor(lcgK, vec)
        jd = E.extend_divisor(d)
        w = _reduce_over_T(lcgL, jd, caps)
        img_dz = [c for i, c in enumerate(w) if i != lcgL.pivot]
        images.append(img_dz)
        verdict, img_order = _triviality(lcgL, img_dz, a, ndigits)
        if not (lcgK.certified and lcgL.certified):
            # an unsaturated relation set can fake either verdict
            verdict = "inconclusive"
        verdicts.append(ClassVerdict(idx, ell ** a, verdict, img_order))
    kernel_inv = _kernel_invariants(lcgK, lcgL, images, ell, ndigits)
    return CapitulationReport(
        K, L, ell, ndigits, E, lcgK, lcgL, ram, verdicts, kernel_inv,
        lcgK.deg_zero.torsion_exponents, lcgL.deg_zero.torsion_exponents,
        lcgK.certified and lcgL.certified)


def _vector_to_divisor(lcg: LogClassGroup, vec) -> LogDivisor:
    d = LogDivisor(lcg.field, lcg.ell, lcg.ctx.ndigits)
    for c, pl in zip(vec, lcg.places):
        if c:
            d.add_term(pl, PadicScalar.from_int(c, lcg.ell,
                                                lcg.ctx.ndigits))
    return d


def _reduce_over_T(lcg: LogClassGroup, d: LogDivisor, caps) -> list:
    """Vector over lcg.places representing the class of d (residues)."""
    ell, N = lcg.ell, lcg.ndigits
    mod = ell ** N
    order = {pl.key(): i for i, pl in enumerate(lcg.places)}
    vec = [0] * len(lcg.places)
    for _k, (pl, c) in sorted(d.coeffs.items()):
        if c.is_zero:
            continue
        cc = c.residue(N)
        i = order.get(pl.key())
        if i is not None:
            vec[i] = (vec[i] + cc) % mod
            continue
        sub = rewrite_prime_over_T(lcg, pl.prime, caps)
        vec = [(x + cc * y) % mod for x, y in zip(vec, sub)]
    return vec


def _triviality(lcgL: LogClassGroup, img, base_exp, ndigits):
    """('capitulates'|'survives'|'inconclusive', image order or None)."""
    ell = lcgL.ell
    A0 = lcgL.deg_zero_matrix
    if max(lcgL.deg_zero.torsion_exponents, default=0) >= ndigits - 8:
        return "inconclusive", None
    for k in range(base_exp + 1):
        scaled = [c * ell ** k % ell ** ndigits for c in img]
        if solve_linear(A0, scaled) is not None:
            return ("capitulates", 1) if k == 0 else ("survives", ell ** k)
    return "inconclusive", None


def _kernel_invariants(lcgK, lcgL, images, ell, ndigits):
    """Elementary divisor exponents of ker(j) as a subgroup of the base
    torsion sum(Z/l^a_i)."""
    exps = [a for a, _v in lcgK.torsion_generators]
    k = len(exps)
    if k == 0:
        return []
    A0 = lcgL.deg_zero_matrix
    rows = A0.rows
    stacked_cols = []
    for img in images:
        stacked_cols.append(list(img))
    M = ZlMatrix(ell, ndigits,
                 [[stacked_cols[j][i] for j in range(k)] +
                  [A0.a[i][j2] for j2 in range(A0.cols)]
                  for i in range(rows)]) if rows else None
    if M is None:
        # extension group is trivial: everything lies in the kernel
        lat = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
    else:
        kern = kernel_generators(M)
        proj = [g[:k] for g in kern]
        lat = proj + \
            [[ell ** a if j == i else 0 for j in range(k)]
             for i, a in enumerate(exps)] + \
            [[ell ** ndigits if j == i else 0 for j in range(k)]
             for i in range(k)]
    from .intlinalg import row_hnf, solve_int
    basis = row_hnf(lat, k)
    if len(basis) != k:
        return []
    # kernel group = basis-lattice / diag(l^a_i): express the diagonal
    # lattice over the basis and take its SNF
    diag = [[ell ** a if j == i else 0 for j in range(k)]
            for i, a in enumerate(exps)]
    coords = []
    bt = [[basis[i][j] for i in range(k)] for j in range(k)]
    for row in diag:
        c = solve_int(bt, row)
        assert c is not None
        coords.append(c)
    m = [[coords[j][i] for j in range(k)] for i in range(k)]
    divs, _u, _v = smith_normal_form_int(m)
    out = []
    for dvs in divs:
        dvs = abs(dvs)
        if dvs > 1:
            e = 0
            while dvs % ell == 0:
                dvs //= ell
                e += 1
            assert dvs == 1, "kernel invariant not an l-power"
            out.append(e)
    return sorted(out)
