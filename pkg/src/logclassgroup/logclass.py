"""Logarithmic valuations, divisors and the pro-l logarithmic class group.

Away from l the logarithmic valuation is the ordinary one.  At a place
above l it is

    nu~(x) = - Log(N_loc(x)) / deg(place),

where Log is the Iwasawa logarithm and deg(place) generates the Z_l-module
Log(N_loc(K_P^x)) -- normalized as the minimal-valuation value over a
deterministic sampling set (1+l first, then small primes, then integral
basis elements).  The sign makes the product formula hold with the
ordinary valuations kept positive away from l; the degree of a place away
from l is Log of its absolute norm.

The group itself is presented on T = (places above l) + (generators of
the l-part of the class group); relations are the logarithmic divisors of
S-unit witnesses, the fundamental unit, and the principality witnesses,
which together span everything supported on T.  The degree-zero part is
the kernel of the degree functional; after scaling the functional to a
unit pivot its kernel is free, so the subpresentation is just the
relation matrix with the pivot row deleted.

Free-at-precision summands of the degree-zero part are reported as
conjecture-defect candidates, never asserted: a divisor of valuation >= N
cannot be told apart from an exactly free one.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from fractions import Fraction

import sympy

from .caps import Caps, DEFAULT_CAPS
from .errors import CapsExceeded, UnsupportedConfiguration
from .numfield import (
    AlgebraicNum, Ideal, NumberField, decompose_prime, ideal_pow,
    ideal_valuation, places_above_ell, LocalPlace,
)
from .padic import (
    GUARD_DIGITS, PadicScalar, SLACK_DIGITS, iwasawa_log, val_int,
)
from .units_classes import (
    ClassGroupData, class_group, class_vector, ideal_generator_search,
    s_unit_relations, unit_group,
)
from .zlmod import (
    ModuleDecomposition, ZlMatrix, generator_vectors, quotient_presentation,
)


# ---------------------------------------------------------------------------
# places


class LogPlace:
    """A finite place equipped with its logarithmic degree."""

    __slots__ = ("field", "ell", "ndigits", "prime", "local", "_deg")

    def __init__(self, field, ell, ndigits, prime: Ideal, local=None):
        self.field = field
        self.ell = ell
        self.ndigits = ndigits
        self.prime = prime
        self.local = local          # LocalPlace when above ell
        self._deg = None

    @property
    def above_ell(self) -> bool:
        return self.local is not None

    def key(self):
        return (self.prime.p, self.prime.hnf)

    def __eq__(self, other):
        return isinstance(other, LogPlace) and self.key() == other.key() \
            and self.ell == other.ell

    def __hash__(self):
        return hash((self.ell, self.key()))

    def __repr__(self):
        tag = "l-adic" if self.above_ell else "tame"
        return f"LogPlace(p={self.prime.p}, f={self.prime.f_deg}, {tag})"

    def label(self):
        return {"p": self.prime.p, "f": self.prime.f_deg,
                "e": self.prime.e_ram,
                "hnf": [list(r) for r in self.prime.hnf],
                "above_ell": self.above_ell}

    def degree(self) -> PadicScalar:
        if self._deg is None:
            self._deg = log_degree_of_place(self)
        return self._deg


def _sampling_elements(K: NumberField, ell: int):
    """Deterministic witnesses for the degree normalization at l-places:
    1+l, small primes, integral basis elements, and small shifts of the
    basis elements (the pure samples alone can miss the minimal valuation
    at ramified places over l = 2)."""
    out = [K.from_rational(1 + ell)]
    for q in (2, 3, 5, 7, 11, 13):
        if q != ell:
            out.append(K.from_rational(q))
    basis = [K.from_basis_ints([1 if t == i else 0 for t in range(K.n)])
             for i in range(1, K.n)]
    out.extend(basis)
    for b in basis:
        out.append(K.one() + b)
        out.append(K.one() - b)
        out.append(K.from_rational(2) + b)
    for i in range(len(basis)):
        for j in range(i):
            out.append(basis[i] + basis[j])
    return out


def log_degree_of_place(place: LogPlace) -> PadicScalar:
    """deg(P): Log of the absolute norm away from l; at a place above l,
    the minimal-valuation value of Log(N_loc(x)) over the sampling set."""
    ell, W = place.ell, place.ndigits
    if not place.above_ell:
        p, f = place.prime.p, place.prime.f_deg
        lg = iwasawa_log(PadicScalar.from_int(p, ell, W))
        return lg * PadicScalar.from_int(f, ell, W)
    K = place.field
    best = None
    for x in _sampling_elements(K, ell):
        if x.is_zero:
            continue
        nx = place.local.local_norm(x, W)
        if nx.is_zero:
            continue
        lg = iwasawa_log(nx)
        if lg.is_zero:
            continue
        if best is None or lg.val < best.val:
            best = lg
    if best is None:
        raise UnsupportedConfiguration(
            f"no sampling witness with nonzero degree at {place!r}")
    return best


# ---------------------------------------------------------------------------
# words and divisors


@dataclass(frozen=True)
class FieldElementWord:
    """Formal product of field elements with integer exponents (the l-adic
    tensor: exponents are read mod l^N wherever they are consumed)."""
    field: NumberField
    factors: tuple   # ((AlgebraicNum, int), ...)

    @classmethod
    def of(cls, x: AlgebraicNum, e: int = 1):
        assert not x.is_zero
        return cls(x.field, ((x, e),))

    def __mul__(self, other: "FieldElementWord"):
        assert self.field == other.field
        return FieldElementWord(self.field, self.factors + other.factors)

    def pow(self, k: int):
        return FieldElementWord(
            self.field, tuple((x, e * k) for x, e in self.factors))


def as_word(x) -> FieldElementWord:
    if isinstance(x, FieldElementWord):
        return x
    return FieldElementWord.of(x)


class LogDivisor:
    """Finite formal combination of LogPlaces with PadicScalar coefficients."""

    def __init__(self, field, ell, ndigits, coeffs=None):
        self.field = field
        self.ell = ell
        self.ndigits = ndigits
        self.coeffs = dict(coeffs or {})   # key -> (LogPlace, PadicScalar)

    def add_term(self, place: LogPlace, c: PadicScalar):
        k = place.key()
        if k in self.coeffs:
            c = self.coeffs[k][1] + c
        self.coeffs[k] = (place, c)

    def __add__(self, other):
        out = LogDivisor(self.field, self.ell, self.ndigits, self.coeffs)
        for place, c in other.coeffs.values():
            out.add_term(place, c)
        return out

    def scale(self, c: PadicScalar):
        out = LogDivisor(self.field, self.ell, self.ndigits)
        for place, v in self.coeffs.values():
            out.add_term(place, v * c)
        return out

    def support(self):
        return [pl for _k, (pl, c) in sorted(self.coeffs.items())
                if not c.is_zero]

    def coeff(self, place: LogPlace) -> PadicScalar:
        hit = self.coeffs.get(place.key())
        if hit is None:
            return PadicScalar.zero(self.ell, self.ndigits)
        return hit[1]

    def degree(self) -> PadicScalar:
        acc = PadicScalar.zero(self.ell, self.ndigits + GUARD_DIGITS)
        for place, c in self.coeffs.values():
            acc = acc + c * place.degree()
        return acc

    def is_zero_at(self, slack: int = SLACK_DIGITS) -> bool:
        return all(c.is_zero_at(slack) for _pl, c in self.coeffs.values())

    def __repr__(self):
        parts = [f"{c.render()} * (p={pl.prime.p})"
                 for _k, (pl, c) in sorted(self.coeffs.items())
                 if not c.is_zero]
        return "LogDivisor(" + " + ".join(parts or ["0"]) + ")"


# ---------------------------------------------------------------------------
# valuations


def ordinary_valuation(x: AlgebraicNum, P: Ideal) -> int:
    """v_P(x) for any nonzero x (numerator/denominator split)."""
    den = 1
    for c in x.coords:
        den = den * c.denominator // _g(den, c.denominator)
    y = x.scale(den)
    v = ideal_valuation(y, P)
    if den % P.p == 0:
        v -= P.e_ram * val_int(den, P.p)
    return v


def _g(a, b):
    from math import gcd
    return gcd(a, b)


def log_valuation(word, place: LogPlace, ndigits=None) -> PadicScalar:
    """nu~ at the place: ordinary valuation away from l (extended linearly
    over the word), -Log(N_loc)/deg at a place above l."""
    word = as_word(word)
    W = place.ndigits if ndigits is None else ndigits
    ell = place.ell
    if not place.above_ell:
        total = 0
        for x, e in word.factors:
            total += e * ordinary_valuation(x, place.prime)
        return PadicScalar.from_int(total, ell, W)
    acc = PadicScalar.zero(ell, W + GUARD_DIGITS)
    for x, e in word.factors:
        nx = place.local.local_norm(x, W)
        lg = iwasawa_log(nx)
        acc = acc + lg * PadicScalar.from_int(e, ell, W)
    res = (-acc) / place.degree()
    if not res.is_zero and res.val < 0:
        raise UnsupportedConfiguration(
            "logarithmic valuation fell outside Z_l; degree normalization "
            "is not a generator")
    return res


def log_divisor(word, places_ctx) -> LogDivisor:
    """div~(x): support = ordinary support away from l, plus every place
    above l.  places_ctx carries the field's l-places and cache."""
    word = as_word(word)
    K = word.field
    ell, W = places_ctx.ell, places_ctx.ndigits
    d = LogDivisor(K, ell, W)
    support = {}
    for x, e in word.factors:
        if x.is_zero:
            raise ValueError("zero factor in word")
        den = 1
        for c in x.coords:
            den = den * c.denominator // _g(den, c.denominator)
        nm = abs(int((x.scale(den)).norm()))
        for p in set(sympy.factorint(nm).keys()) | set(sympy.factorint(den).keys()):
            if p != ell:
                for P in decompose_prime(K, p):
                    support.setdefault(P.hnf, P)
    for _hnf, P in sorted(support.items()):
        pl = places_ctx.away_place(P)
        v = log_valuation(word, pl)
        if not v.is_zero:
            d.add_term(pl, v)
    for pl in places_ctx.ell_places:
        d.add_term(pl, log_valuation(word, pl))
    return d


def is_log_unit(word, places_ctx, slack: int = SLACK_DIGITS) -> bool:
    return log_divisor(word, places_ctx).is_zero_at(slack)


class PlacesContext:
    """Shared LogPlace cache for one (field, ell, precision)."""

    def __init__(self, K: NumberField, ell: int, ndigits: int):
        self.field = K
        self.ell = ell
        self.ndigits = ndigits
        self.ell_places = [
            LogPlace(K, ell, ndigits, lp.ideal, lp)
            for lp in places_above_ell(K, ell, ndigits)
        ]
        self.ell_places.sort(key=lambda pl: pl.key())
        self._away = {}

    def away_place(self, P: Ideal) -> LogPlace:
        assert P.p != self.ell
        hit = self._away.get(P.hnf)
        if hit is None:
            hit = LogPlace(self.field, self.ell, self.ndigits, P)
            self._away[P.hnf] = hit
        return hit

    def wrap(self, P: Ideal) -> LogPlace:
        if P.p == self.ell:
            for pl in self.ell_places:
                if pl.prime.hnf == P.hnf:
                    return pl
            raise ValueError("unknown place above ell")
        return self.away_place(P)


def degree(d: LogDivisor) -> PadicScalar:
    return d.degree()


# ---------------------------------------------------------------------------
# the group


@dataclass
class LogClassGroup:
    field: NumberField
    ell: int
    ndigits: int                       # reported precision N
    ctx: PlacesContext                 # working precision N + guard
    places: list                       # the generator set T (LogPlace)
    relation_matrix: ZlMatrix          # |T| x (#relations), mod l^N
    full: ModuleDecomposition          # decomposition of C_K
    deg_vector: list                   # PadicScalar per T entry
    pivot: int                         # index of the unit-pivot place
    deg_zero: ModuleDecomposition      # decomposition of C~_K
    deg_zero_matrix: ZlMatrix
    epsilon_tilde: int
    torsion_generators: list           # (exponent, vector over T as residues)
    class_data: ClassGroupData
    certified: bool
    rewrites: dict = dfield(default_factory=dict)

    @property
    def gross_kuzmin_report(self):
        return {
            "free_at_precision_in_deg_zero": self.deg_zero.free_rank,
            "expected_if_conjecture_holds": 0,
            "candidate_defect": self.deg_zero.free_rank,
            "note": "free-at-precision summands are defect candidates only; "
                    "finite precision cannot certify an infinite class",
        }

    def to_json(self):
        return {
            "field": self.field.label,
            "ell": self.ell,
            "precision": self.ndigits,
            "certified_inputs": self.certified,
            "class_number": self.class_data.h,
            "T": [pl.label() for pl in self.places],
            "relation_matrix": self.relation_matrix.to_json(),
            "full_decomposition": self.full.invariants_json(),
            "degree_zero_decomposition": self.deg_zero.invariants_json(),
            "epsilon_tilde": self.epsilon_tilde,
            "gross_kuzmin_report": self.gross_kuzmin_report,
        }


def log_class_group(K: NumberField, ell: int, ndigits: int,
                    caps: Caps = DEFAULT_CAPS, extra_primes=()) -> LogClassGroup:
    """Finite presentation of the logarithmic class group at precision l^N.

    extra_primes: optional prime Ideals adjoined to T (the presentation is
    independent of such enlargements; exposed for exactly that check)."""
    W = ndigits + GUARD_DIGITS
    ctx = PlacesContext(K, ell, W)
    cg = class_group(K, caps)
    # T: places above ell + class-group generators whose class has order
    # divisible by ell
    T = list(ctx.ell_places)
    for i, g in enumerate(cg.generators):
        if g.p == ell:
            continue
        e = [1 if j == i else 0 for j in range(len(cg.generators))]
        if cg.class_order(e) % ell == 0:
            T.append(ctx.away_place(g))
    for P in extra_primes:
        if P.p != ell and all(pl.key() != (P.p, P.hnf) for pl in T):
            T.append(ctx.away_place(P))
    T.sort(key=lambda pl: pl.key())
    s_primes = [pl.prime for pl in T]
    su = s_unit_relations(K, s_primes, ell, caps, class_data=cg)
    witnesses = [as_word(w) for w in su.witnesses]
    if su.units.fundamental is not None:
        witnesses.append(as_word(su.units.fundamental))
    columns, divisors = [], []
    order = {pl.key(): i for i, pl in enumerate(T)}
    for w in witnesses:
        d = log_divisor(w, ctx)
        col = _divisor_to_column(d, T, order, ell, ndigits)
        columns.append(col)
        divisors.append(d)
    full, A = quotient_presentation(len(T), columns, ell, ndigits)
    # degree functional and its unit pivot
    deg_vec = [pl.degree() for pl in T]
    cmin = min(v.val for v in deg_vec)
    pivot = next(i for i, v in enumerate(deg_vec) if v.val == cmin)
    # every relation has degree 0 (product formula): check at precision
    for d in divisors:
        dg = d.degree()
        if not dg.is_zero_at(SLACK_DIGITS):
            raise AssertionError(f"relation of nonzero degree: {dg.render()}")
    # kernel of the degree functional is free with basis
    # {e_j - (deg_j/deg_pivot) e_pivot}; in those coordinates a degree-zero
    # column is just itself with the pivot row dropped
    cols0 = [[c for i, c in enumerate(col) if i != pivot] for col in columns]
    deg_zero, A0 = quotient_presentation(max(len(T) - 1, 0), cols0, ell, ndigits)
    assert full.free_rank >= 1, "C_K must have a free-at-precision summand"
    assert full.torsion_exponents == deg_zero.torsion_exponents, \
        "torsion of C_K and of its degree-zero part must agree"
    eps = full.exponent
    torsion_gens = _torsion_generator_vectors(deg_zero, T, pivot, deg_vec,
                                              ell, ndigits)
    return LogClassGroup(
        K, ell, ndigits, ctx, T, A, full, deg_vec, pivot, deg_zero, A0,
        eps, torsion_gens, cg, cg.certified and su.certified)


def _divisor_to_column(d: LogDivisor, T, order, ell, ndigits):
    col = [0] * len(T)
    for _k, (pl, c) in sorted(d.coeffs.items()):
        if c.is_zero:
            continue
        i = order.get(pl.key())
        if i is None:
            raise CapsExceeded(
                f"witness divisor leaves T at p={pl.prime.p}")
        col[i] = c.residue(ndigits)
    return col


def _torsion_generator_vectors(dec, T, pivot, deg_vec, ell, ndigits):
    """For each torsion invariant of the degree-zero part: (exponent,
    divisor vector over T with residue coefficients).  The kernel basis
    element k_j is e_j - lambda_j e_pivot, lambda_j = deg_j / deg_pivot."""
    out = []
    if dec.U is None:
        return out
    gv = generator_vectors(dec)
    mod = ell ** ndigits
    lambdas = []
    for i, v in enumerate(deg_vec):
        if i == pivot:
            lambdas.append(None)
        else:
            lam = v / deg_vec[pivot]
            lambdas.append(lam.residue(ndigits))
    idx_map = [i for i in range(len(T)) if i != pivot]
    for k, a in enumerate(dec.diag_exponents):
        if not (0 < a < ndigits):
            continue
        coeffs_reduced = gv[k]
        vec = [0] * len(T)
        for j_red, c in enumerate(coeffs_reduced):
            j = idx_map[j_red]
            vec[j] = (vec[j] + c) % mod
            vec[pivot] = (vec[pivot] - c * lambdas[j]) % mod
        out.append((a, vec))
    return out


# ---------------------------------------------------------------------------
# rewriting arbitrary primes over T (used by capitulation)


def rewrite_prime_over_T(lcg: LogClassGroup, P: Ideal,
                         caps: Caps = DEFAULT_CAPS):
    """Vector v over T with [P] = sum v_t [t] in the presented group
    (residues mod l^N).  Uses a smooth witness for P over the class-group
    generators, then eliminates non-T generators via their prime-to-l
    class orders."""
    key = (P.p, P.hnf)
    hit = lcg.rewrites.get(key)
    if hit is not None:
        return hit
    ctx, T = lcg.ctx, lcg.places
    order = {pl.key(): i for i, pl in enumerate(T)}
    if key in order:
        vec = [0] * len(T)
        vec[order[key]] = 1
        lcg.rewrites[key] = vec
        return vec
    ell, N = lcg.ell, lcg.ndigits
    mod = ell ** N
    cg = lcg.class_data
    _e, w = class_vector(cg, P, caps)
    assert w is not None
    # div~(w) = 1*P + rest = 0 in the class group, so [P] = -[rest]
    d = log_divisor(as_word(w), ctx)
    assert d.coeff(ctx.away_place(P)).residue(N) == 1 % mod
    vec = [(-x) % mod for x in _rewrite_rest(lcg, d, key, caps)]
    lcg.rewrites[key] = vec
    return vec


def _rewrite_rest(lcg, d, skip_key, caps):
    ell, N = lcg.ell, lcg.ndigits
    mod = ell ** N
    vec = [0] * len(lcg.places)
    for _k, (pl, c) in sorted(d.coeffs.items()):
        if pl.key() == skip_key:
            continue
        sub = _generator_vector_over_T(lcg, pl.prime, caps)
        cc = c.residue(N)
        vec = [(x + cc * y) % mod for x, y in zip(vec, sub)]
    return vec


def _generator_vector_over_T(lcg: LogClassGroup, P: Ideal, caps):
    """Vector over T for a prime that is either in T or a class-group
    generator with order prime to l (eliminated via its principal power)."""
    key = (P.p, P.hnf)
    order = {pl.key(): i for i, pl in enumerate(lcg.places)}
    if key in order:
        vec = [0] * len(lcg.places)
        vec[order[key]] = 1
        return vec
    hit = lcg.rewrites.get(key)
    if hit is not None:
        return hit
    ell, N = lcg.ell, lcg.ndigits
    mod = ell ** N
    cg = lcg.class_data
    gen_idx = {g.hnf: i for i, g in enumerate(cg.generators)}
    if P.hnf not in gen_idx:
        return rewrite_prime_over_T(lcg, P, caps)
    i = gen_idx[P.hnf]
    e = [1 if j == i else 0 for j in range(len(cg.generators))]
    m = cg.class_order(e)
    assert m % ell != 0, "l-divisible generator should already be in T"
    y = ideal_generator_search(ideal_pow(Ideal(P.field, P.hnf), m), caps)
    if y is None:
        raise CapsExceeded(f"no generator witness for {P}^{m}")
    d = log_divisor(as_word(y), lcg.ctx)
    # div~(y) = m P + (l-part): P = (1/m)(div~(y) - l-part) = -(1/m) l-part
    minv = pow(m, -1, mod)
    vec = [0] * len(lcg.places)
    for _k, (pl, c) in sorted(d.coeffs.items()):
        if pl.key() == key:
            assert c.residue(N) == m % mod
            continue
        j = order.get(pl.key())
        assert j is not None, "generator witness divisor leaves T"
        vec[j] = (vec[j] - minv * c.residue(N)) % mod
    lcg.rewrites[key] = vec
    return vec
