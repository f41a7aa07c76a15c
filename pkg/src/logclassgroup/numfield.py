"""Desk-scale absolute number field arithmetic.

Fields are given by a monic irreducible integer polynomial.  The integral
basis is found by checking the Dedekind criterion at every prime whose
square divides disc(f) and running a round-2 enlargement (sympy's
round_two) only where the criterion fails; the returned basis is verified
independently (ring closure, containment of the power order, and
disc(f) = index^2 * disc(K)).

Ideals are integer row lattices over the integral basis in canonical
Hermite normal form, so equal ideals compare bit-for-bit.  Prime
decomposition works through any generator whose index is prime to p;
genuinely unsupported index-divisor configurations raise instead of
guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy
from sympy import Poly, Symbol, ZZ

from .caps import Caps, DEFAULT_CAPS
from .errors import CapsExceeded, InputError, UnsupportedConfiguration
from .intlinalg import det_bareiss, row_hnf
from .padic import PadicScalar, hensel_lift_root, poly_eval_mod, val_int

_X = Symbol("x")


# ---------------------------------------------------------------------------
# polynomial plumbing


def parse_poly(text: str):
    """Monic integer polynomial in x -> coefficient list, lowest first."""
    try:
        expr = sympy.sympify(text.replace("^", "**"), rational=True)
        p = Poly(expr, _X)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError, SyntaxError) as e:
        raise InputError(f"cannot parse polynomial {text!r}: {e}")
    if not all(c.is_Integer for c in p.all_coeffs()):
        raise InputError(f"polynomial {text!r} has non-integer coefficients")
    coeffs = [int(c) for c in reversed(p.all_coeffs())]
    if coeffs[-1] != 1:
        raise InputError(f"polynomial {text!r} is not monic")
    return coeffs


def poly_to_str(coeffs) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(f"{c:+d}")
        else:
            xi = "x" if i == 1 else f"x^{i}"
            if c == 1:
                terms.append(f"+{xi}")
            elif c == -1:
                terms.append(f"-{xi}")
            else:
                terms.append(f"{c:+d}*{xi}")
    s = "".join(terms)
    return s[1:] if s.startswith("+") else s


def _sym_poly(coeffs):
    return Poly(list(reversed(coeffs)), _X, domain=ZZ)


def poly_disc(coeffs) -> int:
    return int(sympy.discriminant(_sym_poly(coeffs).as_expr(), _X))


def factor_mod_p(coeffs, p):
    """[(factor coeffs lowest-first monic, multiplicity)] of f mod p."""
    fp = Poly(list(reversed(coeffs)), _X, modulus=p, symmetric=False)
    _, factors = fp.factor_list()
    out = []
    for g, e in factors:
        cs = [int(c) % p for c in reversed(g.all_coeffs())]
        out.append((cs, int(e)))
    return out


# ---------------------------------------------------------------------------
# the field


class NumberField:
    """Absolute number field with a verified integral basis.

    basis_num / basis_den: row i of basis_num divided by basis_den gives
    the i-th integral basis element in power-basis coordinates; row 0 is 1.
    mult_table[i][j] is the (integer) coordinate vector of b_i * b_j.
    """

    def __init__(self, coeffs, basis_num, basis_den, disc, signature, index):
        self.coeffs = tuple(coeffs)
        self.n = len(coeffs) - 1
        self.basis_num = tuple(tuple(r) for r in basis_num)
        self.basis_den = basis_den
        self.disc = disc
        self.signature = signature
        self.index = index
        self._power_of_theta = self._theta_powers()
        self.mult_table = self._build_mult_table()
        self._decomp_cache = {}
        self._ideal_pow_cache = {}
        self.relative_quadratic = None  # optional compositum data
        self.label = poly_to_str(self.coeffs)

    # -- construction helpers

    def _theta_powers(self):
        """theta^k for k = 0..2n-2 reduced mod f, rational coords over the
        power basis (integer here since f is monic)."""
        n = self.n
        rows = [[0] * n for _ in range(2 * n - 1)]
        for k in range(n):
            rows[k][k] = 1
        f = self.coeffs
        for k in range(n, 2 * n - 1):
            prev = rows[k - 1]
            shifted = [0] + prev[:-1]
            lead = prev[-1]
            rows[k] = [s - lead * f[j] for j, s in enumerate(shifted)]
        return rows

    def _mul_power_coords(self, a, b):
        """Product of two power-basis coordinate vectors, reduced mod f."""
        n = self.n
        conv = [0] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        conv[i + j] += ai * bj
        out = [0] * n
        for k, ck in enumerate(conv):
            if ck:
                for j in range(n):
                    out[j] += ck * self._power_of_theta[k][j]
        return out

    def _build_mult_table(self):
        n, d = self.n, self.basis_den
        pw_inv = self._power_to_basis_matrix()
        table = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1):
                prod_pw = self._mul_power_coords(self.basis_num[i], self.basis_num[j])
                # divide by den^2, convert to basis coords
                coords = _rat_vec_mat(
                    [Fraction(c, d * d) for c in prod_pw], pw_inv)
                ints = []
                for c in coords:
                    if c.denominator != 1:
                        raise InputError("claimed integral basis is not a ring")
                    ints.append(int(c))
                table[i][j] = table[j][i] = tuple(ints)
        return table

    def _power_to_basis_matrix(self):
        """Rational matrix converting power-basis coords to integral coords."""
        n, d = self.n, self.basis_den
        B = [[Fraction(self.basis_num[i][j], d) for j in range(n)]
             for i in range(n)]
        return _invert_rational(B)

    def power_to_basis(self, pw):
        return tuple(_rat_vec_mat([Fraction(c) for c in pw],
                                  self._power_to_basis_matrix_cached()))

    @lru_cache(maxsize=None)
    def _power_to_basis_matrix_cached(self):
        return tuple(tuple(r) for r in self._power_to_basis_matrix())

    def basis_to_power(self, coords):
        n, d = self.n, self.basis_den
        out = [Fraction(0)] * n
        for i, c in enumerate(coords):
            if c:
                for j in range(n):
                    out[j] += Fraction(c) * Fraction(self.basis_num[i][j], d)
        return out

    # -- elements

    def zero(self):
        return AlgebraicNum(self, (Fraction(0),) * self.n)

    def one(self):
        return AlgebraicNum(self, (Fraction(1),) + (Fraction(0),) * (self.n - 1))

    def from_rational(self, q):
        return AlgebraicNum(self, (Fraction(q),) + (Fraction(0),) * (self.n - 1))

    def theta(self):
        return self.from_power((0, 1) + (0,) * (self.n - 2)) if self.n > 1 \
            else self.zero()

    def from_power(self, pw):
        return AlgebraicNum(self, self.power_to_basis(list(pw)))

    def from_basis_ints(self, vec):
        return AlgebraicNum(self, tuple(Fraction(v) for v in vec))

    def __repr__(self):
        return f"NumberField({self.label})"

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)


def _rat_vec_mat(vec, mat):
    n = len(mat)
    return [sum(vec[i] * mat[i][j] for i in range(n)) for j in range(len(mat[0]))]


def _invert_rational(m):
    n = len(m)
    a = [[Fraction(m[i][j]) for j in range(n)] +
         [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if a[i][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        d = a[col][col]
        a[col] = [x / d for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                q = a[i][col]
                a[i] = [x - q * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


class AlgebraicNum:
    """Element of a field, coordinates over the integral basis."""

    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = tuple(Fraction(c) for c in coords)

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coords)

    @property
    def is_integral(self):
        return all(c.denominator == 1 for c in self.coords)

    def int_coords(self):
        assert self.is_integral
        return [int(c) for c in self.coords]

    def __add__(self, o):
        return AlgebraicNum(self.field, [a + b for a, b in zip(self.coords, o.coords)])

    def __sub__(self, o):
        return AlgebraicNum(self.field, [a - b for a, b in zip(self.coords, o.coords)])

    def __neg__(self):
        return AlgebraicNum(self.field, [-a for a in self.coords])

    def scale(self, q):
        return AlgebraicNum(self.field, [Fraction(q) * a for a in self.coords])

    def __mul__(self, o):
        K = self.field
        out = [Fraction(0)] * K.n
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        t = K.mult_table[i][j]
                        ab = a * b
                        for k in range(K.n):
                            if t[k]:
                                out[k] += ab * t[k]
        return AlgebraicNum(K, out)

    def mul_matrix(self):
        """Matrix of multiplication by self over the integral basis."""
        K = self.field
        cols = []
        for j in range(K.n):
            ej = [Fraction(0)] * K.n
            for i, a in enumerate(self.coords):
                if a:
                    t = K.mult_table[i][j]
                    for k in range(K.n):
                        if t[k]:
                            ej[k] += a * t[k]
            cols.append(ej)
        return [[cols[j][i] for j in range(K.n)] for i in range(K.n)]

    def inverse(self):
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        K = self.field
        M = self.mul_matrix()
        inv = _invert_rational(M)
        return AlgebraicNum(K, [inv[i][0] for i in range(K.n)])

    def __truediv__(self, o):
        return self * o.inverse()

    def pow(self, k: int):
        if k < 0:
            return self.inverse().pow(-k)
        r = self.field.one()
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def norm(self) -> Fraction:
        K = self.field
        if K.n == 1:
            return self.coords[0]
        if self.is_integral:
            return Fraction(norm_int_vec(K, self.int_coords()))
        den = 1
        for c in self.coords:
            den = den * c.denominator // _gcd(den, c.denominator)
        scaled = [int(c * den) for c in self.coords]
        return Fraction(norm_int_vec(K, scaled), den ** K.n)

    def trace(self) -> Fraction:
        M = self.mul_matrix()
        return sum(M[i][i] for i in range(self.field.n))

    def min_poly(self):
        """Monic minimal polynomial, lowest-first rational coefficients."""
        M = sympy.Matrix(self.mul_matrix())
        p = M.charpoly(_X)
        factors = sympy.factor_list(p.as_expr())[1]
        cands = []
        for g, _ in factors:
            pg = Poly(g, _X)
            coeffs = [Fraction(sympy.Rational(c)) for c in reversed(pg.all_coeffs())]
            lead = coeffs[-1]
            coeffs = [c / lead for c in coeffs]
            if _eval_poly_alg(coeffs, self).is_zero:
                cands.append(coeffs)
        return min(cands, key=len)

    def __eq__(self, o):
        return isinstance(o, AlgebraicNum) and self.field == o.field \
            and self.coords == o.coords

    def __hash__(self):
        return hash((self.field.coeffs, self.coords))

    def __repr__(self):
        return f"AlgebraicNum({list(self.coords)} over {self.field.label})"


def _eval_poly_alg(coeffs, x: AlgebraicNum):
    acc = x.field.zero()
    for c in reversed(coeffs):
        acc = acc * x + x.field.from_rational(c)
    return acc


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def norm_int_vec(K: NumberField, vec) -> int:
    """Norm of an integral element given by integer coordinates (fast path)."""
    n = K.n
    if n == 1:
        return vec[0]
    if n == 2:
        # N(a*1 + b*w) = a^2 + Tr(w) ab + N(w) b^2, w the second basis element
        nw, tw = _quad_norm_coeffs(K)
        a, b = vec
        return a * a + tw * a * b + nw * b * b
    cols = [[0] * n for _ in range(n)]
    for i, a in enumerate(vec):
        if a:
            for j in range(n):
                t = K.mult_table[i][j]
                for k in range(n):
                    if t[k]:
                        cols[j][k] += a * t[k]
    return det_bareiss([[cols[j][i] for j in range(n)] for i in range(n)])


@lru_cache(maxsize=None)
def _quad_norm_coeffs(K: NumberField):
    w = K.from_basis_ints([0, 1])
    mp = w.min_poly()
    assert len(mp) == 3
    return int(mp[0]), -int(mp[1])  # x^2 + c1 x + c0 -> (c0, trace=-c1)


# ---------------------------------------------------------------------------
# integral basis: Dedekind criterion + round-2 fallback


def dedekind_maximal_at(coeffs, p) -> bool:
    """Dedekind criterion: is Z[theta] p-maximal?"""
    factors = factor_mod_p(coeffs, p)
    g_bar = Poly([1], _X, modulus=p, symmetric=False)
    for cs, _e in factors:
        g_bar = g_bar * Poly(list(reversed(cs)), _X, modulus=p, symmetric=False)
    f_bar = Poly(list(reversed(coeffs)), _X, modulus=p, symmetric=False)
    h_bar = f_bar.quo(g_bar)
    g_lift = [int(c) % p for c in reversed(g_bar.all_coeffs())]
    h_lift = [int(c) % p for c in reversed(h_bar.all_coeffs())]
    gh = _poly_mul_int(g_lift, h_lift)
    diff = [(a - b) for a, b in zip(_pad(gh, len(coeffs)), coeffs)]
    assert all(c % p == 0 for c in diff)
    F = [c // p for c in diff]
    Fp = Poly(list(reversed(F)), _X, modulus=p, symmetric=False)
    gcd1 = sympy.gcd(Fp, g_bar)
    gcd2 = sympy.gcd(gcd1, h_bar)
    return gcd2.degree() == 0


def _poly_mul_int(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pad(a, n):
    return a + [0] * (n - len(a)) if len(a) < n else a


def build_field(coeffs, caps: Caps = DEFAULT_CAPS) -> NumberField:
    """Construct a field with verified integral basis.  See module docstring."""
    if isinstance(coeffs, str):
        coeffs = parse_poly(coeffs)
    n = len(coeffs) - 1
    if n < 1:
        raise InputError("constant polynomial")
    if coeffs[-1] != 1:
        raise InputError("not monic")
    if n > caps.degree:
        raise CapsExceeded(f"degree {n} beyond cap {caps.degree}")
    sp = _sym_poly(coeffs)
    if n > 1 and not sp.is_irreducible:
        raise InputError(f"{poly_to_str(coeffs)} is reducible")
    if n == 1:
        return NumberField(coeffs, [[1]], 1, 1, (1, 0), 1)
    disc_f = poly_disc(coeffs)
    if disc_f == 0:
        raise InputError("zero discriminant")
    if abs(disc_f) > max(caps.disc ** 2, 10 ** 16):
        raise CapsExceeded(f"|disc(f)| = {abs(disc_f)} too large to factor")
    bad = [p for p, e in sympy.factorint(abs(disc_f)).items() if e >= 2]
    maximal = all(dedekind_maximal_at(coeffs, p) for p in bad)
    if maximal:
        basis_num = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        den = 1
        disc_K = disc_f
        index = 1
    else:
        try:
            basis_num, den = _round2_basis(coeffs)
        except Exception:
            basis_num, den = _saturated_order(coeffs, bad)
        B = [[Fraction(basis_num[i][j], den) for j in range(n)] for i in range(n)]
        detB = _rat_det(B)
        index_fr = 1 / abs(detB)
        if index_fr.denominator != 1:
            raise InputError("round-2 basis does not contain the power order")
        index = int(index_fr)
        if disc_f % (index * index):
            raise InputError("round-2 basis fails disc(f) = index^2 disc(K)")
        disc_K = disc_f // (index * index)
    if abs(disc_K) > caps.disc:
        raise CapsExceeded(f"|disc| = {abs(disc_K)} beyond cap {caps.disc}")
    r1 = sp.count_roots()
    K = NumberField(coeffs, basis_num, den, disc_K, (int(r1), (n - int(r1)) // 2),
                    index)
    _verify_basis(K, disc_f)
    return K


def _round2_basis(coeffs):
    """Integral basis from sympy round_two, as HNF rows over the power basis.

    The Submodule matrix holds generators as columns.  The HNF rows are
    transformed so the first basis element is 1 (den * e0 is primitive in
    the lattice since 1 is primitive in O_K).  Ring closure and the
    disc(f) = index^2 disc(K) check downstream guard the result."""
    from sympy.polys.numberfields.basis import round_two
    from .intlinalg import smith_normal_form_int, solve_int, mat_mul
    ZK, _dK = round_two(_sym_poly(coeffs))
    n = len(coeffs) - 1
    den = int(ZK.denom)
    raw = [[int(x) for x in row] for row in ZK.matrix.to_list()]
    gens = [[raw[i][j] for i in range(n)] for j in range(n)]
    hnf = row_hnf(gens, n)
    if len(hnf) != n:
        raise InputError("round-2 basis is not full rank")
    target = [den] + [0] * (n - 1)
    c = solve_int([[hnf[i][j] for i in range(n)] for j in range(n)], target)
    if c is None:
        raise InputError("1 not in the round-2 lattice")
    divs, _U1, V = smith_normal_form_int([c])
    if divs != [1]:
        raise InputError("den * 1 is not primitive in the round-2 lattice")
    # U = V^{-1} is unimodular with first row +-c, so (U * hnf)[0] = +-den*e0
    Uinv_rows = _int_inverse_unimodular(V)
    rows = mat_mul(Uinv_rows, hnf)
    if rows[0] == [-x for x in target]:
        rows[0] = target
    assert rows[0] == target
    # deterministic tidy-up: reduce later rows' first coordinate mod den
    for i in range(1, n):
        q = rows[i][0] // den
        if q:
            rows[i] = [x - q * y for x, y in zip(rows[i], rows[0])]
        if any(rows[i]) and next(x for x in rows[i] if x) < 0:
            rows[i] = [-x for x in rows[i]]
    return rows, den


def _saturated_order(coeffs, bad_primes):
    """Maximal order by direct p-saturation: repeatedly adjoin any integral
    element of (1/p) * O.  Complete because a non-p-maximal order always
    contains one (the quotient O_max/O has an element of order p).
    Exponential in n per round (p^n cosets), fine at desk scale."""
    n = len(coeffs) - 1
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    den = 1
    for p in sorted(bad_primes):
        while True:
            found = _find_p_integral(coeffs, rows, den, p, n)
            if found is None:
                break
            rows = [[x * p for x in row] for row in rows]
            den *= p
            rows.append(found)
            rows = row_hnf(rows, n)
            if len(rows) != n:
                raise InputError("saturation lost rank")
            g = den
            for r in rows:
                for x in r:
                    g = _gcd(g, x)
            if g > 1:
                rows = [[x // g for x in r] for r in rows]
                den //= g
    return _one_first(rows, den, n), den


def _find_p_integral(coeffs, rows, den, p, n):
    """An integer row vector v (over the current den-scaled basis rows)
    with (v . rows)/(p*den) integral and not in the current order."""
    import itertools
    for cvec in itertools.product(range(p), repeat=n):
        if all(c == 0 for c in cvec):
            continue
        # y = (sum c_i b_i)/p; y in the current order iff c = 0 mod p
        pw = [Fraction(sum(cvec[i] * rows[i][j] for i in range(n)), p * den)
              for j in range(n)]
        if _power_coords_integral(coeffs, pw, n):
            return [int(c * p * den) for c in pw]
    return None


def _power_coords_integral(coeffs, pw, n):
    """Is the element with rational power coords integral?  (charpoly of the
    regular representation has integer coefficients)"""
    if all(c.denominator == 1 for c in pw):
        return True
    # multiplication matrix in power coordinates
    powers = _theta_power_rows(coeffs, n)
    cols = []
    for j in range(n):
        acc = [Fraction(0)] * n
        for i, c in enumerate(pw):
            if c:
                k = i + j
                for t in range(n):
                    acc[t] += c * powers[k][t]
        cols.append(acc)
    M = sympy.Matrix([[cols[j][i] for j in range(n)] for i in range(n)])
    cp = M.charpoly(_X)
    return all(sympy.Rational(c).q == 1 for c in cp.all_coeffs())


@lru_cache(maxsize=None)
def _theta_power_rows_cached(coeffs_t, n):
    f = list(coeffs_t)
    rows = [[0] * n for _ in range(2 * n - 1)]
    for k in range(n):
        rows[k][k] = 1
    for k in range(n, 2 * n - 1):
        prev = rows[k - 1]
        shifted = [0] + prev[:-1]
        lead = prev[-1]
        rows[k] = [s - lead * f[j] for j, s in enumerate(shifted)]
    return tuple(tuple(r) for r in rows)


def _theta_power_rows(coeffs, n):
    return _theta_power_rows_cached(tuple(coeffs), n)


def _one_first(rows, den, n):
    """Unimodular transform so the first basis row is den * e0 (element 1)."""
    from .intlinalg import smith_normal_form_int, solve_int, mat_mul
    target = [den] + [0] * (n - 1)
    if rows[0] == target:
        return rows
    c = solve_int([[rows[i][j] for i in range(n)] for j in range(n)], target)
    if c is None:
        raise InputError("1 not in the order lattice")
    divs, _U1, V = smith_normal_form_int([c])
    if divs != [1]:
        raise InputError("den * 1 not primitive in the order lattice")
    out = mat_mul(_int_inverse_unimodular(V), rows)
    if out[0] == [-x for x in target]:
        out[0] = target
    assert out[0] == target
    for i in range(1, n):
        q = out[i][0] // den
        if q:
            out[i] = [x - q * y for x, y in zip(out[i], out[0])]
        if any(out[i]) and next(x for x in out[i] if x) < 0:
            out[i] = [-x for x in out[i]]
    return out


def _int_inverse_unimodular(V):
    from .intlinalg import det_bareiss, solve_int
    n = len(V)
    assert abs(det_bareiss(V)) == 1
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = solve_int(V, e)
        cols.append(x)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _rat_det(m):
    import copy
    a = [row[:] for row in m]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        d = a[col][col]
        for i in range(col + 1, n):
            if a[i][col]:
                q = a[i][col] / d
                a[i] = [x - q * y for x, y in zip(a[i], a[col])]
    return det


def _verify_basis(K: NumberField, disc_f: int):
    """Independent checks that the claimed basis is the maximal order."""
    # ring closure was checked when the mult table was built (integrality);
    # check disc relation via the trace form
    n = K.n
    tr = [[(K.from_basis_ints([1 if t == i else 0 for t in range(n)]) *
            K.from_basis_ints([1 if t == j else 0 for t in range(n)])).trace()
           for j in range(n)] for i in range(n)]
    d = _rat_det(tr)
    if d != K.disc:
        raise InputError(f"basis discriminant {d} != claimed {K.disc}")
    if disc_f % K.disc:
        raise InputError("disc(f) not divisible by disc(K)")
    q = disc_f // K.disc
    r = _isqrt(abs(q))
    if r * r != abs(q):
        raise InputError("index^2 = disc(f)/disc(K) is not a square")


def _isqrt(n):
    import math
    return math.isqrt(n)


# ---------------------------------------------------------------------------
# ideals


class Ideal:
    """Nonzero integral ideal as canonical HNF rows over the integral basis."""

    __slots__ = ("field", "hnf", "p", "f_deg", "e_ram", "gen2")

    def __init__(self, field, hnf, p=None, f_deg=None, e_ram=None, gen2=None):
        self.field = field
        self.hnf = tuple(tuple(r) for r in hnf)
        self.p = p
        self.f_deg = f_deg
        self.e_ram = e_ram
        self.gen2 = gen2

    @property
    def is_prime_data(self):
        return self.p is not None

    @property
    def norm(self) -> int:
        acc = 1
        for i, row in enumerate(self.hnf):
            acc *= row[i]
        return acc

    def contains_vec(self, vec) -> bool:
        """Membership for integer coordinate vectors.  Rows are upper
        echelon with pivot (i, i), so eliminate forward: coordinate i is
        settled by row i once rows before it are subtracted."""
        v = list(vec)
        for i in range(len(v)):
            d = self.hnf[i][i]
            if v[i] % d:
                return False
            q = v[i] // d
            if q:
                v = [x - q * y for x, y in zip(v, self.hnf[i])]
        return not any(v)

    def contains(self, x: AlgebraicNum) -> bool:
        return x.is_integral and self.contains_vec(x.int_coords())

    def __eq__(self, o):
        return isinstance(o, Ideal) and self.field == o.field and self.hnf == o.hnf

    def __hash__(self):
        return hash((self.field.coeffs, self.hnf))

    def key(self):
        return (self.p or 0, self.hnf)

    def __repr__(self):
        if self.is_prime_data:
            return f"PrimeIdeal(p={self.p}, f={self.f_deg}, e={self.e_ram})"
        return f"Ideal(norm={self.norm})"

    def to_json(self):
        d = {"hnf": [list(r) for r in self.hnf]}
        if self.is_prime_data:
            d.update({"p": self.p, "f": self.f_deg, "e": self.e_ram})
        return d


def ideal_from_rows(field, rows) -> Ideal:
    hnf = row_hnf(rows, field.n)
    if len(hnf) != field.n:
        raise ValueError("rows do not span a full lattice (zero ideal?)")
    return Ideal(field, hnf)


def principal_ideal(field, x: AlgebraicNum) -> Ideal:
    assert x.is_integral and not x.is_zero
    vec = x.int_coords()
    rows = []
    n = field.n
    for j in range(n):
        row = [0] * n
        for i, a in enumerate(vec):
            if a:
                t = field.mult_table[i][j]
                for k in range(n):
                    row[k] += a * t[k]
        rows.append(row)
    return ideal_from_rows(field, rows)


def ideal_mul(a: Ideal, b: Ideal) -> Ideal:
    if a.field != b.field:
        raise InputError("ideals over different fields")
    K = a.field
    n = K.n
    rows = []
    for ra in a.hnf:
        for rb in b.hnf:
            row = [0] * n
            for i, x in enumerate(ra):
                if x:
                    for j, y in enumerate(rb):
                        if y:
                            t = K.mult_table[i][j]
                            xy = x * y
                            for k in range(n):
                                row[k] += xy * t[k]
            rows.append(row)
    return ideal_from_rows(K, rows)


def ideal_pow(a: Ideal, k: int) -> Ideal:
    K = a.field
    key = (a.hnf, k)
    hit = K._ideal_pow_cache.get(key)
    if hit is not None:
        return hit
    if k == 0:
        out = unit_ideal(K)
    elif k == 1:
        out = a
    else:
        half = ideal_pow(a, k // 2)
        out = ideal_mul(half, half)
        if k & 1:
            out = ideal_mul(out, a)
    K._ideal_pow_cache[key] = out
    return out


def unit_ideal(K) -> Ideal:
    return Ideal(K, [[1 if i == j else 0 for j in range(K.n)] for i in range(K.n)])


def rational_ideal(K, m: int) -> Ideal:
    return Ideal(K, [[m if i == j else 0 for j in range(K.n)] for i in range(K.n)])


# ---------------------------------------------------------------------------
# prime decomposition


def decompose_prime(K: NumberField, p: int):
    """Prime ideals above p with (e, f), via a generator of index prime to p."""
    if p in K._decomp_cache:
        return K._decomp_cache[p]
    if K.n == 1:
        out = [Ideal(K, [[p]], p=p, f_deg=1, e_ram=1, gen2=K.from_rational(p))]
        K._decomp_cache[p] = out
        return out
    eta, eta_coeffs = _generator_prime_to(K, p)
    factors = factor_mod_p(eta_coeffs, p)
    out = []
    for g_cs, e in factors:
        g_of_eta = _eval_poly_alg([Fraction(c) for c in g_cs], eta)
        rows = [list(r) for r in rational_ideal(K, p).hnf]
        assert g_of_eta.is_integral
        vec = g_of_eta.int_coords()
        for j in range(K.n):
            row = [0] * K.n
            for i, a in enumerate(vec):
                if a:
                    t = K.mult_table[i][j]
                    for k in range(K.n):
                        row[k] += a * t[k]
            rows.append(row)
        P = ideal_from_rows(K, rows)
        fd = len(g_cs) - 1
        assert P.norm == p ** fd, (P.norm, p, fd)
        out.append(Ideal(K, P.hnf, p=p, f_deg=fd, e_ram=e, gen2=g_of_eta))
    assert sum(P.e_ram * P.f_deg for P in out) == K.n
    # strong check: the product with multiplicities is exactly (p)
    prod = unit_ideal(K)
    for P in out:
        prod = ideal_mul(prod, ideal_pow(Ideal(K, P.hnf), P.e_ram))
    assert prod == rational_ideal(K, p), f"decomposition of {p} inconsistent"
    out.sort(key=lambda P: P.hnf)
    K._decomp_cache[p] = out
    return out


def _generator_prime_to(K: NumberField, p: int):
    """A primitive integral element eta with p not dividing [O_K : Z[eta]]."""
    cands = [K.theta()]
    n = K.n
    for i in range(1, n):
        cands.append(K.from_basis_ints([1 if t == i else 0 for t in range(n)]))
    for i in range(1, n):
        e_i = K.from_basis_ints([1 if t == i else 0 for t in range(n)])
        cands.append(e_i + K.theta())
        cands.append(e_i + e_i + K.theta())
        for j in range(1, i):
            e_j = K.from_basis_ints([1 if t == j else 0 for t in range(n)])
            cands.append(e_i + e_j)
            cands.append(e_i + e_j + K.theta())
    for eta in cands:
        if not eta.is_integral:
            continue
        mp = eta.min_poly()
        if len(mp) - 1 != n:
            continue
        if any(c.denominator != 1 for c in mp):
            continue
        mcs = [int(c) for c in mp]
        d_eta = poly_disc(mcs)
        if d_eta == 0:
            continue
        idx2 = d_eta // K.disc
        r = _isqrt(abs(idx2))
        if r * r != abs(idx2):
            continue
        if r % p:
            return eta, mcs
    raise UnsupportedConfiguration(
        f"no generator with index prime to {p} found for {K.label}")


def ideal_valuation(x: AlgebraicNum, P: Ideal) -> int:
    """v_P(x) for integral nonzero x (membership in successive powers)."""
    assert x.is_integral and not x.is_zero
    v = 0
    while ideal_pow(Ideal(P.field, P.hnf), v + 1).contains(x):
        v += 1
        if v > 4096:
            raise RuntimeError("runaway valuation")
    return v


def element_divisor(x: AlgebraicNum, caps: Caps = DEFAULT_CAPS):
    """Finite map Ideal -> int with (x) = prod P^v; x any nonzero element."""
    if x.is_zero:
        raise InputError("divisor of zero")
    K = x.field
    den = 1
    for c in x.coords:
        den = den * c.denominator // _gcd(den, c.denominator)
    y = x.scale(den)
    out = {}
    nm = int(y.norm())
    support = set(sympy.factorint(abs(nm)).keys()) | set(sympy.factorint(den).keys())
    for p in sorted(support):
        vp_den = val_int(den, p) if den % p == 0 else 0
        for P in decompose_prime(K, p):
            v = ideal_valuation(y, P) - P.e_ram * vp_den
            if v:
                out[P] = v
    # consistency: sum f_P v_P = v_p(N(x)) for every p
    nx = y.norm() / Fraction(den) ** K.n
    for p in sorted(support):
        want = val_int(nx.numerator, p) - val_int(nx.denominator, p) \
            if (nx.numerator % p == 0 or nx.denominator % p == 0) else 0
        got = sum(P.f_deg * v for P, v in out.items() if P.p == p)
        assert got == want, f"divisor inconsistent at {p}"
    return out


# ---------------------------------------------------------------------------
# local places above ell


@dataclass(frozen=True)
class LocalPlace:
    """A place above ell with an evaluator for the local norm into Q_ell."""
    field: NumberField
    ideal: Ideal
    ell: int
    local_degree: int
    kind: str          # 'rational' | 'root' | 'global' | 'relative2'
    data: tuple = ()

    def key(self):
        return (self.ell, self.ideal.hnf)

    def local_norm(self, x: AlgebraicNum, ndigits: int) -> PadicScalar:
        """N_{K_P/Q_ell}(x) to `ndigits` digits."""
        ell = self.ell
        if self.kind == "rational":
            return PadicScalar.from_fraction(x.coords[0], ell, ndigits)
        if self.kind == "global":
            return PadicScalar.from_fraction(x.norm(), ell, ndigits)
        if self.kind == "root":
            (root, prec) = self.data
            assert prec >= ndigits + 8
            pw = x.field.basis_to_power(x.coords)
            return _eval_at_root(pw, root, ell, ndigits)
        if self.kind == "relative2":
            (sub_idx, root, prec) = self.data
            rel = self.field.relative_quadratic
            a, b = rel.split_coords(x)
            delta = rel.delta_rational
            na = _eval_at_root(a, root, ell, ndigits + 4)
            nb = _eval_at_root(b, root, ell, ndigits + 4)
            d = PadicScalar.from_fraction(delta, ell, ndigits + 4)
            return (na * na - d * nb * nb).truncate_abs(
                min(na.abs_prec, nb.abs_prec, ndigits + 2))
        raise UnsupportedConfiguration(self.kind)


def _eval_at_root(pw_coords, root: int, ell: int, ndigits: int) -> PadicScalar:
    den = 1
    for c in pw_coords:
        den = den * Fraction(c).denominator
    mod = ell ** (ndigits + 8)
    acc = 0
    for c in reversed([Fraction(c) for c in pw_coords]):
        num = int(c * den)
        acc = (acc * root + num) % mod
    val = PadicScalar.from_int(acc, ell, ndigits + 8) if acc else \
        PadicScalar.zero(ell, ndigits + 8)
    res = val / PadicScalar.from_int(den, ell, ndigits + 8)
    return res.truncate_abs(ndigits + 4)


def places_above_ell(K: NumberField, ell: int, ndigits: int):
    """LocalPlace list for the supported configurations; explicit error
    otherwise."""
    if K.n == 1:
        P = decompose_prime(K, ell)[0]
        return [LocalPlace(K, P, ell, 1, "rational")]
    primes = decompose_prime(K, ell)
    if len(primes) == 1:
        P = primes[0]
        return [LocalPlace(K, P, ell, P.e_ram * P.f_deg, "global")]
    if all(P.e_ram == 1 and P.f_deg == 1 for P in primes) and len(primes) == K.n:
        return _split_places(K, ell, ndigits, primes)
    if K.relative_quadratic is not None:
        return _relative_places(K, ell, ndigits, primes)
    raise UnsupportedConfiguration(
        f"places of {K.label} above {ell}: mixed configuration not supported")


def _split_places(K, ell, ndigits, primes):
    prec = ndigits + 16
    roots = _lift_all_roots(list(K.coeffs), ell, prec, K.n)
    out = []
    for P in primes:
        # P = (ell, alpha) with v_P(alpha) >= 1 and v_Q(alpha) = 0 for the
        # siblings, so evaluating alpha at the matching root (and only
        # there) gives positive valuation
        alpha_pw = K.basis_to_power(P.gen2.coords)
        hit = None
        for r in roots:
            v = _eval_at_root(alpha_pw, r, ell, ndigits + 8)
            if v.is_zero or v.valuation >= 1:
                assert hit is None, "ambiguous root/place matching"
                hit = r
        assert hit is not None, "no root matches place"
        out.append(LocalPlace(K, P, ell, 1, "root", (hit, prec)))
    assert len({pl.data[0] for pl in out}) == len(out)
    return out


def _lift_all_roots(coeffs, ell, prec, want):
    """All simple Z_ell roots via brute start search + Hensel."""
    roots = []
    base = ell ** 6
    seen = set()
    for x0 in range(base):
        fx = poly_eval_mod(coeffs, x0, ell ** 12)
        if fx == 0:
            fv = 12
        else:
            fv = val_int(fx, ell)
        dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]
        dx = poly_eval_mod(dcoeffs, x0, ell ** 12)
        dv = 12 if dx == 0 else val_int(dx, ell)
        if fv > 2 * dv:
            r = hensel_lift_root(coeffs, ell, x0, prec)
            rk = r % ell ** 6
            if rk not in seen:
                seen.add(rk)
                roots.append(r)
    if len(roots) != want:
        raise UnsupportedConfiguration(
            f"expected {want} ell-adic roots, found {len(roots)}")
    return roots


def _relative_places(K, ell, ndigits, primes):
    rel = K.relative_quadratic
    sub = rel.sub
    sub_places = places_above_ell(sub, ell, ndigits)
    if not all(pl.kind == "root" for pl in sub_places):
        raise UnsupportedConfiguration(
            "relative place construction needs the subfield split")
    out = []
    prec = ndigits + 16
    for P in primes:
        below = None
        for pl in sub_places:
            alpha = pl.ideal.gen2
            if alpha is None:
                raise UnsupportedConfiguration("missing two-element generator")
            if P.contains(rel.embed(alpha)):
                below = pl
                break
        assert below is not None, "no subfield place under P"
        if P.e_ram * P.f_deg != 2:
            raise UnsupportedConfiguration(
                f"place above {ell} has local degree {P.e_ram * P.f_deg}, "
                "expected 2 over a split subfield place")
        root, rprec = below.data
        out.append(LocalPlace(K, P, ell, 2, "relative2",
                              (sub_places.index(below), root, rprec)))
    # distinct subfield places must pair with distinct L-places
    assert len({pl.data[0] for pl in out}) == len(out)
    return out


# ---------------------------------------------------------------------------
# quadratic compositum L = Q(sqrt d, sqrt m) with relative structure


class RelativeQuadratic:
    """L = sub(sqrt(delta)) for a quadratic subfield sub = Q(sqrt d) and a
    rational delta = m.  Provides the coordinate split x = a + b sqrt(m)
    with a, b in sub, and the embedding sub -> L."""

    def __init__(self, L, sub, d, m, to_radical_basis):
        self.L = L
        self.sub = sub
        self.d = d
        self.delta_rational = m
        # rational 4x4: gamma-power coords -> {1, sqrt d, sqrt m, sqrt dm}
        self._to_rad = to_radical_basis

    def radical_coords(self, x: "AlgebraicNum"):
        pw = self.L.basis_to_power(x.coords)
        return _rat_vec_mat(pw, self._to_rad)

    def split_coords(self, x: "AlgebraicNum"):
        """x = a + b*sqrt(m): power coords of a and b over sub = Q(sqrt d)."""
        c = self.radical_coords(x)
        return (c[0], c[1]), (c[2], c[3])

    def embed(self, a: "AlgebraicNum") -> "AlgebraicNum":
        assert a.field == self.sub
        pw = self.sub.basis_to_power(a.coords)
        return self.from_radical([pw[0], pw[1], 0, 0])

    def from_radical(self, rad):
        """Element from coords over {1, sqrt d, sqrt m, sqrt dm}."""
        inv = _invert_rational(self._to_rad)
        pw = _rat_vec_mat([Fraction(r) for r in rad], inv)
        return self.L.from_power(pw)

    @property
    def sqrt_d(self):
        return self.from_radical([0, 1, 0, 0])

    @property
    def sqrt_delta(self):
        return self.from_radical([0, 0, 1, 0])


def compose_quadratics(d: int, m: int, caps: Caps = DEFAULT_CAPS) -> NumberField:
    """The compositum Q(sqrt d, sqrt m) with generator sqrt d + sqrt m,
    carrying relative structure over Q(sqrt d)."""
    if d == m or d * m == 0:
        raise InputError("need two distinct nonzero radicands")
    f = [(d - m) ** 2, 0, -2 * (d + m), 0, 1]
    L = build_field(f, caps)
    sub = build_field([-d, 0, 1], caps)
    # gamma powers over {1, sqrt d, sqrt m, sqrt dm}:
    g0 = [1, 0, 0, 0]
    g1 = [0, 1, 1, 0]
    g2 = [d + m, 0, 0, 2]
    g3 = [0, d + 3 * m, 3 * d + m, 0]
    gamma_to_rad = [[Fraction(x) for x in row] for row in (g0, g1, g2, g3)]
    to_rad = gamma_to_rad  # row i = gamma^i in radical coords
    L.relative_quadratic = RelativeQuadratic(L, sub, d, m, to_rad)
    # sanity: sqrt_d^2 = d, sqrt_m^2 = m, gamma = sqrt_d + sqrt_m
    rel = L.relative_quadratic
    assert (rel.sqrt_d * rel.sqrt_d - L.from_rational(d)).is_zero
    assert (rel.sqrt_delta * rel.sqrt_delta - L.from_rational(m)).is_zero
    assert (rel.sqrt_d + rel.sqrt_delta - L.theta()).is_zero
    # classical biquadratic check: disc(L) = product of the three
    # quadratic subfield discriminants
    k = _squarefree_part(d * m)
    want = _quad_disc(d) * _quad_disc(m) * _quad_disc(k)
    assert L.disc == want, (L.disc, want)
    return L


def _squarefree_part(n: int) -> int:
    out = 1
    for p, e in sympy.factorint(abs(n)).items():
        if e % 2:
            out *= p
    return out * (1 if n > 0 else -1)


def _quad_disc(d: int) -> int:
    d = _squarefree_part(d)
    return d if d % 4 == 1 else 4 * d
