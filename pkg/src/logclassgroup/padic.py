"""Fixed-precision arithmetic in Q_l.

A scalar is stored as l^val * unit with the unit known to `ndigits`
l-adic digits, i.e. the value is known modulo l^(val + ndigits).  A value
indistinguishable from 0 keeps only its absolute precision bound.
Arithmetic never claims more digits than the inputs support; cancellation
in subtraction shortens the unit part accordingly.

The logarithm is the Iwasawa one: Log(l) = 0, Log(root of unity) = 0,
and on principal units the usual convergent series.  This is the
convention under which principal logarithmic divisors have degree zero,
so it is fixed globally here.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import MixedPrimes, ZeroAtPrecision

DEFAULT_PRECISION = 64
# digits forgiven in equality assertions (series truncation + linear algebra headroom)
SLACK_DIGITS = 4
# extra working digits used internally by compound computations
GUARD_DIGITS = 16


def val_int(n: int, ell: int) -> int:
    """l-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


class PadicScalar:
    """An element of Q_l known modulo l^(val + ndigits).

    Nonzero: value = ell^val * unit, unit in [1, ell^ndigits) coprime to ell.
    Zero-at-precision: unit == 0, ndigits == 0, val = absolute precision bound.
    """

    __slots__ = ("ell", "val", "unit", "ndigits")

    def __init__(self, ell: int, val: int, unit: int, ndigits: int):
        if unit == 0:
            ndigits = 0
        else:
            mod = ell ** ndigits
            unit %= mod
            if unit == 0:
                raise ValueError("unit part vanished; construct zero explicitly")
            if unit % ell == 0:
                raise ValueError("unit part not coprime to ell")
        self.ell = ell
        self.val = val
        self.unit = unit
        self.ndigits = ndigits

    # ----- constructors -------------------------------------------------

    @classmethod
    def zero(cls, ell: int, abs_prec: int) -> "PadicScalar":
        return cls(ell, abs_prec, 0, 0)

    @classmethod
    def from_int(cls, n: int, ell: int, ndigits: int = DEFAULT_PRECISION) -> "PadicScalar":
        if n == 0:
            return cls.zero(ell, ndigits)
        v = val_int(n, ell)
        return cls(ell, v, (n // ell ** v) % ell ** ndigits, ndigits)

    @classmethod
    def from_fraction(cls, q, ell: int, ndigits: int = DEFAULT_PRECISION) -> "PadicScalar":
        q = Fraction(q)
        if q == 0:
            return cls.zero(ell, ndigits)
        num, den = q.numerator, q.denominator
        vn = val_int(num, ell)
        vd = val_int(den, ell)
        mod = ell ** ndigits
        u = (num // ell ** vn) * pow(den // ell ** vd, -1, mod) % mod
        return cls(ell, vn - vd, u, ndigits)

    @classmethod
    def one(cls, ell: int, ndigits: int = DEFAULT_PRECISION) -> "PadicScalar":
        return cls(ell, 0, 1, ndigits)

    # ----- basic queries ------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def abs_prec(self) -> int:
        """Value is known modulo ell**abs_prec."""
        return self.val + self.ndigits

    @property
    def valuation(self):
        """Exact valuation, or None when the value is 0 at precision."""
        return None if self.is_zero else self.val

    def lift(self):
        """Canonical representative, as int (val >= 0) or Fraction."""
        if self.is_zero:
            return 0
        if self.val >= 0:
            return self.unit * self.ell ** self.val
        return Fraction(self.unit, self.ell ** (-self.val))

    def residue(self, abs_digits: int) -> int:
        """Canonical representative mod ell**abs_digits (requires val >= 0)."""
        if self.is_zero:
            if self.val < abs_digits:
                raise ZeroAtPrecision(
                    f"zero known only to O({self.ell}^{self.val}), need {abs_digits}")
            return 0
        if self.val < 0:
            raise ValueError("negative valuation has no integer residue")
        if self.abs_prec < abs_digits:
            raise ZeroAtPrecision(
                f"value known mod {self.ell}^{self.abs_prec}, need {abs_digits}")
        return (self.unit * self.ell ** self.val) % self.ell ** abs_digits

    def truncate(self, ndigits: int) -> "PadicScalar":
        """Drop to at most `ndigits` digits of unit-part precision."""
        if self.is_zero:
            return self
        if ndigits >= self.ndigits:
            return self
        if ndigits <= 0:
            return PadicScalar.zero(self.ell, self.val)
        u = self.unit % self.ell ** ndigits
        if u == 0:
            # canonical unit had l-divisible truncation; cannot happen since
            # unit is coprime to l
            raise AssertionError
        return PadicScalar(self.ell, self.val, u, ndigits)

    def truncate_abs(self, abs_digits: int) -> "PadicScalar":
        """Forget knowledge beyond ell**abs_digits."""
        if self.is_zero:
            return PadicScalar.zero(self.ell, min(self.val, abs_digits))
        if self.val >= abs_digits:
            return PadicScalar.zero(self.ell, abs_digits)
        return self.truncate(abs_digits - self.val)

    # ----- arithmetic ---------------------------------------------------

    def _check(self, other: "PadicScalar"):
        if self.ell != other.ell:
            raise MixedPrimes(f"{self.ell} vs {other.ell}")

    def __add__(self, other: "PadicScalar") -> "PadicScalar":
        self._check(other)
        ell = self.ell
        P = min(self.abs_prec, other.abs_prec)
        if self.is_zero and other.is_zero:
            return PadicScalar.zero(ell, P)
        if self.is_zero:
            return other.truncate_abs(P)
        if other.is_zero:
            return self.truncate_abs(P)
        m = min(self.val, other.val)
        rel = P - m
        if rel <= 0:
            return PadicScalar.zero(ell, P)
        mod = ell ** rel
        s = (self.unit * ell ** (self.val - m) +
             other.unit * ell ** (other.val - m)) % mod
        if s == 0:
            return PadicScalar.zero(ell, P)
        v = val_int(s, ell)
        if m + v >= P:
            return PadicScalar.zero(ell, P)
        return PadicScalar(ell, m + v, s // ell ** v, rel - v)

    def __neg__(self) -> "PadicScalar":
        if self.is_zero:
            return self
        return PadicScalar(self.ell, self.val,
                           self.ell ** self.ndigits - self.unit, self.ndigits)

    def __sub__(self, other: "PadicScalar") -> "PadicScalar":
        return self + (-other)

    def __mul__(self, other: "PadicScalar") -> "PadicScalar":
        self._check(other)
        ell = self.ell
        if self.is_zero or other.is_zero:
            a = self.val if self.is_zero else self.valuation
            b = other.val if other.is_zero else other.valuation
            return PadicScalar.zero(ell, a + b)
        nd = min(self.ndigits, other.ndigits)
        return PadicScalar(ell, self.val + other.val,
                           self.unit * other.unit % ell ** nd, nd)

    def __truediv__(self, other: "PadicScalar") -> "PadicScalar":
        self._check(other)
        if other.is_zero:
            raise ZeroAtPrecision("division by zero-at-precision")
        ell = self.ell
        if self.is_zero:
            return PadicScalar.zero(ell, self.val - other.val)
        nd = min(self.ndigits, other.ndigits)
        mod = ell ** nd
        u = self.unit * pow(other.unit % mod, -1, mod) % mod
        return PadicScalar(ell, self.val - other.val, u, nd)

    def __pow__(self, k: int) -> "PadicScalar":
        if k == 0:
            return PadicScalar.one(self.ell, max(self.ndigits, 1))
        if self.is_zero:
            if k < 0:
                raise ZeroAtPrecision("inverting zero-at-precision")
            return PadicScalar.zero(self.ell, self.val * k)
        base = self if k > 0 else PadicScalar.one(self.ell, self.ndigits) / self
        mod = self.ell ** base.ndigits
        return PadicScalar(self.ell, base.val * abs(k),
                           pow(base.unit, abs(k), mod), base.ndigits)

    def scale_pow(self, k: int) -> "PadicScalar":
        """Multiply by ell**k (exact, no precision cost)."""
        if self.is_zero:
            return PadicScalar.zero(self.ell, self.val + k)
        return PadicScalar(self.ell, self.val + k, self.unit, self.ndigits)

    # ----- comparison ---------------------------------------------------

    def eq_at_prec(self, other: "PadicScalar", slack: int = SLACK_DIGITS) -> bool:
        """Equality of known values, forgiving `slack` trailing digits."""
        self._check(other)
        d = self - other
        if d.is_zero:
            return True
        bound = min(self.abs_prec, other.abs_prec) - slack
        return d.val >= bound

    def is_zero_at(self, slack: int = SLACK_DIGITS) -> bool:
        if self.is_zero:
            return True
        return self.val >= self.abs_prec - slack

    def __eq__(self, other):
        if not isinstance(other, PadicScalar):
            return NotImplemented
        return (self.ell, self.val, self.unit, self.ndigits) == \
               (other.ell, other.val, other.unit, other.ndigits)

    def __hash__(self):
        return hash((self.ell, self.val, self.unit, self.ndigits))

    # ----- rendering ----------------------------------------------------

    def digits(self):
        ds, u = [], self.unit
        for _ in range(self.ndigits):
            u, r = divmod(u, self.ell)
            ds.append(r)
        return ds

    def render(self) -> str:
        """Digit-string form, e.g. "3^1 * (1 + 2*3^2) + O(3^9)"."""
        ell = self.ell
        if self.is_zero:
            return f"O({ell}^{self.val})"
        terms = []
        for i, d in enumerate(self.digits()):
            if d == 0:
                continue
            if i == 0:
                terms.append(str(d))
            elif i == 1:
                terms.append(f"{d}*{ell}")
            else:
                terms.append(f"{d}*{ell}^{i}")
        body = " + ".join(terms)
        return f"{ell}^{self.val} * ({body}) + O({ell}^{self.abs_prec})"

    _ZERO_RE = re.compile(r"^O\((\d+)\^(-?\d+)\)$")
    _FULL_RE = re.compile(r"^(\d+)\^(-?\d+) \* \((.*)\) \+ O\(\d+\^(-?\d+)\)$")
    _TERM_RE = re.compile(r"^(\d+)(?:\*(\d+)(?:\^(\d+))?)?$")

    @classmethod
    def parse(cls, s: str) -> "PadicScalar":
        s = s.strip()
        m = cls._ZERO_RE.match(s)
        if m:
            return cls.zero(int(m.group(1)), int(m.group(2)))
        m = cls._FULL_RE.match(s)
        if not m:
            raise ValueError(f"unparseable scalar: {s!r}")
        ell, v, body, bound = int(m.group(1)), int(m.group(2)), m.group(3), int(m.group(4))
        unit = 0
        for term in body.split(" + "):
            tm = cls._TERM_RE.match(term.strip())
            if not tm:
                raise ValueError(f"unparseable term: {term!r}")
            d = int(tm.group(1))
            if tm.group(2) is None:
                exp = 0
            elif tm.group(3) is None:
                if int(tm.group(2)) != ell:
                    raise ValueError("base mismatch")
                exp = 1
            else:
                if int(tm.group(2)) != ell:
                    raise ValueError("base mismatch")
                exp = int(tm.group(3))
            unit += d * ell ** exp
        return cls(ell, v, unit, bound - v)

    def __repr__(self):
        return f"PadicScalar({self.render()})"


# ----- Iwasawa logarithm and Teichmueller lift --------------------------


def _log_principal(t_int: int, ell: int, abs_prec: int) -> int:
    """log(1+t) mod ell**abs_prec for t = t_int with v(t) >= 1 (>= 3 if ell=2).

    Sums the alternating series exactly in integers; truncates at the first
    index n with v(t^n / n) >= abs_prec + 2, which guarantees the requested
    digits.
    """
    if t_int == 0:
        return 0
    vt = val_int(t_int, ell)
    if ell == 2 and vt < 3 or vt < 1:
        raise ValueError("series needs a principal unit")
    # generous working modulus: room for the worst 1/n division
    n_max = (abs_prec + 2) // vt + 1
    fudge = 1
    while ell ** fudge <= n_max:
        fudge += 1
    B = abs_prec + fudge + 2
    modB = ell ** B
    t = t_int % modB
    acc = 0
    power = 1
    n = 1
    while n * vt - _val_bounded(n, ell) < abs_prec + 2:
        power = power * t % modB
        vn = val_int(n, ell) if n % ell == 0 else 0
        term = power * pow(n // ell ** vn, -1, modB) % modB
        term //= ell ** vn
        acc += term if n % 2 == 1 else -term
        n += 1
    return acc % ell ** abs_prec


def _val_bounded(n: int, ell: int) -> int:
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def iwasawa_log(x: PadicScalar, ndigits: int | None = None) -> PadicScalar:
    """Log_l(x) with Log(l) = 0 and Log(roots of unity) = 0.

    A general unit u is reduced to a principal one via u^(l-1) (odd l) or
    u^2 (l = 2), and the exponent divided back out.
    """
    if x.is_zero:
        raise ZeroAtPrecision("log of zero-at-precision")
    ell = x.ell
    # Log ignores the ell-power part entirely.
    N_in = x.ndigits
    target = N_in if ndigits is None else min(ndigits + GUARD_DIGITS, N_in)
    if ell == 2:
        # u^2 is known mod 2^(N+1): gains the digit the final /2 costs.
        A = target
        mod = 2 ** (A + 2)
        u2 = pow(x.unit % mod, 2, mod)
        s = _log_principal(u2 - 1, 2, A + 1)
        half = PadicScalar.from_int(2, 2, A + 4)
        res = _int_to_scalar(s, 2, A + 1) / half
    else:
        A = target
        mod = ell ** (A + 1)
        up = pow(x.unit % mod, ell - 1, mod)
        s = _log_principal(up - 1, ell, A)
        s = s * pow(ell - 1, -1, ell ** A) % ell ** A
        res = _int_to_scalar(s, ell, A)
    if ndigits is not None:
        res = res.truncate(ndigits)
    return res


def _int_to_scalar(n: int, ell: int, abs_prec: int) -> PadicScalar:
    n %= ell ** abs_prec
    if n == 0:
        return PadicScalar.zero(ell, abs_prec)
    v = val_int(n, ell)
    return PadicScalar(ell, v, n // ell ** v, abs_prec - v)


def teichmuller(x: PadicScalar) -> PadicScalar:
    """The root-of-unity representative of a unit: w(x) == x mod l,
    w^(l-1) = 1 (odd l), w in {1, -1} (l = 2)."""
    if x.is_zero or x.val != 0:
        raise ValueError("teichmuller needs a unit")
    ell, N = x.ell, x.ndigits
    mod = ell ** N
    if ell == 2:
        w = 1 if x.unit % 4 == 1 else mod - 1
        return PadicScalar(2, 0, w, N)
    w = x.unit % mod
    while True:
        w2 = pow(w, ell, mod)
        if w2 == w:
            return PadicScalar(ell, 0, w, N)
        w = w2


# ----- Hensel lifting helpers (used by local places) ---------------------


def poly_eval_mod(coeffs, x: int, mod: int) -> int:
    """Evaluate sum(coeffs[i] * x^i) mod `mod` (coeffs lowest degree first)."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % mod
    return acc


def hensel_lift_root(coeffs, ell: int, root0: int, abs_prec: int) -> int:
    """Lift an approximate root of an integer polynomial to mod ell**abs_prec.

    Requires v(f(root0)) > 2 v(f'(root0)) (classical Hensel condition);
    handles the t = v(f'(x)) > 0 case needed for square roots at 2.
    """
    dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]
    fp0 = poly_eval_mod(dcoeffs, root0, ell ** (abs_prec + 8))
    if fp0 == 0:
        raise ValueError("derivative vanishes at start")
    t = val_int(fp0, ell)
    M = ell ** (abs_prec + 2 * t + 8)
    x = root0 % M
    f0 = poly_eval_mod(coeffs, x, M)
    if f0 != 0 and val_int(f0, ell) <= 2 * t:
        raise ValueError("Hensel condition fails at start")
    for _ in range(200):
        fx = poly_eval_mod(coeffs, x, M)
        if fx % ell ** (abs_prec + t) == 0:
            return x % ell ** abs_prec
        fpx = poly_eval_mod(dcoeffs, x, M)
        w = fpx // ell ** t
        x = (x - (fx // ell ** t) * pow(w, -1, M) ) % M
    raise ValueError("Hensel iteration did not converge")


def sqrt_2adic(a: int, abs_prec: int) -> int:
    """Square root of an odd integer a = 1 mod 8 in Z_2, mod 2**abs_prec."""
    if a % 8 != 1:
        raise ValueError("no 2-adic square root")
    return hensel_lift_root([-a, 0, 1], 2, 1, abs_prec)
