"""Independent oracles used by the test suite.

These share no code with the package: rational-arithmetic series
summation, gcd-of-minors elementary divisors, reduced binary quadratic
form counting, and brute-force Pell search.  They stay deliberately slow
and obvious.
"""

from fractions import Fraction
from itertools import combinations
from math import isqrt


def vl(n: int, ell: int) -> int:
    v = 0
    n = abs(n)
    while n and n % ell == 0:
        n //= ell
        v += 1
    return v


def log_series_rational(t: int, ell: int, abs_digits: int):
    """log(1+t) summed with exact Fractions, reduced mod ell**abs_digits.

    Returns (valuation, unit residue) of the truncated sum; truncation at
    the first n with v(t^n/n) >= abs_digits + 2.
    """
    vt = vl(t, ell)
    acc = Fraction(0)
    n = 1
    while n * vt - vl(n, ell) < abs_digits + 2:
        acc += Fraction((-1) ** (n + 1) * t ** n, n)
        n += 1
    num, den = acc.numerator, acc.denominator
    vd = vl(den, ell)
    vn = vl(num, ell)
    den //= ell ** vd
    num //= ell ** vn
    v = vn - vd
    mod = ell ** abs_digits
    unit = num * pow(den, -1, mod) % mod
    return v, unit


def iwasawa_log_rational(u: int, ell: int, abs_digits: int):
    """Iwasawa log of an integer unit u, via u^(ell-1) (or u^2 at 2)."""
    if ell == 2:
        t = u * u - 1
        v, unit = log_series_rational(t, 2, abs_digits + 1)
        return v - 1, unit  # divide by 2
    t = u ** (ell - 1) - 1
    v, unit = log_series_rational(t, ell, abs_digits)
    inv = pow(ell - 1, -1, ell ** abs_digits)
    return v, (unit * inv) % ell ** abs_digits


def minors_divisor_valuations(entries, ell: int, N: int):
    """Products of elementary divisors via gcd of k x k minors, capped at N.

    Returns the list [v(d_1), v(d_1 d_2), ...] with each value capped at N,
    computed from exact integer minors of the canonical representatives.
    """
    rows = len(entries)
    cols = len(entries[0])
    out = []
    for k in range(1, min(rows, cols) + 1):
        best = None
        for rsel in combinations(range(rows), k):
            for csel in combinations(range(cols), k):
                sub = [[entries[i][j] for j in csel] for i in rsel]
                d = _det(sub)
                if d:
                    v = vl(d, ell)
                    if best is None or v < best:
                        best = v
        out.append(N if best is None else min(best, N))
    return out


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * _det(minor)
    return total


def reduced_forms_count(D: int) -> int:
    """Number of reduced primitive binary quadratic forms of discriminant
    D < 0: |a| <= sqrt(|D|/3), b^2-4ac = D, -a < b <= a <= c, b >= 0 if a == c."""
    assert D < 0 and D % 4 in (0, 1)
    count = 0
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            from math import gcd
            if gcd(gcd(a, abs(b)), c) != 1:
                continue
            count += 1
    return count


def pell_min_unit(d: int):
    """Smallest unit > 1 of Z[(1+sqrt d)/2] resp. Z[sqrt d], by brute force:
    least y with x^2 - d y^2 = +-4 (d = 1 mod 4) or +-1, returned as (x, y)
    meaning (x + y sqrt d)/2 resp. x + y sqrt d."""
    if d % 4 == 1:
        targets, den = (4, -4), 2
    else:
        targets, den = (1, -1), 1
    y = 1
    while True:
        xs = []
        for target in targets:
            x2 = d * y * y + target
            if x2 > 0:
                x = isqrt(x2)
                if x * x == x2:
                    xs.append(x)
        if xs:
            return min(xs), y, den
        y += 1
