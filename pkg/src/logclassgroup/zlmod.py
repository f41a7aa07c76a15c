"""Exact linear algebra over Z/l^N: Smith normal form, solving, presentations.

Z/l^N is a local ring, so SNF needs no gcd steps: pivot on an entry of
minimal l-valuation (then smallest row-major index, for reproducible
output), normalize it to a power of l, and eliminate.  Every elementary
divisor is a power of l; a divisor indistinguishable from 0 mod l^N is
reported as *free at precision*, never asserted exactly free -- finite
precision cannot tell Z_l from Z/l^M with M >= N.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .padic import val_int


def _val(x: int, ell: int, N: int) -> int:
    return N if x == 0 else min(val_int(x, ell), N)


class ZlMatrix:
    """Dense matrix with entries reduced mod ell**ndigits."""

    __slots__ = ("ell", "ndigits", "rows", "cols", "a")

    def __init__(self, ell: int, ndigits: int, entries):
        self.ell = ell
        self.ndigits = ndigits
        mod = ell ** ndigits
        self.a = [[x % mod for x in row] for row in entries]
        self.rows = len(self.a)
        self.cols = len(self.a[0]) if self.a else 0

    @classmethod
    def zeros(cls, ell, ndigits, rows, cols):
        return cls(ell, ndigits, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, ell, ndigits, n):
        return cls(ell, ndigits, [[1 if i == j else 0 for j in range(n)]
                                  for i in range(n)])

    def copy(self):
        return ZlMatrix(self.ell, self.ndigits, self.a)

    def mul(self, other: "ZlMatrix") -> "ZlMatrix":
        assert self.cols == other.rows
        mod = self.ell ** self.ndigits
        out = [[sum(self.a[i][k] * other.a[k][j] for k in range(self.cols)) % mod
                for j in range(other.cols)] for i in range(self.rows)]
        return ZlMatrix(self.ell, self.ndigits, out)

    def mul_vec(self, vec):
        mod = self.ell ** self.ndigits
        return [sum(self.a[i][k] * vec[k] for k in range(self.cols)) % mod
                for i in range(self.rows)]

    def transpose(self):
        return ZlMatrix(self.ell, self.ndigits,
                        [[self.a[i][j] for i in range(self.rows)]
                         for j in range(self.cols)])

    def det_unit(self) -> bool:
        """True when det is a unit mod ell (exact integer determinant)."""
        from .intlinalg import det_bareiss
        return det_bareiss(self.a) % self.ell != 0

    def to_json(self):
        return {"ell": self.ell, "ndigits": self.ndigits,
                "rows": self.rows, "cols": self.cols,
                "entries": [x for row in self.a for x in row]}

    @classmethod
    def from_json(cls, obj):
        r, c = obj["rows"], obj["cols"]
        flat = obj["entries"]
        return cls(obj["ell"], obj["ndigits"],
                   [flat[i * c:(i + 1) * c] for i in range(r)])

    def __eq__(self, other):
        return (isinstance(other, ZlMatrix) and self.ell == other.ell
                and self.ndigits == other.ndigits and self.a == other.a)

    def __repr__(self):
        return f"ZlMatrix(ell={self.ell}, N={self.ndigits}, {self.a})"


@dataclass
class ModuleDecomposition:
    """Invariant factors of a finitely presented Z/l^N module.

    torsion_exponents are the a_i with l^a_1 | ... | l^a_k, 0 < a_i < N;
    free_rank counts generators free at precision (divisor = 0 mod l^N).
    """
    ell: int
    ndigits: int
    free_rank: int
    torsion_exponents: list
    U: "ZlMatrix" = None
    V: "ZlMatrix" = None
    diag_exponents: list = field(default_factory=list)  # full diagonal of D

    @property
    def torsion_order_exp(self) -> int:
        return sum(self.torsion_exponents)

    @property
    def exponent(self) -> int:
        """Exponent a of the torsion part (largest invariant), 0 if none."""
        return max(self.torsion_exponents, default=0)

    def invariants_json(self):
        return {
            "ell": self.ell, "ndigits": self.ndigits,
            "free_rank_at_precision": self.free_rank,
            "torsion_elementary_divisor_exponents": sorted(self.torsion_exponents),
        }


def smith_normal_form(A: ZlMatrix):
    """U, V, D with U*A*V = D diagonal, diagonal entries powers of l in
    divisibility order; U, V invertible mod l^N.  Returns (D, U, V)."""
    ell, N = A.ell, A.ndigits
    mod = ell ** N
    a = [row[:] for row in A.a]
    rows, cols = A.rows, A.cols
    U = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    V = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    for t in range(min(rows, cols)):
        # minimal-valuation pivot, ties by smallest (row, col)
        best, bestv = None, N
        for i in range(t, rows):
            for j in range(t, cols):
                v = _val(a[i][j], ell, N)
                if v < bestv:
                    best, bestv = (i, j), v
        if best is None or bestv >= N:
            break
        bi, bj = best
        if bi != t:
            a[t], a[bi] = a[bi], a[t]
            U[t], U[bi] = U[bi], U[t]
        if bj != t:
            for r in a:
                r[t], r[bj] = r[bj], r[t]
            for r in V:
                r[t], r[bj] = r[bj], r[t]
        piv = a[t][t]
        pv = bestv
        # normalize pivot to l^pv  (multiply row by the inverse of its unit)
        w = pow(piv // ell ** pv, -1, mod)
        a[t] = [x * w % mod for x in a[t]]
        U[t] = [x * w % mod for x in U[t]]
        # eliminate column and row: all entries have valuation >= pv
        for i in range(rows):
            if i != t and a[i][t]:
                q = a[i][t] // ell ** pv
                a[i] = [(x - q * y) % mod for x, y in zip(a[i], a[t])]
                U[i] = [(x - q * y) % mod for x, y in zip(U[i], U[t])]
        for j in range(cols):
            if j != t and a[t][j]:
                q = a[t][j] // ell ** pv
                for r in a:
                    r[j] = (r[j] - q * r[t]) % mod
                for r in V:
                    r[j] = (r[j] - q * r[t]) % mod
    D = ZlMatrix(ell, N, a)
    return D, ZlMatrix(ell, N, U), ZlMatrix(ell, N, V)


def decomposition_from_snf(D: ZlMatrix, U=None, V=None, generators=None):
    ell, N = D.ell, D.ndigits
    k = min(D.rows, D.cols)
    diag = [_val(D.a[i][i], ell, N) for i in range(k)]
    tors = [e for e in diag if 0 < e < N]
    free = sum(1 for e in diag if e >= N) + max(0, D.rows - k)
    dec = ModuleDecomposition(ell, N, free, sorted(tors), U, V, diag)
    return dec


def solve_linear(A: ZlMatrix, b):
    """Solve A x = b mod l^N; returns x or None (certified unsolvable).

    The certificate is the standard one: after transforming, the right-hand
    side must be divisible componentwise by the diagonal.
    """
    D, U, V = smith_normal_form(A)
    ell, N = A.ell, A.ndigits
    mod = ell ** N
    c = U.mul_vec([x % mod for x in b])
    y = [0] * A.cols
    k = min(A.rows, A.cols)
    for i in range(A.rows):
        di = D.a[i][i] if i < k else 0
        dv = _val(di, ell, N)
        ci = c[i] % mod
        if ci == 0:
            continue
        cv = _val(ci, ell, N)
        if cv < dv:
            return None
        if i >= k:
            return None
        y[i] = (ci // ell ** dv) % mod
    x = V.mul_vec(y)
    return x


def kernel_generators(A: ZlMatrix):
    """Generators of {x : A x = 0 mod l^N} (including torsion directions)."""
    D, U, V = smith_normal_form(A)
    ell, N = A.ell, A.ndigits
    k = min(A.rows, A.cols)
    gens = []
    for j in range(A.cols):
        dv = _val(D.a[j][j], ell, N) if j < k else N
        scale = ell ** (N - dv) if dv < N else 1
        vec = [V.a[i][j] * scale % ell ** N for i in range(A.cols)]
        if dv == 0 and scale == ell ** N:
            continue
        if any(vec):
            gens.append(vec)
    return gens


def quotient_presentation(gens: int, relation_columns, ell: int, ndigits: int):
    """Invariants of Z^gens / (column span) computed mod l^N.

    relation_columns: iterable of length-`gens` integer vectors.
    Returns (ModuleDecomposition, A) where A is the relation matrix whose
    columns were used (gens x ncols).
    """
    cols = list(relation_columns)
    if not cols:
        A = ZlMatrix.zeros(ell, ndigits, gens, 1)
    else:
        A = ZlMatrix(ell, ndigits, [[col[i] for col in cols] for i in range(gens)])
    D, U, V = smith_normal_form(A)
    dec = decomposition_from_snf(D, U, V)
    return dec, A


def generator_vectors(dec: ModuleDecomposition):
    """For each invariant-factor summand, a vector over the original
    generators mapping to that summand's generator (columns of U^-1)."""
    U = dec.U
    Uinv = invert_unimodular(U)
    out = []
    n = U.rows
    for i in range(min(n, len(dec.diag_exponents))):
        out.append([Uinv.a[r][i] for r in range(n)])
    for i in range(len(dec.diag_exponents), n):
        out.append([Uinv.a[r][i] for r in range(n)])
    return out


def invert_unimodular(M: ZlMatrix) -> ZlMatrix:
    """Inverse of a matrix invertible mod l (Gauss-Jordan over Z/l^N)."""
    ell, N, n = M.ell, M.ndigits, M.rows
    assert M.rows == M.cols
    mod = ell ** N
    a = [row[:] + [1 if i == j else 0 for j in range(n)]
         for i, row in enumerate(M.a)]
    for col in range(n):
        piv = next(i for i in range(col, n) if a[i][col] % ell != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = pow(a[col][col], -1, mod)
        a[col] = [x * inv % mod for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                q = a[i][col]
                a[i] = [(x - q * y) % mod for x, y in zip(a[i], a[col])]
    return ZlMatrix(ell, N, [row[n:] for row in a])
