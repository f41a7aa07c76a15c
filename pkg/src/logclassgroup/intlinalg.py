"""Exact linear algebra over Z: Hermite/Smith forms, kernels, determinants.

Everything here is dense and small (desk scale); plain Python ints only.
Matrices are lists of row-lists.
"""

from __future__ import annotations


def mat_copy(m):
    return [row[:] for row in m]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rb = len(b)
    cb = len(b[0]) if rb else 0
    return [[sum(ra[k] * b[k][j] for k in range(rb)) for j in range(cb)]
            for ra in a]


def row_hnf(rows, ncols):
    """Canonical row Hermite normal form of the lattice spanned by `rows`.

    Returns a list of pivot rows (upper echelon, positive pivots, entries
    above a pivot reduced into [0, pivot)).  For a full-rank lattice in Z^n
    this is the canonical n x n upper-triangular basis.
    """
    basis = []  # kept in echelon order by pivot column
    for vec in (r[:] for r in rows if any(r)):
        while vec is not None:
            piv = next((j for j, x in enumerate(vec) if x), None)
            if piv is None:
                break
            hit = next((b for b in basis if b[1] == piv), None)
            if hit is None:
                if vec[piv] < 0:
                    vec = [-x for x in vec]
                basis.append((vec, piv))
                basis.sort(key=lambda t: t[1])
                break
            brow = hit[0]
            a, b = brow[piv], vec[piv]
            if b % a == 0:
                q = b // a
                vec = [x - q * y for x, y in zip(vec, brow)]
            else:
                g, u, v = _xgcd(a, b)
                new = [u * x + v * y for x, y in zip(brow, vec)]
                rep = [(-(b // g)) * x + (a // g) * y for x, y in zip(brow, vec)]
                basis[basis.index(hit)] = (new, piv)
                vec = rep
    # reduce entries above pivots; ascending order keeps earlier pivot
    # columns untouched (row i is zero left of its own pivot)
    basis_rows = [b[0] for b in basis]
    pivots = [b[1] for b in basis]
    for i in range(1, len(basis_rows)):
        p = pivots[i]
        d = basis_rows[i][p]
        for k in range(i):
            q = basis_rows[k][p] // d
            if q:
                basis_rows[k] = [x - q * y for x, y in zip(basis_rows[k], basis_rows[i])]
    return basis_rows


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def det_bareiss(m):
    """Exact determinant (fraction-free Gaussian elimination)."""
    a = mat_copy(m)
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def smith_normal_form_int(m):
    """Smith normal form over Z with transforms: U * M * V = D.

    Returns (divisors, U, V) with the nonzero divisors in divisibility order.
    """
    a = mat_copy(m)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    U = identity(rows)
    V = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def addmul_row(dst, src, c):
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def addmul_col(dst, src, c):
        for r in a:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    t = 0
    while t < min(rows, cols):
        # find a nonzero pivot of least absolute value
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    addmul_row(i, t, -q)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    addmul_col(j, t, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
        # enforce divisibility: pivot must divide the rest of the block
        piv = a[t][t]
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % piv:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            addmul_row(t, offender, 1)
            continue
        t += 1
    for i in range(min(rows, cols)):
        if a[i][i] < 0:
            for j in range(cols):
                a[i][j] = -a[i][j]
            for j in range(rows):
                U[i][j] = -U[i][j]
    divisors = [a[i][i] for i in range(min(rows, cols))]
    return divisors, U, V


def integer_kernel(m):
    """Basis of the integer kernel {x : M x = 0}, columns as vectors."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    # column-style HNF on the transpose, tracking the transform
    work = [[m[i][j] for i in range(rows)] for j in range(cols)]  # rows = columns of M
    T = identity(cols)
    basis = row_hnf_tracked(work, T)
    kern = [T[i] for i in range(len(basis)) if not any(basis[i])]
    # row_hnf_tracked returns aligned (reduced rows, transform rows)
    return kern


def row_hnf_tracked(rows, transform):
    """In-place style HNF of `rows` with the same row ops applied to
    `transform`; returns the reduced rows (transform mutated in place).
    Zero rows (kernel directions) are kept, after the nonzero ones."""
    n = len(rows)
    work = [(rows[i][:], transform[i][:]) for i in range(n)]
    done = []  # (vec, tr, pivot)
    for vec, tr in work:
        while True:
            piv = next((j for j, x in enumerate(vec) if x), None)
            if piv is None:
                done.append((vec, tr, None))
                break
            hit = next((d for d in done if d[2] == piv), None)
            if hit is None:
                if vec[piv] < 0:
                    vec = [-x for x in vec]
                    tr = [-x for x in tr]
                done.append((vec, tr, piv))
                break
            hvec, htr, _ = hit
            a, b = hvec[piv], vec[piv]
            if b % a == 0:
                q = b // a
                vec = [x - q * y for x, y in zip(vec, hvec)]
                tr = [x - q * y for x, y in zip(tr, htr)]
            else:
                g, u, v = _xgcd(a, b)
                idx = done.index(hit)
                new_vec = [u * x + v * y for x, y in zip(hvec, vec)]
                new_tr = [u * x + v * y for x, y in zip(htr, tr)]
                rep_vec = [(-(b // g)) * x + (a // g) * y for x, y in zip(hvec, vec)]
                rep_tr = [(-(b // g)) * x + (a // g) * y for x, y in zip(htr, tr)]
                done[idx] = (new_vec, new_tr, piv)
                vec, tr = rep_vec, rep_tr
    done.sort(key=lambda d: (d[2] is None, d[2] if d[2] is not None else 0))
    out_rows = [d[0] for d in done]
    for i in range(n):
        transform[i] = done[i][1]
    return out_rows


def preimage_lattice(phi, lam):
    """Basis of {v in Z^s : phi * v lies in the column lattice of lam}.

    phi is g x s, lam is g x r (columns spanning the sublattice).
    """
    g = len(phi)
    s = len(phi[0]) if g else 0
    r = len(lam[0]) if g and lam else 0
    stacked = [[phi[i][j] for j in range(s)] + [lam[i][j] for j in range(r)]
               for i in range(g)]
    kern = integer_kernel(stacked)
    proj = [k[:s] for k in kern]
    basis = row_hnf(proj, s)
    return basis


def solve_int(m, b):
    """One integer solution x of M x = b, or None (M arbitrary shape)."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    aug = [[m[i][j] for i in range(rows)] for j in range(cols)]
    T = identity(cols)
    red = row_hnf_tracked(aug, T)  # rows of red = images of transformed gens
    # Now solve sum c_i red_i = b by echelon descent.
    target = b[:]
    coeff = [0] * len(red)
    for i, row in enumerate(red):
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            continue
        if target[piv] % row[piv]:
            return None
        q = target[piv] // row[piv]
        coeff[i] = q
        target = [x - q * y for x, y in zip(target, row)]
    if any(target):
        return None
    x = [0] * cols
    for i, c in enumerate(coeff):
        if c:
            x = [xi + c * ti for xi, ti in zip(x, T[i])]
    return x
