"""Exact integer matrices: Smith/Hermite forms and kernels mod p^n.

Everything is arbitrary-precision; no floating point enters anywhere in this
package. Matrices are immutable tuples of tuples, row-major.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UsageError


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix with positive dimensions."""

    rows: int
    cols: int
    entries: tuple  # tuple of row tuples

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise UsageError("matrix dimensions must be positive")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise UsageError("entry shape does not match declared dimensions")
        for r in self.entries:
            for x in r:
                if not isinstance(x, int):
                    raise UsageError("entries must be exact integers")

    @staticmethod
    def from_rows(rows) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        return IntMatrix(len(rows), len(rows[0]) if rows else 0, rows)

    @staticmethod
    def identity(k: int) -> "IntMatrix":
        return IntMatrix.from_rows([[1 if i == j else 0 for j in range(k)] for i in range(k)])

    @staticmethod
    def zero(r: int, c: int) -> "IntMatrix":
        return IntMatrix.from_rows([[0] * c for _ in range(r)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([[self.entries[i][j] for i in range(self.rows)]
                                    for j in range(self.cols)])

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise UsageError("dimension mismatch in matrix product")
        ot = other.transpose().entries
        return IntMatrix.from_rows(
            [[sum(a * b for a, b in zip(r, c)) for c in ot] for r in self.entries])

    def mul_vec(self, v):
        if len(v) != self.cols:
            raise UsageError("dimension mismatch in matrix-vector product")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.entries)

    def is_diagonal(self) -> bool:
        return all(self.entries[i][j] == 0
                   for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal(self):
        return tuple(self.entries[i][i] for i in range(min(self.rows, self.cols)))


def _det(rows):
    # Bareiss fraction-free determinant on a list-of-lists copy.
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def det(M: IntMatrix) -> int:
    if M.rows != M.cols:
        raise UsageError("determinant of a non-square matrix")
    return _det(M.entries)


def smith_normal_form(M: IntMatrix):
    """Return (U, S, V) with U*M*V = S in Smith normal form.

    U, V are unimodular; S is diagonal with non-negative entries forming a
    divisibility chain d1 | d2 | ... Pivoting is deterministic: the nonzero
    entry of smallest absolute value, first occurrence (row-major) on ties.
    """
    r, c = M.rows, M.cols
    a = [list(row) for row in M.entries]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    v = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    def row_op(i1, i2, q):
        # row i2 -= q * row i1
        a[i2] = [x - q * y for x, y in zip(a[i2], a[i1])]
        u[i2] = [x - q * y for x, y in zip(u[i2], u[i1])]

    def col_op(j1, j2, q):
        for row in a:
            row[j2] -= q * row[j1]
        for row in v:
            row[j2] -= q * row[j1]

    def swap_rows(i1, i2):
        a[i1], a[i2] = a[i2], a[i1]
        u[i1], u[i2] = u[i2], u[i1]

    def swap_cols(j1, j2):
        for row in a:
            row[j1], row[j2] = row[j2], row[j1]
        for row in v:
            row[j1], row[j2] = row[j2], row[j1]

    def pivot(t):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                x = a[i][j]
                if x != 0 and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        return best

    t = 0
    while t < min(r, c):
        pos = pivot(t)
        if pos is None:
            break
        swap_rows(t, pos[0])
        swap_cols(t, pos[1])
        # Clear row and column t; the pivot may shrink, so loop.
        while True:
            cleared = True
            for i in range(t + 1, r):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    row_op(t, i, q)
                    if a[i][t] != 0:  # remainder became the smaller pivot
                        swap_rows(t, i)
                        cleared = False
            for j in range(t + 1, c):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_op(t, j, q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        cleared = False
            if cleared:
                break
        t += 1

    # Enforce the divisibility chain d_i | d_{i+1}.
    k = min(r, c)
    changed = True
    while changed:
        changed = False
        for i in range(k - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if dj % (di if di else 1) != 0 or (di == 0 and dj != 0):
                # Standard trick: fold entry (i+1,i+1) into row i and re-clear.
                col_op(i + 1, i, -1)  # col i += col i+1
                while True:
                    # one elimination round on the 2x2 block
                    if a[i + 1][i] == 0:
                        break
                    if a[i][i] == 0 or abs(a[i + 1][i]) < abs(a[i][i]):
                        swap_rows(i, i + 1)
                    q = a[i + 1][i] // a[i][i]
                    row_op(i, i + 1, q)
                for j in range(i + 1, c):
                    if a[i][j] != 0:
                        q = a[i][j] // a[i][i]
                        col_op(i, j, q)
                        if a[i][j] != 0:
                            swap_cols(i, j)
                changed = True
    # Normalize signs.
    for i in range(k):
        if a[i][i] < 0:
            for j in range(c):
                a[i][j] = -a[i][j]
            for j in range(r):
                u[i][j] = -u[i][j]

    U = IntMatrix.from_rows(u)
    S = IntMatrix.from_rows(a)
    V = IntMatrix.from_rows(v)
    return U, S, V


def kernel_basis(M: IntMatrix):
    """Integer basis of ker(M) = {x : M x = 0}, as a tuple of column vectors.

    The basis spans the kernel lattice saturatedly (V unimodular).
    """
    U, S, V = smith_normal_form(M)
    k = min(M.rows, M.cols)
    rank = sum(1 for i in range(k) if S.entries[i][i] != 0)
    cols = []
    for j in range(rank, M.cols):
        cols.append(tuple(V.entries[i][j] for i in range(M.cols)))
    return tuple(cols)


def solve(M: IntMatrix, b):
    """One integer solution x of M x = b, or None if there is none."""
    U, S, V = smith_normal_form(M)
    c = U.mul_vec(tuple(b))
    y = [0] * M.cols
    k = min(M.rows, M.cols)
    for i in range(M.rows):
        d = S.entries[i][i] if i < k else 0
        if i < k and d != 0:
            if c[i] % d != 0:
                return None
            y[i] = c[i] // d
        elif c[i] != 0:
            return None
    return V.mul_vec(tuple(y))


def rank(M: IntMatrix) -> int:
    _, S, _ = smith_normal_form(M)
    return sum(1 for d in S.diagonal() if d != 0)


# ---------------------------------------------------------------------------
# Linear algebra over Z/p^n.  Entries are plain ints reduced mod p^n; pivots
# are chosen with minimal p-valuation so the diagonal form is diag(p^{a_i}).
# ---------------------------------------------------------------------------

def _val(x: int, p: int, n: int) -> int:
    if x % (p ** n) == 0:
        return n
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def diagonalize_mod(M: IntMatrix, p: int, n: int):
    """Return (U, diag, V) over Z/p^n with U*M*V ≡ diag(p^{a_1}, ...) mod p^n.

    U and V are invertible mod p^n. Used for kernels and solving where the
    integer Smith form would blow up entries.
    """
    q = p ** n
    r, c = M.rows, M.cols
    a = [[x % q for x in row] for row in M.entries]
    u = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    v = [[1 if i == j else 0 for j in range(c)] for i in range(c)]

    t = 0
    while t < min(r, c):
        # minimal-valuation pivot
        best = None
        bv = n
        for i in range(t, r):
            for j in range(t, c):
                if a[i][j] % q != 0:
                    w = _val(a[i][j], p, n)
                    if w < bv:
                        bv, best = w, (i, j)
        if best is None:
            break
        i0, j0 = best
        a[t], a[i0] = a[i0], a[t]
        u[t], u[i0] = u[i0], u[t]
        for row in a:
            row[t], row[j0] = row[j0], row[t]
        for row in v:
            row[t], row[j0] = row[j0], row[t]
        piv = a[t][t]
        unit = piv // (p ** bv)
        inv_unit = pow(unit, -1, q)
        # scale row t so the pivot is exactly p^bv
        a[t] = [(x * inv_unit) % q for x in a[t]]
        u[t] = [(x * inv_unit) % q for x in u[t]]
        for i in range(t + 1, r):
            if a[i][t] % q:
                f = a[i][t] // (p ** bv)  # divisible: pivot has minimal valuation
                a[i] = [(x - f * y) % q for x, y in zip(a[i], a[t])]
                u[i] = [(x - f * y) % q for x, y in zip(u[i], u[t])]
        for j in range(t + 1, c):
            if a[t][j] % q:
                f = a[t][j] // (p ** bv)
                for row in a:
                    row[j] = (row[j] - f * row[t]) % q
                for row in v:
                    row[j] = (row[j] - f * row[t]) % q
        t += 1
    return (IntMatrix.from_rows(u), IntMatrix.from_rows(a), IntMatrix.from_rows(v))


def kernel_mod(M: IntMatrix, p: int, n: int):
    """Basis of {x mod p^n : M x ≡ 0 mod p^n} as column tuples.

    Returns generators x_k = p^{n-a_k} * (unit column) for diagonal entries
    p^{a_k}, plus free columns; every kernel element is a Z/p^n-combination.
    """
    q = p ** n
    U, Dg, V = diagonalize_mod(M, p, n)
    gens = []
    k = min(M.rows, M.cols)
    for j in range(M.cols):
        if j < k:
            d = Dg.entries[j][j] % q
            aj = _val(d, p, n) if d else n
        else:
            aj = 0  # beyond diagonal: column of zeros, free variable
        if j >= k:
            coeff = 1
        elif aj == 0:
            continue  # unit pivot: no kernel contribution
        else:
            coeff = p ** (n - aj)
        gens.append(tuple((coeff * V.entries[i][j]) % q for i in range(M.cols)))
    return tuple(gens)


def solve_mod(M: IntMatrix, b, p: int, n: int):
    """One solution x of M x ≡ b mod p^n, or None."""
    q = p ** n
    U, Dg, V = diagonalize_mod(M, p, n)
    c = [x % q for x in U.mul_vec(tuple(b))]
    y = [0] * M.cols
    k = min(M.rows, M.cols)
    for i in range(M.rows):
        d = Dg.entries[i][i] % q if i < k else 0
        if d:
            a = _val(d, p, n)
            if c[i] % (p ** a) != 0:
                return None
            y[i] = (c[i] // (p ** a)) % q
        elif c[i] % q != 0:
            return None
    return tuple(x % q for x in V.mul_vec(tuple(y)))
