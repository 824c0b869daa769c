"""Exact rank-4 rational lattices: Hermite bases, Gram forms, short vectors.

A lattice is stored as (denominator, 4x4 integer row-Hermite basis); all
arithmetic is integer or Fraction, never floating point. Short vectors are
enumerated by an exact Fincke-Pohst recursion with isqrt-based bounds.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from ..errors import InvariantViolationError, UsageError


def hnf_rows(rows, expect_rank=None):
    """Row Hermite normal form of an integer matrix given as lists.

    Positive pivots, entries above each pivot reduced into [0, pivot).
    Zero rows dropped. Deterministic.
    """
    m = [list(r) for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    res = []
    col = 0
    while col < ncols and m:
        # gcd-reduce all rows into one pivot at `col`
        live = [r for r in m if r[col] != 0]
        rest = [r for r in m if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            new_live = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                rr = [x - q * y for x, y in zip(r, piv)]
                if rr[col] != 0:
                    new_live.append(rr)
                elif any(rr):
                    rest.append(rr)
            live = new_live
        if live:
            piv = live[0]
            if piv[col] < 0:
                piv = [-x for x in piv]
            res.append(piv)
            m = rest
        else:
            m = rest
        col += 1
    # reduce above pivots, left to right so later columns stay reduced
    res = [r for r in res if any(r)]
    res.sort(key=lambda r: next(i for i, x in enumerate(r) if x))
    for i in range(len(res)):
        pcol = next(c for c, x in enumerate(res[i]) if x)
        for j in range(i):
            q = res[j][pcol] // res[i][pcol]
            if q:
                res[j] = [x - q * y for x, y in zip(res[j], res[i])]
    if expect_rank is not None and len(res) != expect_rank:
        raise InvariantViolationError(f"expected rank {expect_rank}, got {len(res)}")
    return res


def integer_kernel(equation_rows):
    """Kernel of an integer equation system, via Hermite reduction.

    equation_rows: m rows of length n; returns basis vectors x (length n)
    with each row · x = 0. Entry growth stays Hermite-bounded, unlike a
    Smith-form route.
    """
    if not equation_rows:
        return []
    m = len(equation_rows)
    n = len(equation_rows[0])
    aug = []
    for i in range(n):
        row = [equation_rows[r][i] for r in range(m)] + [0] * n
        row[m + i] = 1
        aug.append(row)
    red = hnf_rows(aug)
    out = []
    for row in red:
        if all(x == 0 for x in row[:m]):
            out.append(tuple(row[m:]))
    return out


class Lattice4:
    """Full-rank lattice in Q^4 with canonical (denominator, HNF rows) form."""

    __slots__ = ("den", "rows")

    def __init__(self, den, rows, reduce=True):
        if reduce:
            rows = hnf_rows(rows, expect_rank=4)
        rows = [list(map(int, r)) for r in rows]
        den = int(den)
        if den <= 0:
            raise UsageError("denominator must be positive")
        g = den
        for r in rows:
            for x in r:
                g = gcd(g, x)
        if g > 1:
            den //= g
            rows = [[x // g for x in r] for r in rows]
        self.den = den
        self.rows = tuple(tuple(r) for r in rows)

    @staticmethod
    def from_fraction_rows(rows):
        """Build from generator rows of Fractions (or ints); any count >= 4."""
        den = 1
        for r in rows:
            for x in r:
                den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
        int_rows = [[int(Fraction(x) * den) for x in r] for r in rows]
        return Lattice4(den, int_rows)

    def key(self):
        return (self.den, self.rows)

    def __eq__(self, other):
        return isinstance(other, Lattice4) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def basis_fractions(self):
        return [[Fraction(x, self.den) for x in r] for r in self.rows]

    def contains(self, vec) -> bool:
        """Membership of a rational 4-vector, via the triangular basis."""
        v = [Fraction(x) * self.den for x in vec]
        for row in self.rows:
            pcol = next(c for c, x in enumerate(row) if x)
            q = v[pcol] / row[pcol]
            if q.denominator != 1:
                return False
            v = [a - q * b for a, b in zip(v, row)]
        return all(x == 0 for x in v)

    def coordinates(self, vec):
        """Integer coordinates of vec in this basis, or None."""
        v = [Fraction(x) * self.den for x in vec]
        coords = []
        for row in self.rows:
            pcol = next(c for c, x in enumerate(row) if x)
            q = v[pcol] / row[pcol]
            if q.denominator != 1:
                return None
            coords.append(int(q))
            v = [a - q * b for a, b in zip(v, row)]
        if any(x != 0 for x in v):
            return None
        return tuple(coords)

    def covolume(self) -> Fraction:
        d = 1
        for i, row in enumerate(self.rows):
            d *= row[self._pivot(i)]
        return Fraction(d, self.den ** 4)

    def _pivot(self, i):
        return next(c for c, x in enumerate(self.rows[i]) if x)

    def index_in(self, other: "Lattice4") -> Fraction:
        """[other : self] as a positive rational (integer when self ⊆ other)."""
        return self.covolume() / other.covolume()

    def scaled(self, c) -> "Lattice4":
        c = Fraction(c)
        return Lattice4(self.den * c.denominator,
                        [[x * c.numerator for x in r] for r in self.rows])

    def sum(self, other: "Lattice4") -> "Lattice4":
        den = self.den * other.den // gcd(self.den, other.den)
        rows = [[x * (den // self.den) for x in r] for r in self.rows]
        rows += [[x * (den // other.den) for x in r] for r in other.rows]
        return Lattice4(den, rows)

    def intersection(self, other: "Lattice4") -> "Lattice4":
        den = self.den * other.den // gcd(self.den, other.den)
        a = [[x * (den // self.den) for x in r] for r in self.rows]
        b = [[x * (den // other.den) for x in r] for r in other.rows]
        # solve u*a = v*b; kernel vectors give u (first 4 coordinates) and v
        cols = []
        for c in range(4):
            cols.append([a[i][c] for i in range(4)] + [-b[i][c] for i in range(4)])
        ker = integer_kernel(cols)
        rows = []
        for vec in ker:
            u = vec[:4]
            rows.append([sum(u[i] * a[i][c] for i in range(4)) for c in range(4)])
        return Lattice4(den, rows)


def preimage_lattice(lat: Lattice4, mat_cols):
    """{x : M x ∈ lat} for an invertible rational 4x4 matrix M (column action).

    mat_cols is M as a list of rows of Fractions; returns a Lattice4.
    """
    minv = invert4(mat_cols)
    # lattice rows are vectors v; preimage basis rows are (M^{-1} v^T)^T
    rows = []
    for r in lat.basis_fractions():
        rows.append([sum(minv[i][j] * r[j] for j in range(4)) for i in range(4)])
    return Lattice4.from_fraction_rows(rows)


def invert4(m):
    """Exact inverse of a 4x4 matrix of Fractions via Gauss-Jordan."""
    n = 4
    a = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise UsageError("matrix not invertible")
        a[col], a[piv] = a[piv], a[col]
        d = a[col][col]
        a[col] = [x / d for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _floor_sqrt_frac(fr: Fraction) -> int:
    """floor(sqrt(fr)) for fr >= 0."""
    if fr < 0:
        raise UsageError("negative radicand")
    return isqrt(fr.numerator * fr.denominator) // fr.denominator


def lagrange_reduce(gram):
    """Greedy pairwise reduction of an integer Gram matrix (optimal in dim <= 4).

    Returns (reduced, U) with reduced = U^T gram U and U unimodular; original
    vectors are recovered as U @ x.
    """
    n = len(gram)
    g = [list(r) for r in gram]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    guard = 0
    changed = True
    while changed and guard < 1000:
        changed = False
        guard += 1
        for i in range(n):
            for j in range(n):
                if i == j or g[i][i] == 0:
                    continue
                # nearest integer to g[i][j] / g[i][i] (diagonal positive)
                mu = (2 * g[i][j] + g[i][i]) // (2 * g[i][i])
                if mu:
                    for k in range(n):
                        g[k][j] -= mu * g[k][i]
                    for k in range(n):
                        g[j][k] -= mu * g[i][k]
                    for k in range(n):
                        u[k][j] -= mu * u[k][i]
                    changed = True
        # keep diagonal sorted ascending to stabilize the loop
        order = sorted(range(n), key=lambda k: g[k][k])
        if order != list(range(n)):
            g = [[g[a][b] for b in order] for a in order]
            u = [[u[k][order[c]] for c in range(n)] for k in range(n)]
            changed = True
    return [tuple(r) for r in g], u


def _cholesky(q):
    """Rational Cholesky data for a symmetric positive definite matrix."""
    n = len(q)
    a = [[Fraction(q[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        if a[i][i] <= 0:
            raise UsageError("form is not positive definite")
        for j in range(i + 1, n):
            a[j][i] = a[i][j]
            a[i][j] = a[i][j] / a[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                a[k][l] -= a[k][i] * a[i][l]
    return a


def _scale_to_integer_gram(gram):
    """(integer gram, scale) with integer = gram * scale entrywise."""
    scale = 1
    for row in gram:
        for x in row:
            d = Fraction(x).denominator
            scale = scale * d // gcd(scale, d)
    out = [[int(Fraction(x) * scale) for x in row] for row in gram]
    return out, scale


def _enumerate_integer(gram_int, max_value):
    """Yield (value, vector) with 0 < Q(x) = x^T G x <= max_value, G integral.

    The basis is Lagrange-reduced first; vectors are mapped back to the
    original coordinates. Both x and -x appear. Lazy: callers may stop early.
    """
    red, u = lagrange_reduce(gram_int)
    n = len(red)
    q = _cholesky(red)
    limit = Fraction(max_value)

    def recurse(i, rem, partial):
        if i < 0:
            vec = tuple(partial[::-1])
            if any(vec):
                orig = tuple(sum(u[r][c] * vec[c] for c in range(n)) for r in range(n))
                yield (limit - rem, orig)
            return
        qi = q[i][i]
        center = -sum(q[i][j] * partial[n - 1 - j] for j in range(i + 1, n))
        bound = _floor_sqrt_frac(rem / qi) + 1
        lo = int(center) - bound - 1
        hi = int(center) + bound + 1
        for t in range(lo, hi + 1):
            diff = qi * (t - center) ** 2
            if diff <= rem:
                partial.append(t)
                yield from recurse(i - 1, rem - diff, partial)
                partial.pop()

    yield from recurse(n - 1, limit, [])


def enumerate_by_value(gram, max_value):
    """All integer vectors x != 0 with Q(x) = x^T gram x <= max_value.

    gram: symmetric matrix of Fractions/ints, positive definite. Returns
    (value, vector) pairs in the original coordinates; x and -x both appear.
    """
    gram_int, scale = _scale_to_integer_gram(gram)
    budget = Fraction(max_value) * scale
    return [(val / scale, vec) for val, vec in _enumerate_integer(gram_int, budget)]


def vectors_of_value(gram, value):
    """Integer vectors with Q(x) exactly `value` (x and -x both included)."""
    gram_int, scale = _scale_to_integer_gram(gram)
    target = Fraction(value) * scale
    if target.denominator != 1:
        return []
    return [v for val, v in _enumerate_integer(gram_int, target) if val == target]


def represents_value(gram, value) -> bool:
    """Whether Q(x) = value has a nonzero solution; stops at the first hit."""
    gram_int, scale = _scale_to_integer_gram(gram)
    target = Fraction(value) * scale
    if target.denominator != 1:
        return False
    return any(val == target for val, _ in _enumerate_integer(gram_int, target))


def shortest_value_and_vector(gram, start_bound=8):
    """(value, vector) attaining the minimum of Q on nonzero vectors."""
    bound = start_bound
    while True:
        best = None
        for val, vec in _enumerate_integer(*_scaled(gram, bound)):
            if best is None or val < best[0]:
                best = (val, vec)
        if best is not None:
            scale = _scale_to_integer_gram(gram)[1]
            return best[0] / scale, best[1]
        bound *= 2
        if bound > 10 ** 9:
            raise UsageError("no short vector found; form degenerate?")


def _scaled(gram, bound):
    gram_int, scale = _scale_to_integer_gram(gram)
    return gram_int, Fraction(bound) * scale


def count_values(gram, upto):
    """Counts of Q(x) = v for v = 1..upto over nonzero vectors."""
    gram_int, scale = _scale_to_integer_gram(gram)
    counts = [0] * (upto + 1)
    for val, _ in _enumerate_integer(gram_int, upto * scale):
        v = val / scale
        if v.denominator == 1 and 1 <= v <= upto:
            counts[int(v)] += 1
    return tuple(counts[1:])
