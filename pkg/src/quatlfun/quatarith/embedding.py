"""Optimal embeddings of imaginary quadratic orders into Eichler orders.

The generator of O_c = Z + c·O_K is c·g1 with g1 = (-1+sqrt(dK))/2 for odd dK
and sqrt(dK)/2 for even dK. An embedding is a solution of trd = t, nrd = n in
the order; optimality means the quadratic subring it cuts out is exactly O_c,
checked by an index computation.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..errors import SearchExhaustedError, UsageError
from ..exactalg import IntMatrix, kernel_basis, solve
from .algebra import kronecker
from .classset import prime_factors
from .lattice import enumerate_by_value, integer_kernel
from .order import QuaternionOrder


class Embedding:
    """Image of the standard generator of O_c in a quaternion order."""

    def __init__(self, order, disc_k, conductor, element, trace, norm):
        self.order = order
        self.disc_k = disc_k
        self.conductor = conductor
        self.element = element  # 4-tuple of Fractions
        self.trace = trace
        self.norm = norm

    def optimality_index(self) -> int:
        return _subring_index(self.order, self.element)


def quadratic_generator(disc_k: int, conductor: int = 1):
    """(trace, norm) of the standard generator of the conductor-c order."""
    if disc_k >= 0 or disc_k % 4 not in (0, 1):
        raise UsageError("need a negative quadratic discriminant")
    if disc_k % 2:
        t1, n1 = -1, (1 - disc_k) // 4
    else:
        t1, n1 = 0, -disc_k // 4
    return conductor * t1, conductor * conductor * n1


def optimal_embedding(disc_k: int, conductor: int, order: QuaternionOrder,
                      max_candidates: int = 200000) -> Embedding:
    """Embed O_c = Z + c·O_K optimally into the given Eichler order.

    Preconditions (the paper's factorization constraints): every prime of the
    algebra discriminant is non-split in K, every level prime splits.
    """
    if disc_k >= 0 or disc_k % 4 not in (0, 1):
        raise UsageError("need a negative fundamental-type discriminant")
    disc_alg = order.alg.discriminant
    level = order.reduced_discriminant() // disc_alg
    for q in prime_factors(disc_alg):
        if kronecker(disc_k, q) == 1:
            raise UsageError(f"prime {q} of the discriminant splits in K")
    for ell in prime_factors(level):
        if kronecker(disc_k, ell) != 1:
            raise UsageError(f"level prime {ell} does not split in K")
    t, n = quadratic_generator(disc_k, conductor)

    best = None
    for coords in _trace_norm_solutions(order, t, n, max_candidates):
        element = order.element_from_coords(coords)
        emb = Embedding(order, disc_k, conductor, element, t, n)
        if emb.optimality_index() == 1:
            return emb
        best = best or emb
    if best is not None:
        raise SearchExhaustedError(
            "embeddings exist but none optimal within the search bound")
    raise SearchExhaustedError("no embedding found within the search bound")


def embedding_with_base(class_set, disc_k: int, conductor: int):
    """(base order, embedding) over the first class representative that admits one.

    Optimal embeddings of a fixed quadratic order land in specific types of
    Eichler orders; the left orders of a complete set of class representatives
    cover every type, so the scan is exhaustive. Deterministic: first hit wins.
    """
    last = None
    for rep in class_set.reps:
        order = rep.left_order()
        try:
            return order, optimal_embedding(disc_k, conductor, order)
        except SearchExhaustedError as ex:
            last = ex
    raise SearchExhaustedError(
        f"no class representative of disc {class_set.disc} level {class_set.level} "
        f"admits an optimal embedding of discriminant {disc_k}, conductor {conductor}"
    ) from last


def _trace_norm_solutions(order: QuaternionOrder, t: int, n: int, max_candidates: int):
    """All coordinate vectors in the order with trd = t and nrd = n.

    Solve the linear trace condition, then enumerate the positive definite
    norm form on the affine rank-3 solution set at the exact value n. With
    center w of the shifted form, every solution z obeys
    z^T a z <= 2R + 2 w^T a w, an exact budget for the lattice enumeration.
    """
    basis = order.basis()
    alg = order.alg
    traces = [alg.trd(b) for b in basis]
    den = 1
    for x in traces:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    trow = [int(Fraction(x) * den) for x in traces]
    m = IntMatrix.from_rows([trow])
    part = solve(m, (t * den,))
    if part is None:
        return
    kern = kernel_basis(m)  # rank 3
    ngram, gden = order.nrd_gram()

    def bilinear(u, v):
        tot = 0
        for i in range(4):
            for j in range(4):
                tot += u[i] * ngram[i][j] * v[j]
        return Fraction(tot, 2 * gden)

    kmat = [list(v) for v in kern]
    a = [[bilinear(kmat[r], kmat[s]) for s in range(3)] for r in range(3)]
    b = [bilinear(kmat[r], part) for r in range(3)]
    c0 = bilinear(part, part)
    target = Fraction(n)
    # nrd(part + Kz) = c0 + 2 b.z + z^T a z = (z - w)^T a (z - w) + const,
    # with a w = -b and const = c0 - w^T a w.
    w = _solve3(a, [-x for x in b])
    waw = sum(w[r] * a[r][s] * w[s] for r in range(3) for s in range(3))
    radius = target - c0 + waw
    if radius < 0:
        return
    budget = 2 * radius + 2 * waw

    def coords_of(z):
        return tuple(part[i] + sum(z[r] * kmat[r][i] for r in range(3))
                     for i in range(4))

    if c0 == target:  # z = 0, skipped by the enumerator
        yield tuple(part)
    count = 0
    for _, z in enumerate_by_value(a, budget):
        count += 1
        if count > max_candidates:
            raise SearchExhaustedError("trace-norm enumeration exceeded its budget")
        coords = coords_of(z)
        if bilinear(coords, coords) == target:
            yield coords


def _solve3(a, rhs):
    """Solve a w = rhs exactly for a 3x3 invertible Fraction matrix."""
    m = [[Fraction(a[i][j]) for j in range(3)] + [Fraction(rhs[i])] for i in range(3)]
    for col in range(3):
        piv = next(r for r in range(col, 3) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        d = m[col][col]
        m[col] = [x / d for x in m[col]]
        for r in range(3):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][3] for r in range(3)]


def _subring_index(order: QuaternionOrder, element) -> int:
    """Index [Q(element) ∩ O : Z[element]] for an integral quadratic element."""
    one = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
    x = tuple(Fraction(v) for v in element)
    # lattice of (alpha, beta) with alpha + beta*x in O
    den = order.lattice.den
    rows = []
    cols = []
    # unknowns: alpha, beta, and integer coordinates c of the order element
    # alpha*1 + beta*x = sum c_i b_i  -> 4 equations
    basis = order.basis()
    big_den = den
    for v in list(x) + [Fraction(1)]:
        big_den = big_den * v.denominator // gcd(big_den, v.denominator)
    eq_rows = []
    for coord in range(4):
        row = [int(Fraction(one[coord]) * big_den), int(x[coord] * big_den)]
        for i in range(4):
            row.append(-int(Fraction(basis[i][coord]) * big_den))
        eq_rows.append(row)
    ker = integer_kernel(eq_rows)
    pairs = [(v[0], v[1]) for v in ker]
    lat_rows = [list(p) for p in pairs if any(p)]
    # Hermite-reduce the rank-2 (alpha, beta) lattice
    from .lattice import hnf_rows
    red = hnf_rows(lat_rows, expect_rank=2)
    det = red[0][0] * red[1][1]
    if det == 0:
        raise UsageError("element is rational; no quadratic subring")
    # Z[x] corresponds to the standard lattice Z^2 in (alpha, beta) coords
    index = Fraction(1, abs(det))
    if index.denominator != 1:
        raise UsageError("quadratic subring index is not integral")
    return int(index)
