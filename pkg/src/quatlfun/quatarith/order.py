"""Orders in definite quaternion algebras: saturation, levels, units.

The maximal-order routine saturates the obvious order Z<1,i,j,k> prime by
prime: index-q superorders are found by brute force for q in {2, 3} and by the
radical idealizer for q >= 5 (where the trace form detects the radical, since
the characteristic exceeds the dimension).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from ..errors import InvariantViolationError, UsageError
from ..exactalg import IntMatrix
from .algebra import QuaternionAlgebra
from .lattice import Lattice4, hnf_rows, preimage_lattice, vectors_of_value

ONE = (1, 0, 0, 0)


class QuaternionOrder:
    """An order (full lattice closed under multiplication, containing 1)."""

    def __init__(self, alg: QuaternionAlgebra, lat: Lattice4, check: bool = True):
        self.alg = alg
        self.lattice = lat
        if check:
            self._check_order()
        self._discrd = None
        self._mult_table = None
        self._unit_count = None

    # -- structure ----------------------------------------------------------

    def _check_order(self):
        lat = self.lattice
        if not lat.contains(ONE):
            raise UsageError("an order must contain 1")
        basis = lat.basis_fractions()
        for x in basis:
            for y in basis:
                if not lat.contains(self.alg.mul(tuple(x), tuple(y))):
                    raise UsageError("lattice is not multiplicatively closed")

    def key(self):
        return (self.alg.a, self.alg.b) + self.lattice.key()

    def __eq__(self, other):
        return isinstance(other, QuaternionOrder) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def basis(self):
        return [tuple(r) for r in self.lattice.basis_fractions()]

    def reduced_discriminant(self) -> int:
        if self._discrd is None:
            b = self.basis()
            m = [[self.alg.trd(self.alg.mul(b[i], b[j])) for j in range(4)]
                 for i in range(4)]
            d = _det4_fraction(m)
            d = abs(d)
            num, den = d.numerator, d.denominator
            if den != 1:
                raise InvariantViolationError("trace form of an order must be integral")
            r = isqrt(num)
            if r * r != num:
                raise InvariantViolationError("trace-form determinant is not a square")
            self._discrd = r
        return self._discrd

    def mult_table(self):
        """Structure constants c[i][j] = coordinates of b_i * b_j; integral."""
        if self._mult_table is None:
            b = self.basis()
            table = []
            for i in range(4):
                row = []
                for j in range(4):
                    coords = self.lattice.coordinates(self.alg.mul(b[i], b[j]))
                    if coords is None:
                        raise InvariantViolationError("order closure failed")
                    row.append(coords)
                table.append(row)
            self._mult_table = table
        return self._mult_table

    def coords_mul(self, x, y):
        """Product in basis coordinates (integer 4-tuples)."""
        table = self.mult_table()
        out = [0, 0, 0, 0]
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        c = table[i][j]
                        f = xi * yj
                        out[0] += f * c[0]
                        out[1] += f * c[1]
                        out[2] += f * c[2]
                        out[3] += f * c[3]
        return tuple(out)

    def element_from_coords(self, coords):
        b = self.basis()
        return tuple(sum(Fraction(coords[i]) * b[i][c] for i in range(4))
                     for c in range(4))

    def one_coords(self):
        c = self.lattice.coordinates(ONE)
        if c is None:
            raise InvariantViolationError("order does not contain 1")
        return c

    def nrd_gram(self):
        """Integer matrix N with nrd(sum c_i b_i) = c^T N c / 2, over den^2.

        Returns (N, den_sq) with N integral and even on the diagonal.
        """
        b = self.basis()
        n = [[self.alg.trd_pair(b[i], b[j]) for j in range(4)] for i in range(4)]
        den = 1
        for row in n:
            for x in row:
                den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
        return ([[int(Fraction(x) * den) for x in row] for row in n], den)

    def unit_count(self) -> int:
        """#O^× = number of norm-1 elements (definite algebra)."""
        if self._unit_count is None:
            n, den = self.nrd_gram()
            gram = [[Fraction(x, 2 * den) for x in row] for row in n]
            self._unit_count = len(vectors_of_value(gram, 1))
        return self._unit_count


def _det4_fraction(m):
    from itertools import permutations
    total = Fraction(0)
    for perm in permutations(range(4)):
        sign = _perm_sign(perm)
        prod = Fraction(1)
        for i, j in enumerate(perm):
            prod *= Fraction(m[i][j])
        total += sign * prod
    return total


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def standard_order(alg: QuaternionAlgebra) -> QuaternionOrder:
    return QuaternionOrder(alg, Lattice4(1, [[1, 0, 0, 0], [0, 1, 0, 0],
                                             [0, 0, 1, 0], [0, 0, 0, 1]]))


def maximal_order(alg: QuaternionAlgebra) -> QuaternionOrder:
    """Saturate the standard order until the reduced discriminant is disc(A)."""
    target = alg.discriminant
    order = standard_order(alg)
    guard = 0
    while order.reduced_discriminant() != target:
        guard += 1
        if guard > 64:
            raise InvariantViolationError("maximal-order saturation did not terminate")
        ratio = order.reduced_discriminant() // target
        q = _smallest_prime_factor(ratio)
        bigger = _enlarge_at(order, q)
        if bigger is None:
            raise InvariantViolationError(f"could not enlarge order at {q}")
        order = bigger
    return order


def _smallest_prime_factor(n):
    f = 2
    while f * f <= n:
        if n % f == 0:
            return f
        f += 1
    return n


def _enlarge_at(order: QuaternionOrder, q: int):
    if q <= 3:
        return _enlarge_brute(order, q)
    return _enlarge_radical(order, q)


def _enlarge_brute(order: QuaternionOrder, q: int):
    """Try all index-q superlattices O + Z*(v/q); keep the first real order."""
    basis = order.basis()
    den = order.lattice.den
    rows = [[x * q for x in r] for r in order.lattice.rows]
    candidates = []
    for c in _proj_points(q):
        vec = [sum(c[i] * order.lattice.rows[i][k] for i in range(4)) for k in range(4)]
        candidates.append(vec)
    for vec in candidates:
        lat = Lattice4(den * q, rows + [vec])
        try:
            cand = QuaternionOrder(order.alg, lat)
        except UsageError:
            continue
        if cand.reduced_discriminant() < order.reduced_discriminant():
            return cand
    return None


def _proj_points(q):
    """Representatives of P^3(F_q)."""
    pts = []
    for lead in range(4):
        base = [0] * 4
        base[lead] = 1
        rest = [i for i in range(lead + 1, 4)]
        for combo in _tuples(q, len(rest)):
            v = base[:]
            for idx, c in zip(rest, combo):
                v[idx] = c
            pts.append(tuple(v))
    return pts


def _tuples(q, k):
    if k == 0:
        yield ()
        return
    for rest in _tuples(q, k - 1):
        for c in range(q):
            yield (c,) + rest


def _radical_mod(order: QuaternionOrder, q: int):
    """Basis (coordinate vectors mod q) of the radical of O/qO.

    For q >= 5 the radical is the kernel of the trace form x -> tr(L_{xy});
    for q in {2, 3} the callers use brute force instead, except for ramified
    primes of a maximal order where the radical equals the set of nilpotents
    (the quotient is local); that case is handled by nilpotent search.
    """
    table = order.mult_table()

    def left_mult_trace(i, j):
        # trace of left multiplication by b_i * b_j on O/qO
        prod = table[i][j]
        tr = 0
        for k in range(4):
            img = order.coords_mul(prod, _unit_vec(k))
            tr += img[k]
        return tr % q

    if q < 5:
        raise UsageError("trace-form radical needs q >= 5; small q goes brute force")
    rows = [[left_mult_trace(i, j) for j in range(4)] for i in range(4)]
    from ..exactalg import kernel_mod
    gens = kernel_mod(IntMatrix.from_rows(rows), q, 1)
    return [tuple(x % q for x in g) for g in gens]


def _unit_vec(k):
    v = [0, 0, 0, 0]
    v[k] = 1
    return tuple(v)


def _enlarge_radical(order: QuaternionOrder, q: int):
    rad = _radical_mod(order, q)
    # J = qO + (radical lifts), a sublattice of O over the same denominator
    rows = [[x * q for x in r] for r in order.lattice.rows]
    for g in rad:
        vec = [sum(g[i] * order.lattice.rows[i][k] for i in range(4)) for k in range(4)]
        rows.append(vec)
    j_lat = Lattice4(order.lattice.den, rows)
    for side in ("left", "right"):
        idl = _idealizer(order.alg, j_lat, side)
        if idl.covolume() < order.lattice.covolume():
            return QuaternionOrder(order.alg, idl)
    return None


def _idealizer(alg: QuaternionAlgebra, lat: Lattice4, side: str) -> Lattice4:
    """{x : x L ⊆ L} (left) or {x : L x ⊆ L} (right)."""
    out = None
    for b in lat.basis_fractions():
        if side == "left":
            m = alg.right_mul_matrix(tuple(b))  # x -> x*b
        else:
            m = alg.left_mul_matrix(tuple(b))  # x -> b*x
        pre = preimage_lattice(lat, m)
        out = pre if out is None else out.intersection(pre)
    return out


def left_order_of(alg: QuaternionAlgebra, lat: Lattice4) -> QuaternionOrder:
    return QuaternionOrder(alg, _idealizer(alg, lat, "left"))


def right_order_of(alg: QuaternionAlgebra, lat: Lattice4) -> QuaternionOrder:
    return QuaternionOrder(alg, _idealizer(alg, lat, "right"))


def eichler_order(maximal: QuaternionOrder, level: int, splitting_factory) -> QuaternionOrder:
    """Eichler order of squarefree level M inside a maximal order.

    splitting_factory(order, ell, prec) must return a local splitting; the
    suborder keeps x with lower-left entry ≡ 0 mod ell at each ell | M.
    """
    if level == 1:
        return maximal
    alg = maximal.alg
    if gcd(level, maximal.reduced_discriminant()) != 1:
        raise UsageError("level must be coprime to the discriminant")
    order = maximal
    n = level
    f = 2
    factors = []
    while f * f <= n:
        while n % f == 0:
            factors.append(f)
            n //= f
        f += 1
    if n > 1:
        factors.append(n)
    if len(set(factors)) != len(factors):
        raise UsageError("only squarefree levels are supported")
    for ell in factors:
        spl = splitting_factory(maximal, ell, 1)
        # sublattice of `order` where the (1,0) matrix entry vanishes mod ell
        rows = []
        coords_rows = []
        for idx, b in enumerate(order.basis()):
            coords_in_max = maximal.lattice.coordinates(b)
            mat = spl.apply(coords_in_max)
            coords_rows.append([mat[1][0] % ell])
        m = IntMatrix.from_rows([[coords_rows[i][0] for i in range(4)]])
        from ..exactalg import kernel_mod
        gens = kernel_mod(m, ell, 1)
        base = order.lattice
        new_rows = [[x * ell for x in r] for r in base.rows]
        for gvec in gens:
            vec = [sum(gvec[i] * base.rows[i][k] for i in range(4)) for k in range(4)]
            new_rows.append(vec)
        order = QuaternionOrder(alg, Lattice4(base.den, new_rows))
    expected = maximal.reduced_discriminant() * level
    if order.reduced_discriminant() != expected:
        raise InvariantViolationError("Eichler order has wrong reduced discriminant")
    return order


def two_sided_prime(order: QuaternionOrder, q: int) -> Lattice4:
    """The two-sided ideal P_q = qO + rad(O/qO) at a ramified prime q.

    Requires q | reduced discriminant with the order maximal at q; the
    quotient O/qO is then local and the radical is its set of nilpotents.
    """
    if order.reduced_discriminant() % q != 0:
        raise UsageError("two-sided prime only at ramified primes")
    rad = _radical_mod_local(order, q)
    rows = [[x * q for x in r] for r in order.lattice.rows]
    for g in rad:
        vec = [sum(g[i] * order.lattice.rows[i][k] for i in range(4)) for k in range(4)]
        rows.append(vec)
    return Lattice4(order.lattice.den, rows)


def _radical_mod_local(order: QuaternionOrder, q: int):
    if q >= 5:
        return _radical_mod(order, q)
    # brute force nilpotents; O/qO is local at a ramified q so they form the radical
    nilp = []
    for c in _tuples(q, 4):
        if not any(c):
            continue
        y = tuple(c)
        for _ in range(3):  # y -> y^2, up to x^8 >= nilpotency index 4
            y = tuple(v % q for v in order.coords_mul(y, y))
        if all(v == 0 for v in y):
            nilp.append(list(c))
    if not nilp:
        raise InvariantViolationError("radical of a ramified quotient cannot vanish")
    rows = hnf_rows(nilp)
    return [tuple(x % q for x in r) for r in rows]
