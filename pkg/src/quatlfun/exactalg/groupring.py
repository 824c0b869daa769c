"""Finite-level Iwasawa-algebra arithmetic: (Z/p^n)[Z/p^m] and specializations.

Elements are cyclic group-ring elements indexed by powers of a fixed generator
g of the cyclic group of order p^m. Characters of p-power order take values in
the exact cyclotomic quotient (Z/p^n)[x]/Φ_{p^s}(x); no external field
arithmetic is needed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import UsageError
from .intmatrix import IntMatrix, solve_mod


def is_prime(q: int) -> bool:
    """Deterministic trial-division primality test; fine at desk scale."""
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    f = 3
    while f * f <= q:
        if q % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimePowerRing:
    """The coefficient ring Z/p^n with p prime and n >= 1."""

    p: int
    n: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise UsageError(f"{self.p} is not prime")
        if self.n < 1:
            raise UsageError("exponent must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p ** self.n

    def reduce(self, x: int) -> int:
        return x % self.modulus

    def valuation(self, x: int) -> int:
        """p-adic valuation of x in Z/p^n, capped at n; val(0) = n."""
        x %= self.modulus
        if x == 0:
            return self.n
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v


@dataclass(frozen=True)
class GroupRingElement:
    """Element of (Z/p^n)[Z/p^m], coefficients indexed by powers of g."""

    ring: PrimePowerRing
    group_order: int  # p^m
    coeffs: tuple

    def __post_init__(self):
        m = self.group_order
        p = self.ring.p
        # group order must be a power of p (p^0 = 1 allowed)
        t = m
        while t % p == 0:
            t //= p
        if t != 1 or m < 1:
            raise UsageError("group order must be a power of p")
        if len(self.coeffs) != m:
            raise UsageError("coefficient count must equal the group order")
        if any(not isinstance(c, int) or not (0 <= c < self.ring.modulus) for c in self.coeffs):
            raise UsageError("coefficients must be canonical residues")

    @staticmethod
    def make(ring: PrimePowerRing, group_order: int, coeffs) -> "GroupRingElement":
        return GroupRingElement(ring, group_order,
                                tuple(ring.reduce(int(c)) for c in coeffs))

    @staticmethod
    def zero(ring: PrimePowerRing, group_order: int) -> "GroupRingElement":
        return GroupRingElement(ring, group_order, (0,) * group_order)

    @staticmethod
    def generator_power(ring: PrimePowerRing, group_order: int, k: int,
                        scalar: int = 1) -> "GroupRingElement":
        """scalar * g^k."""
        c = [0] * group_order
        c[k % group_order] = ring.reduce(scalar)
        return GroupRingElement(ring, group_order, tuple(c))

    def level(self) -> int:
        """m with group order p^m."""
        m, t = 0, self.group_order
        while t > 1:
            t //= self.ring.p
            m += 1
        return m

    def _check_compatible(self, other: "GroupRingElement"):
        if self.ring != other.ring or self.group_order != other.group_order:
            raise UsageError("group-ring elements live over different rings")

    def __add__(self, other):
        self._check_compatible(other)
        return GroupRingElement.make(self.ring, self.group_order,
                                     [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check_compatible(other)
        return GroupRingElement.make(self.ring, self.group_order,
                                     [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __mul__(self, other):
        return group_ring_mul(self, other)

    def scale(self, c: int) -> "GroupRingElement":
        return GroupRingElement.make(self.ring, self.group_order,
                                     [c * a for a in self.coeffs])

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def to_json(self) -> str:
        return json.dumps({"p": self.ring.p, "n": self.ring.n,
                           "m": self.level(), "coeffs": list(self.coeffs)},
                          sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "GroupRingElement":
        d = json.loads(text)
        ring = PrimePowerRing(d["p"], d["n"])
        return GroupRingElement.make(ring, ring.p ** d["m"], d["coeffs"])


def group_ring_mul(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    """Cyclic convolution in (Z/p^n)[Z/p^m]."""
    a._check_compatible(b)
    m = a.group_order
    out = [0] * m
    for i, ca in enumerate(a.coeffs):
        if ca == 0:
            continue
        for j, cb in enumerate(b.coeffs):
            if cb:
                out[(i + j) % m] += ca * cb
    return GroupRingElement.make(a.ring, m, out)


def involution(a: GroupRingElement) -> GroupRingElement:
    """Algebra automorphism sending each group element to its inverse."""
    m = a.group_order
    out = [0] * m
    for k, c in enumerate(a.coeffs):
        out[(-k) % m] = c
    return GroupRingElement(a.ring, m, tuple(out))


def mu_invariant(a: GroupRingElement) -> int:
    """Minimum p-adic valuation over coefficients, capped at n; mu(0) = n.

    Finite level cannot distinguish valuations >= n, hence the cap.
    """
    return min(a.ring.valuation(c) for c in a.coeffs)


def project_level(a: GroupRingElement, target_level: int) -> GroupRingElement:
    """Push forward along Z/p^{m} -> Z/p^{target}: sum coefficients over fibers."""
    m = a.level()
    if not (0 <= target_level <= m):
        raise UsageError("target level must be between 0 and the element's level")
    p = a.ring.p
    mt = p ** target_level
    out = [0] * mt
    for k, c in enumerate(a.coeffs):
        out[k % mt] += c
    return GroupRingElement.make(a.ring, mt, out)


# ---------------------------------------------------------------------------
# Cyclotomic quotient ring (Z/p^n)[x]/Φ_{p^s}(x) and character specialization.
# ---------------------------------------------------------------------------

def _cyclotomic_prime_power(p: int, s: int):
    """Coefficients (low degree first) of Φ_{p^s}(x) = sum_i x^{i p^{s-1}}."""
    if s == 0:
        return (-1, 1)  # Φ_1 = x - 1
    deg = p ** (s - 1) * (p - 1)
    c = [0] * (deg + 1)
    for i in range(p):
        c[i * p ** (s - 1)] = 1
    return tuple(c)


@dataclass(frozen=True)
class CyclotomicQuotientRing:
    """(Z/p^n)[x]/Φ_{p^s}(x); x is a root of unity of exact order p^s."""

    p: int
    n: int
    s: int

    @property
    def degree(self) -> int:
        return 1 if self.s == 0 else self.p ** (self.s - 1) * (self.p - 1)

    @property
    def modulus(self) -> int:
        return self.p ** self.n

    def zero(self):
        return CyclotomicElement(self, (0,) * self.degree)

    def one(self):
        return CyclotomicElement(self, (1,) + (0,) * (self.degree - 1))

    def root_power(self, k: int):
        """x^k as a canonical element (k reduced mod p^s)."""
        k %= self.p ** self.s
        c = [0] * (self.p ** self.s)
        c[k] = 1
        return CyclotomicElement(self, self._reduce_poly(c))

    def _reduce_poly(self, coeffs):
        """Reduce a coefficient list by the monic Φ_{p^s} and mod p^n."""
        q = self.modulus
        phi = _cyclotomic_prime_power(self.p, self.s)
        deg = len(phi) - 1
        c = [x % q for x in coeffs]
        for i in range(len(c) - 1, deg - 1, -1):
            f = c[i]
            if f:
                for j in range(deg + 1):
                    c[i - deg + j] = (c[i - deg + j] - f * phi[j]) % q
        c = c[:deg]
        c += [0] * (deg - len(c))
        return tuple(c)

    # multiplication-by-w matrix in the monomial basis, used for valuations
    def _mul_matrix(self, w) -> IntMatrix:
        d = self.degree
        cols = []
        for j in range(d):
            basis = [0] * d
            basis[j] = 1
            prod = _poly_mul(w.coeffs, tuple(basis))
            cols.append(self._reduce_poly(list(prod)))
        return IntMatrix.from_rows([[cols[j][i] for j in range(d)] for i in range(d)])


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return tuple(out)


@dataclass(frozen=True)
class CyclotomicElement:
    ring: CyclotomicQuotientRing
    coeffs: tuple  # length = ring.degree, canonical residues

    def __add__(self, other):
        return CyclotomicElement(self.ring, tuple(
            (a + b) % self.ring.modulus for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicElement(self.ring, tuple(
                (a * other) % self.ring.modulus for a in self.coeffs))
        return CyclotomicElement(self.ring,
                                 self.ring._reduce_poly(list(_poly_mul(self.coeffs, other.coeffs))))

    def __sub__(self, other):
        return CyclotomicElement(self.ring, tuple(
            (a - b) % self.ring.modulus for a, b in zip(self.coeffs, other.coeffs)))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def valuation(self) -> int:
        """(1-x)-adic valuation, capped at e*n with e = deg Φ_{p^s}.

        For s = 0 this is the plain p-adic valuation (v(p) = 1); in general
        v(p) = e, so lengths compare in the same normalization.
        """
        ring = self.ring
        if ring.s == 0:
            return PrimePowerRing(ring.p, ring.n).valuation(self.coeffs[0])
        cap = ring.degree * ring.n
        if self.is_zero():
            return cap
        one_minus_x = CyclotomicElement(
            ring, ring._reduce_poly([1, -1] + [0] * (ring.degree - 2)))
        v = 0
        w = ring.one()
        while v < cap:
            w_next = w * one_minus_x
            # test membership self ∈ w_next * R by solving the linear system
            m = ring._mul_matrix(w_next)
            if solve_mod(m, self.coeffs, ring.p, ring.n) is None:
                break
            w = w_next
            v += 1
        return v


@dataclass(frozen=True)
class Character:
    """Character of Z/p^m of order dividing p^s, valued in the cyclotomic quotient.

    Sends the fixed generator g to x^k where x has exact order p^s.
    """

    p: int
    n: int
    order_exponent: int  # s
    generator_image: int  # k, coprime to p unless trivial

    def target_ring(self) -> CyclotomicQuotientRing:
        return CyclotomicQuotientRing(self.p, self.n, self.order_exponent)

    def inverse(self) -> "Character":
        if self.order_exponent == 0:
            return self
        return Character(self.p, self.n, self.order_exponent,
                         (-self.generator_image) % self.p ** self.order_exponent)


def specialize(a: GroupRingElement, chi: Character) -> CyclotomicElement:
    """Ring homomorphism sum c_k g^k  ->  sum c_k chi(g)^k."""
    if chi.p != a.ring.p or chi.n != a.ring.n:
        raise UsageError("character and element live over different coefficient rings")
    m = a.level()
    if chi.order_exponent > m:
        raise UsageError("character order must divide the group order")
    ring = chi.target_ring()
    ps = chi.p ** chi.order_exponent
    out = ring.zero()
    for k, c in enumerate(a.coeffs):
        if c:
            out = out + ring.root_power(chi.generator_image * k % ps) * c
    return out
