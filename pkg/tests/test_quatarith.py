import random
from fractions import Fraction

import pytest

from quatlfun.errors import SearchExhaustedError, UsageError
from quatlfun.quatarith import (Lattice4, QuaternionAlgebra, RightIdeal,
                                algebra_from_discriminant, eichler_mass,
                                eichler_order, hilbert_symbol,
                                ideal_class_set, isometric, local_splitting,
                                maximal_order, neighbor_matrix, neighbors,
                                optimal_embedding, quadratic_generator,
                                ramified_primes, standard_order,
                                two_sided_prime)
from quatlfun.quatarith.embedding import embedding_with_base
from quatlfun.quatarith.ideal import reduce_ideal
from quatlfun.quatarith.lattice import (count_values, enumerate_by_value,
                                        hnf_rows, integer_kernel,
                                        vectors_of_value)

from oracles import count_vectors_of_norm, kronecker_oracle


class TestSymbols:
    def test_classical_values(self):
        assert hilbert_symbol(-1, -1, 2) == -1
        assert hilbert_symbol(-1, -1, 3) == 1
        assert hilbert_symbol(-1, -1, "inf") == -1
        assert hilbert_symbol(-1, -11, 11) == -1  # 11 = 3 mod 4

    def test_product_formula(self):
        rng = random.Random(9)
        for _ in range(40):
            a = rng.choice([x for x in range(-30, 31) if x])
            b = rng.choice([x for x in range(-30, 31) if x])
            signs = [hilbert_symbol(a, b, p) for p in _primes_dividing(2 * a * b)]
            signs.append(hilbert_symbol(a, b, "inf"))
            prod = 1
            for s in signs:
                prod *= s
            assert prod == 1

    def test_ramification_matches_declared(self):
        alg = algebra_from_discriminant(11)
        assert ramified_primes(alg.a, alg.b) == (11,)
        alg2 = algebra_from_discriminant(30)
        assert ramified_primes(alg2.a, alg2.b) == (2, 3, 5)


def _primes_dividing(n):
    n = abs(n)
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        else:
            f += 1
    if n > 1:
        out.append(n)
    return out


class TestAlgebraConstruction:
    def test_disc2_is_hamilton(self):
        alg = algebra_from_discriminant(2)
        assert (alg.a, alg.b) == (-1, -1)

    def test_parity_rejection(self):
        with pytest.raises(UsageError):
            algebra_from_discriminant(6)

    def test_squarefree_rejection(self):
        with pytest.raises(UsageError):
            algebra_from_discriminant(12)

    def test_multiplication_associative(self):
        alg = QuaternionAlgebra(-1, -11)
        rng = random.Random(1)
        for _ in range(30):
            x, y, z = (tuple(rng.randint(-4, 4) for _ in range(4)) for _ in range(3))
            assert alg.mul(alg.mul(x, y), z) == alg.mul(x, alg.mul(y, z))
            assert alg.nrd(alg.mul(x, y)) == alg.nrd(x) * alg.nrd(y)
            assert alg.conj(alg.mul(x, y)) == alg.mul(alg.conj(y), alg.conj(x))


class TestMaximalOrder:
    def test_hurwitz(self):
        order = maximal_order(algebra_from_discriminant(2))
        assert order.reduced_discriminant() == 2
        assert order.unit_count() == 24
        half = (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
        assert order.lattice.contains(half)

    def test_disc11(self):
        order = maximal_order(algebra_from_discriminant(11))
        assert order.reduced_discriminant() == 11

    def test_deterministic_and_stable(self):
        a1 = maximal_order(algebra_from_discriminant(11))
        a2 = maximal_order(algebra_from_discriminant(11))
        assert a1.lattice == a2.lattice

    def test_standard_order_discriminant(self):
        alg = QuaternionAlgebra(-1, -11)
        assert standard_order(alg).reduced_discriminant() == 4 * 11


class TestClassSets:
    def test_disc2(self):
        cs = ideal_class_set(maximal_order(algebra_from_discriminant(2)), 3)
        assert len(cs) == 1
        assert cs.mass == Fraction(1, 24)
        assert cs.unit_counts == [24]

    def test_disc11(self):
        cs = ideal_class_set(maximal_order(algebra_from_discriminant(11)), 2)
        assert len(cs) == 2
        assert cs.mass == Fraction(5, 12)
        assert sorted(cs.unit_counts) == [4, 6]  # 5/12 = 1/4 + 1/6

    def test_disc11_theta_distinguishes(self):
        cs = ideal_class_set(maximal_order(algebra_from_discriminant(11)), 2)
        k0, k1 = cs.reps[0].theta_key(), cs.reps[1].theta_key()
        assert k0[0] != k1[0]  # representation counts at 1 differ (unit counts)

    def test_disc30(self):
        cs = ideal_class_set(maximal_order(algebra_from_discriminant(30)), 7)
        assert cs.mass == eichler_mass(30, 1) == Fraction(1, 3)

    def test_disc374_closure_certificate(self):
        # mass 20/3 = (2-1)(11-1)(17-1)/24; the walk's exact count is 16
        cs = ideal_class_set(maximal_order(algebra_from_discriminant(374)), 3)
        assert cs.mass == eichler_mass(374, 1) == Fraction(20, 3)
        assert len(cs) == 16

    def test_neighbor_regularity(self):
        cs = ideal_class_set(maximal_order(algebra_from_discriminant(11)), 2)
        for ell in (2, 3, 5, 7):
            rows = neighbor_matrix(cs, ell)
            assert all(sum(r) == ell + 1 for r in rows)

    def test_principal_translate_isometric(self):
        order = maximal_order(algebra_from_discriminant(11))
        unit = RightIdeal.unit_ideal(order)
        x = (1, 1, 0, 0)  # nrd 2, invertible in D
        rows = [order.alg.mul(x, tuple(b)) for b in order.lattice.basis_fractions()]
        principal = RightIdeal(order, Lattice4.from_fraction_rows(rows))
        assert isometric(unit, principal)
        assert isometric(principal, unit)

    def test_isometric_is_equivalence(self):
        order = maximal_order(algebra_from_discriminant(11))
        cs = ideal_class_set(order, 2)
        spl = local_splitting(order, 3, 1)
        sample = [cs.reps[0], cs.reps[1]]
        for nb in neighbors(cs.reps[0], 3, spl):
            sample.append(reduce_ideal(nb))
        for a in sample:
            assert isometric(a, a)
            for b in sample:
                assert isometric(a, b) == isometric(b, a)

    def test_reduce_preserves_class(self):
        order = maximal_order(algebra_from_discriminant(11))
        spl = local_splitting(order, 3, 1)
        for nb in neighbors(RightIdeal.unit_ideal(order), 3, spl):
            red = reduce_ideal(nb)
            assert isometric(red, nb)
            assert red.nrd() <= nb.nrd()

    def test_right_stability_of_neighbors(self):
        order = maximal_order(algebra_from_discriminant(11))
        spl = local_splitting(order, 2, 1)
        for nb in neighbors(RightIdeal.unit_ideal(order), 2, spl):
            nb.check_right_stability()

    def test_neighbor_prime_must_be_coprime(self):
        order = maximal_order(algebra_from_discriminant(11))
        with pytest.raises(UsageError):
            ideal_class_set(order, 11)


class TestEichlerOrders:
    def test_level2_disc11(self):
        maxo = maximal_order(algebra_from_discriminant(11))
        o2 = eichler_order(maxo, 2, local_splitting)
        assert o2.reduced_discriminant() == 22
        cs = ideal_class_set(o2, 3)
        assert cs.mass == eichler_mass(11, 2) == Fraction(5, 4)

    def test_level5_disc11(self):
        maxo = maximal_order(algebra_from_discriminant(11))
        o5 = eichler_order(maxo, 5, local_splitting)
        cs = ideal_class_set(o5, 2)
        assert cs.mass == Fraction(5, 2)


class TestTwoSidedPrime:
    def test_square_is_q(self):
        order = maximal_order(algebra_from_discriminant(11))
        p11 = two_sided_prime(order, 11)
        sq = RightIdeal(order, p11).product_lattice(p11)
        assert sq == order.lattice.scaled(11)

    def test_unramified_rejected(self):
        order = maximal_order(algebra_from_discriminant(11))
        with pytest.raises(UsageError):
            two_sided_prime(order, 3)


class TestSplitting:
    def test_trace_and_norm_preserved(self):
        order = maximal_order(algebra_from_discriminant(11))
        rng = random.Random(5)
        for ell, prec in ((2, 4), (3, 3), (5, 2), (13, 2)):
            spl = local_splitting(order, ell, prec)
            q = ell ** prec
            for _ in range(10):
                coords = tuple(rng.randint(-6, 6) for _ in range(4))
                elem = order.element_from_coords(coords)
                m = spl.apply(coords)
                tr = (m[0][0] + m[1][1]) % q
                det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) % q
                assert tr == int(order.alg.trd(elem)) % q
                assert det == int(order.alg.nrd(elem)) % q


class TestEmbeddings:
    def test_gaussian_into_hurwitz(self):
        order = maximal_order(algebra_from_discriminant(2))
        emb = optimal_embedding(-4, 1, order)
        assert (emb.trace, emb.norm) == (0, 1)
        assert emb.optimality_index() == 1

    def test_eisenstein_into_disc11_base_search(self):
        cs = ideal_class_set(maximal_order(algebra_from_discriminant(11)), 2)
        base, emb = embedding_with_base(cs, -3, 1)
        assert (emb.trace, emb.norm) == (-1, 1)
        assert emb.optimality_index() == 1
        assert base.unit_count() == 6  # the type containing sixth roots of unity

    def test_conductor_five(self):
        cs = ideal_class_set(maximal_order(algebra_from_discriminant(11)), 2)
        _, emb = embedding_with_base(cs, -3, 5)
        assert (emb.trace, emb.norm) == (-5, 25)  # minimal polynomial of 5*omega
        assert emb.optimality_index() == 1

    def test_split_discprime_gate(self):
        order = maximal_order(algebra_from_discriminant(11))
        with pytest.raises(UsageError):
            optimal_embedding(-7, 1, order)  # -7 is a square mod 11

    def test_generator_convention(self):
        assert quadratic_generator(-3, 1) == (-1, 1)
        assert quadratic_generator(-4, 1) == (0, 1)
        assert quadratic_generator(-3, 5) == (-5, 25)


class TestLattice4:
    def test_hnf_canonical(self):
        rng = random.Random(7)
        for _ in range(20):
            rows = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)]
            import copy
            det = _naive_det(rows)
            if det == 0:
                continue
            l1 = Lattice4(1, copy.deepcopy(rows))
            # shuffle generators; same lattice, same canonical form
            shuffled = rows[::-1] + [[a + b for a, b in zip(rows[0], rows[1])]]
            l2 = Lattice4(1, shuffled)
            assert l1 == l2

    def test_intersection_and_sum(self):
        a = Lattice4(1, [[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        b = Lattice4(1, [[1, 0, 0, 0], [0, 3, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        inter = a.intersection(b)
        assert inter.contains((2, 0, 0, 0)) and inter.contains((0, 3, 0, 0))
        assert not inter.contains((1, 0, 0, 0))
        assert a.sum(b).contains((1, 0, 0, 0))

    def test_enumeration_against_box_oracle(self):
        gram = [[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 4, 1], [0, 0, 1, 6]]
        for value in (2, 4, 5, 8):
            got = len(vectors_of_value(gram, value))
            expect = count_vectors_of_norm(gram, value, box=6)
            assert got == expect

    def test_count_values(self):
        # Q(x,y) = 2x^2 + 2y^2: value 2 has 4 vectors, value 4 has 4 vectors
        counts = count_values([[2, 0], [0, 2]], 4)
        assert counts == (0, 4, 0, 4)

    def test_integer_kernel(self):
        rows = [[2, 4, 6, 0], [1, 2, 3, 0]]
        ker = integer_kernel(rows)
        assert len(ker) == 3
        for v in ker:
            assert all(sum(r[i] * v[i] for i in range(4)) == 0 for r in rows)


def _naive_det(rows):
    from itertools import permutations
    total = 0
    for perm in permutations(range(4)):
        sign = 1
        seen = [False] * 4
        for i in range(4):
            if seen[i]:
                continue
            j, ln = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                ln += 1
            if ln % 2 == 0:
                sign = -sign
        prod = 1
        for i in range(4):
            prod *= rows[i][perm[i]]
        total += sign * prod
    return total
