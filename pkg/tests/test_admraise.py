import pytest

from quatlfun.admraise import (CongruencePair, eisenstein_test,
                               is_n_admissible, raise_level_search,
                               search_admissible)
from quatlfun.brandtforms import EigenSystem
from quatlfun.errors import DataMissingError, UsageError
from quatlfun.exactalg.groupring import is_prime

from oracles import curve_a_ell, kronecker_oracle


@pytest.fixture(scope="module")
def f11a_mod5():
    sample = [ell for ell in range(2, 51) if is_prime(ell)]
    avals = {ell: curve_a_ell(ell) % 5 for ell in sample if ell != 11}
    return EigenSystem(5, 1, avals, {11: 1}, "point-count oracle")


class TestAdmissible:
    def test_v2_certificate(self, f11a_mod5):
        cert, _ = is_n_admissible(2, f11a_mod5, -3, 5, 1, 55)
        assert cert is not None and cert.eps == 1
        # 2 + 1 - (-2) = 5, the congruence witness from the point count
        assert (2 + 1 + 2) % 5 == 0
        assert cert.reverify()

    def test_v17_certificate(self, f11a_mod5):
        cert, _ = is_n_admissible(17, f11a_mod5, -3, 5, 1, 55)
        assert cert is not None and cert.eps == 1
        assert kronecker_oracle(-3, 17) == -1
        assert (17 + 1 - curve_a_ell(17)) % 5 == 0  # 18 + 2 = 20

    def test_ramified_rejected(self, f11a_mod5):
        cert, reason = is_n_admissible(3, f11a_mod5, -3, 5, 1, 55)
        assert cert is None and reason == "ramified in K"

    def test_split_rejected(self, f11a_mod5):
        cert, reason = is_n_admissible(7, f11a_mod5, -3, 5, 1, 55)
        assert cert is None and reason == "split in K"
        assert kronecker_oracle(-3, 7) == 1

    def test_level_prime_rejected(self, f11a_mod5):
        cert, reason = is_n_admissible(11, f11a_mod5, -3, 5, 1, 55)
        assert cert is None and "level" in reason

    def test_vsquared_condition(self):
        # v = 19 has 5 | 19^2 - 1; make it inert artificially via K = -23
        system = EigenSystem(5, 1, {19: 0}, {})
        assert kronecker_oracle(-23, 19) == -1
        cert, reason = is_n_admissible(19, system, -23, 5, 1, 55)
        assert cert is None and "v^2 - 1" in reason

    def test_missing_eigenvalue(self):
        system = EigenSystem(5, 1, {2: 3}, {})
        with pytest.raises(DataMissingError):
            is_n_admissible(23, system, -3, 5, 1, 55)

    def test_search_bound_25(self, f11a_mod5):
        certs = search_admissible(f11a_mod5, -3, 5, 1, 25, 55)
        assert [(c.v, c.eps) for c in certs] == [(2, 1), (17, 1), (23, 1)]

    def test_search_trivial_bound(self, f11a_mod5):
        assert search_admissible(f11a_mod5, -3, 5, 1, 1, 55) == []

    def test_prefix_property(self, f11a_mod5):
        small = search_admissible(f11a_mod5, -3, 5, 1, 25, 55)
        large = search_admissible(f11a_mod5, -3, 5, 1, 47, 55)
        assert [c.v for c in large][:len(small)] == [c.v for c in small]


class TestEisenstein:
    def test_eleven_a_mod5_is_eisenstein_congruent(self, f11a_mod5):
        # the level-11 Eisenstein ideal at 5: a_ell = ell + 1 mod 5 everywhere
        assert eisenstein_test(f11a_mod5, [2, 3, 7]) is True
        assert eisenstein_test(f11a_mod5, [2, 3, 7, 13, 19, 23, 29]) is True

    def test_eleven_a_mod7_is_not(self):
        avals = {ell: curve_a_ell(ell) % 7 for ell in (2, 3, 5)}
        system = EigenSystem(7, 1, avals, {})
        assert eisenstein_test(system, [2, 3, 5]) is False

    def test_trivial_system(self):
        system = EigenSystem(5, 1, {ell: ell + 1 for ell in (2, 3, 7)}, {})
        assert eisenstein_test(system, [2, 3, 7]) is True

    def test_empty_sample_rejected(self, f11a_mod5):
        with pytest.raises(UsageError):
            eisenstein_test(f11a_mod5, [])


@pytest.fixture(scope="module")
def raised_pair(f11a_mod5):
    sample = [ell for ell in range(2, 51) if is_prime(ell)
              and (2 * 5 * 11 * 17) % ell != 0]
    c1, _ = is_n_admissible(2, f11a_mod5, -3, 5, 1, 55)
    c2, _ = is_n_admissible(17, f11a_mod5, -3, 5, 1, 55)
    report = raise_level_search(f11a_mod5, c1, c2, old_disc=11, level=1,
                                sample_primes=sample)
    assert report.success, report.detail
    return report.pair


class TestRaiseLevel:
    def test_distinctness_gate(self, f11a_mod5):
        c1, _ = is_n_admissible(2, f11a_mod5, -3, 5, 1, 55)
        with pytest.raises(UsageError):
            raise_level_search(f11a_mod5, c1, c1, 11, 1, [3])

    def test_trivial_system_gate(self, f11a_mod5):
        c1, _ = is_n_admissible(2, f11a_mod5, -3, 5, 1, 55)
        c2, _ = is_n_admissible(17, f11a_mod5, -3, 5, 1, 55)
        with pytest.raises(UsageError):
            raise_level_search(f11a_mod5, c1, c2, 11, 1, [3],
                               is_trivial_system=True)

    def test_congruences_hold(self, raised_pair):
        assert raised_pair.verify()
        q = 5
        for ell in raised_pair.sampled:
            assert (raised_pair.new.value(ell) - raised_pair.old.value(ell)) % q == 0

    def test_u_signs(self, raised_pair):
        assert raised_pair.new.u[2] % 5 == 1
        assert raised_pair.new.u[17] % 5 == 1
        assert raised_pair.new.u[11] % 5 == 1  # matches U_11(f) = 1

    def test_cuspidal_certificate(self, raised_pair):
        assert raised_pair.cuspidal_certified

    def test_second_reciprocity_l_element(self, raised_pair):
        # the L-side object of the second reciprocity law exists and computes
        from quatlfun.pipeline import raised_l_element
        from quatlfun.exactalg import Character, involution, specialize
        element, report = raised_l_element(raised_pair, -3, 1, m=1)
        assert element.l_p.group_order == 5
        assert report.mu_lp >= 2 * report.nu
        chi = Character(5, 1, 1, 1)
        lhs = specialize(element.l_p, chi)
        rhs = specialize(element.l_phi, chi) * \
            specialize(involution(element.l_phi), chi)
        assert lhs.coeffs == rhs.coeffs
