"""Admissible primes, the Eisenstein-congruence test, and level raising.

A prime v is n-admissible for an eigensystem when it avoids the bad set, is
inert in K, has p not dividing v^2 - 1, and p^n divides v + 1 - eps·a_v for a
sign eps. The two-prime level-raising search runs the Brandt machinery on the
discriminant v1·v2·(old discriminant) and looks for a congruent eigensystem
with the prescribed U-signs inside the Eisenstein-orthogonal sublattice; a
failed search is reported loudly, never silently.
"""

from __future__ import annotations

from dataclasses import dataclass

from .brandtforms import EigenSystem, QuotientGraph, eigensystems_mod
from .errors import DataMissingError, UsageError
from .exactalg.groupring import is_prime
from .quatarith import (algebra_from_discriminant, eichler_order, kronecker,
                        local_splitting, maximal_order, prime_factors)


@dataclass(frozen=True)
class AdmissibleCert:
    """A certified n-admissible prime with re-verifiable witnesses."""

    v: int
    eps: int
    p: int
    n: int
    disc_k: int
    bad_level: int  # p * N(+/-): primes the candidate must avoid
    a_v: int
    kronecker_value: int

    def reverify(self) -> bool:
        """Re-check all four conditions from the stored witnesses."""
        if self.bad_level % self.v == 0:
            return False
        if kronecker(self.disc_k, self.v) != -1 or self.kronecker_value != -1:
            return False
        if (self.v * self.v - 1) % self.p == 0:
            return False
        return (self.v + 1 - self.eps * self.a_v) % self.p ** self.n == 0

    def to_dict(self):
        return {"v": self.v, "eps": self.eps, "p": self.p, "n": self.n,
                "K": self.disc_k, "a_v": self.a_v}


def is_n_admissible(v: int, system: EigenSystem, disc_k: int, p: int, n: int,
                    bad_level: int):
    """AdmissibleCert, or (None, reason) when a condition fails.

    bad_level is the full level pN (the paper's bad set); a_v must be known
    to the eigensystem.
    """
    if not is_prime(v):
        raise UsageError(f"{v} is not prime")
    if bad_level % v == 0:
        return None, "divides the level pN"
    kron = kronecker(disc_k, v)
    if kron == 0:
        return None, "ramified in K"
    if kron == 1:
        return None, "split in K"
    if (v * v - 1) % p == 0:
        return None, "p divides v^2 - 1"
    try:
        a_v = system.value(v)
    except DataMissingError:
        raise DataMissingError(f"a_{v} unknown; supply it via fixture or computation")
    q = p ** n
    for eps in (1, -1):
        if (v + 1 - eps * a_v) % q == 0:
            return AdmissibleCert(v, eps, p, n, disc_k, bad_level, a_v % q, kron), None
    return None, "p^n divides neither v+1-a_v nor v+1+a_v"


def search_admissible(system: EigenSystem, disc_k: int, p: int, n: int,
                      bound: int, bad_level: int):
    """All admissible primes up to the bound, in increasing order."""
    out = []
    for v in range(2, bound + 1):
        if not is_prime(v):
            continue
        cert, _ = is_n_admissible(v, system, disc_k, p, n, bad_level)
        if cert is not None:
            out.append(cert)
    return out


def eisenstein_test(system: EigenSystem, sample_primes) -> bool:
    """Whether a_ell ≡ ell + 1 mod p^n at every sampled good prime.

    An empty sample proves nothing and is rejected. Single-prime coincidences
    happen, so callers should document their sample set.
    """
    samples = [ell for ell in sample_primes]
    if not samples:
        raise UsageError("empty sample set cannot certify anything")
    q = system.modulus
    return all((system.value(ell) - ell - 1) % q == 0 for ell in samples)


@dataclass
class CongruencePair:
    """A level-raised eigensystem congruent to the input away from v1 v2."""

    old: EigenSystem
    new: EigenSystem
    v1: int
    v2: int
    eps1: int
    eps2: int
    sampled: tuple
    excluded: tuple
    cuspidal_certified: bool
    old_disc: int = 1
    level: int = 1

    def verify(self) -> bool:
        q = self.old.modulus
        for ell in self.sampled:
            if (self.old.value(ell) - self.new.value(ell)) % q != 0:
                return False
        return (self.new.u[self.v1] - self.eps1) % q == 0 and \
            (self.new.u[self.v2] - self.eps2) % q == 0


@dataclass
class RaiseReport:
    """Outcome of the two-prime congruence search; failure is a falsifier."""

    success: bool
    pair: object
    detail: str
    candidates: tuple


def raise_level_search(system: EigenSystem, cert1: AdmissibleCert,
                       cert2: AdmissibleCert, old_disc: int, level: int,
                       sample_primes, is_trivial_system: bool = False,
                       graph: QuotientGraph = None) -> RaiseReport:
    """Search disc v1·v2·N^- for an eigensystem congruent to the input.

    The target carries U_{v_i} ≡ eps_i and U_w ≡ a_w at old bad primes, with
    T_ell ≡ a_ell at the sampled primes. The eigenvector is required to lie in
    the Eisenstein-orthogonal sublattice (the trivial line is excluded), which
    realizes the construction's nontriviality. The input itself must not be
    the trivial system of its own level.
    """
    v1, v2 = cert1.v, cert2.v
    if v1 == v2:
        raise UsageError("the two admissible primes must be distinct")
    if is_trivial_system:
        raise UsageError("level raising is not defined for the trivial "
                         "(reducible, norm-form) system")
    for cert in (cert1, cert2):
        if not cert.reverify():
            raise UsageError(f"admissible certificate for {cert.v} fails re-verification")
    p, n = system.p, system.n
    new_disc = old_disc * v1 * v2
    if graph is None:
        alg = algebra_from_discriminant(new_disc)
        order = maximal_order(alg)
        if level != 1:
            order = eichler_order(order, level, local_splitting)
        graph = QuotientGraph(order, _aux_p(new_disc * level * p))
    samples = tuple(ell for ell in sample_primes
                    if new_disc * level * p % ell != 0)
    candidates = eigensystems_mod(graph, samples, p, n, level_tag="vertex",
                                  cuspidal_only=True)
    q = p ** n
    matches = []
    for cand in candidates:
        if any((cand.value(ell) - system.value(ell)) % q for ell in samples):
            continue
        if (cand.u.get(v1, None) is None) or (cand.u[v1] - cert1.eps) % q:
            continue
        if (cand.u.get(v2, None) is None) or (cand.u[v2] - cert2.eps) % q:
            continue
        ok = True
        for w in prime_factors(old_disc):
            try:
                if (cand.value(w) - system.value(w)) % q:
                    ok = False
            except DataMissingError:
                pass  # old eigenvalue unavailable: congruence not testable there
        if ok:
            matches.append(cand)
    if not matches:
        return RaiseReport(False, None,
                           "no congruent eigensystem on disc "
                           f"{new_disc}: falsifier for the level-raising instance",
                           tuple(candidates))
    chosen = matches[0]
    pair = CongruencePair(system, chosen, v1, v2, cert1.eps, cert2.eps,
                          samples, tuple(prime_factors(new_disc * level * p)),
                          cuspidal_certified=True, old_disc=old_disc,
                          level=level)
    if not pair.verify():
        raise UsageError("internal: congruence pair fails its own verification")
    return RaiseReport(True, pair, f"found on disc {new_disc}", tuple(matches))


def _aux_p(bad: int) -> int:
    ell = 2
    while True:
        if is_prime(ell) and bad % ell != 0:
            return ell
        ell += 1
