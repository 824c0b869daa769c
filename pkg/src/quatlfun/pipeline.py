"""End-to-end configuration and the L-element pipeline.

cmd-level glue: validate the factorization constraints, pick the eigenform
(computed rational system or external fixture), stabilize, transport to the
edge level, run the measure, and emit reproducible artifacts.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .brandtforms import (EigenSystem, QuotientGraph, eigenvector_mod,
                          hensel_unit_root, p_stabilize, rational_eigensystems)
from .errors import (ConfigurationError, DataMissingError)
from .exactalg.groupring import is_prime
from .padicl import (LFunctionElement, MeasurePipeline, check_projection_tower,
                     full_Lp, mu_two_nu_check)
from .quatarith import (algebra_from_discriminant, eichler_order,
                        ideal_class_set, kronecker, local_splitting,
                        maximal_order, prime_factors)
from .quatarith.embedding import embedding_with_base
from .toruscm import build_torus


@dataclass
class PipelineConfig:
    """Validated run parameters for the L-element pipeline."""

    n_plus: int
    n_minus: int
    p: int
    n: int
    m_max: int
    disc_k: int
    fixture_path: str = None
    cache_dir: str = None
    sample_bound: int = 20

    def validate(self):
        if not is_prime(self.p):
            raise ConfigurationError(f"p = {self.p} is not prime")
        if self.n < 1 or self.m_max < 0:
            raise ConfigurationError("need n >= 1 and m_max >= 0")
        if self.disc_k >= 0 or self.disc_k % 4 not in (0, 1):
            raise ConfigurationError("K must be given by a negative quadratic discriminant")
        minus_primes = prime_factors(self.n_minus)
        sq = 1
        for q in minus_primes:
            sq *= q
        if sq != self.n_minus or len(minus_primes) % 2 == 0:
            raise ConfigurationError(
                "the inert part must be squarefree with an odd number of primes")
        if self.n_plus < 1:
            raise ConfigurationError("split level must be positive")
        for q in minus_primes:
            if kronecker(self.disc_k, q) != -1:
                raise ConfigurationError(
                    f"factorization rule violated: {q} divides the inert part "
                    f"but is not inert in K (kronecker = {kronecker(self.disc_k, q)})")
        for ell in prime_factors(self.n_plus):
            if kronecker(self.disc_k, ell) != 1:
                raise ConfigurationError(
                    f"factorization rule violated: {ell} divides the split part "
                    f"but does not split in K")
        if kronecker(self.disc_k, self.p) == 1:
            raise ConfigurationError(
                f"factorization rule violated: p = {self.p} splits in K")
        bad = self.p * self.n_plus * self.n_minus
        for q in minus_primes:
            if self.n_plus % q == 0 or self.p == q:
                raise ConfigurationError("level parts must be pairwise coprime")
        if self.n_plus % self.p == 0:
            raise ConfigurationError("p must not divide the split level")
        return self


@dataclass
class LfunResult:
    config: PipelineConfig
    system: EigenSystem
    alpha: int
    element: LFunctionElement
    mu_report: object
    sample_primes: tuple
    base_unit_count: int

    def artifacts(self):
        """Map of artifact name to canonical JSON text (byte-reproducible)."""
        mr = self.mu_report
        return {
            "L_phi.json": self.element.l_phi.to_json(),
            "L_p.json": self.element.l_p.to_json(),
            "mu_report.json": json.dumps({
                "mu_L_p": mr.mu_lp, "mu_L_phi": mr.mu_lphi, "nu": mr.nu,
                "cap": mr.cap, "equality": mr.equality, "anomaly": mr.anomaly,
            }, sort_keys=True),
            "certificate.json": json.dumps({
                "distribution_relation": "verified",
                "projection_tower": "verified",
                "levels": self.element.level,
                "alpha": self.alpha,
                "eigenvalues": {str(k): v for k, v in sorted(self.system.a.items())},
                "u_eigenvalues": {str(k): v for k, v in sorted(self.system.u.items())},
                "sample_primes": list(self.sample_primes),
            }, sort_keys=True),
        }


def good_primes(bound: int, bad: int):
    return tuple(ell for ell in range(2, bound + 1)
                 if is_prime(ell) and bad % ell != 0)


def select_vertex_system(graph: QuotientGraph, config: PipelineConfig):
    """The pipeline's eigensystem at the vertex level.

    Fixture wins when provided; otherwise the rational route must isolate a
    unique non-trivial system (integer eigenvalues), else a fixture is
    demanded.
    """
    if config.fixture_path:
        with open(config.fixture_path) as fh:
            system = EigenSystem.from_json(fh.read())
        if system.p != config.p or system.n < config.n:
            raise ConfigurationError("fixture modulus does not cover the run")
        return system
    bad = config.p * config.n_plus * config.n_minus
    sample = good_primes(config.sample_bound, bad)
    needed = [config.p] + list(sample)
    mats = [graph.brandt_matrix(ell) for ell in needed]
    systems = rational_eigensystems(mats, needed)
    nontrivial = [a for a, _ in systems
                  if any(a[ell] != ell + 1 for ell in needed)]
    if len(nontrivial) != 1:
        raise DataMissingError(
            f"{len(nontrivial)} non-trivial rational systems found; "
            "supply an eigensystem fixture to disambiguate")
    chosen = nontrivial[0]
    q = config.p ** config.n
    a_map = {ell: chosen[ell] % q for ell in needed}
    u_map = {}
    for qq in prime_factors(config.n_minus):
        mat = graph.uq_matrix(qq)
        vec = _rational_vector_for(graph, mats, needed, chosen)
        image = [sum(mat[i][j] * vec[j] for j in range(len(vec)))
                 for i in range(len(vec))]
        ratio = _eigen_ratio(image, vec)
        u_map[qq] = ratio % q
    return EigenSystem(config.p, config.n, a_map, u_map, "computed (Brandt)")


def _rational_vector_for(graph, mats, labels, assignment):
    from .exactalg import IntMatrix, kernel_basis
    h = len(mats[0])
    basis = [tuple(1 if i == j else 0 for i in range(h)) for j in range(h)]
    for mat, ell in zip(mats, labels):
        a = assignment[ell]
        rows = [[mat[i][j] - (a if i == j else 0) for j in range(h)] for i in range(h)]
        mb = [[sum(rows[i][k] * b[k] for k in range(h)) for b in basis]
              for i in range(h)]
        gens = kernel_basis(IntMatrix.from_rows(mb))
        basis = [tuple(sum(g[c] * basis[c][k] for c in range(len(basis)))
                       for k in range(h)) for g in gens if any(g)]
        if not basis:
            raise DataMissingError("rational system lost its eigenvector")
    return basis[0]


def _eigen_ratio(image, vec):
    for a, b in zip(image, vec):
        if b != 0:
            if a % b:
                raise DataMissingError("U_q does not act by an integer on the system")
            return a // b
    raise DataMissingError("zero eigenvector")


def run_lfun(config: PipelineConfig) -> LfunResult:
    config.validate()
    if config.cache_dir:
        from . import cache
        cache.configure(config.cache_dir)
    alg = algebra_from_discriminant(config.n_minus)
    maxorder = maximal_order(alg)
    order = maxorder if config.n_plus == 1 else \
        eichler_order(maxorder, config.n_plus, local_splitting)
    aux = _first_coprime(config.p * config.n_plus * config.n_minus)
    class_set = ideal_class_set(order, aux)
    base, embedding = embedding_with_base(class_set, config.disc_k, 1)
    graph = QuotientGraph(base, config.p)
    system = select_vertex_system(graph, config)

    q = config.p ** config.n
    if config.p in system.u:
        alpha = system.u[config.p] % q
        stabilized = system
    else:
        stabilized = p_stabilize(
            EigenSystem(config.p, config.n,
                        {k: v % q for k, v in system.a.items()},
                        {k: v % q for k, v in system.u.items()},
                        system.provenance), config.p)
        alpha = stabilized.u[config.p]

    bad = config.p * config.n_plus * config.n_minus
    sample = good_primes(config.sample_bound, bad)
    target = EigenSystem(config.p, config.n,
                         {ell: stabilized.value(ell) for ell in sample},
                         {config.p: alpha,
                          **{qq: stabilized.value(qq)
                             for qq in prime_factors(config.n_minus)}},
                         stabilized.provenance)
    form = eigenvector_mod(graph, target, sample, "edge")
    torus = build_torus(config.disc_k, embedding, graph)
    pipeline = MeasurePipeline(graph, torus, form, alpha, config.n)
    pipeline.check_distribution(config.m_max)
    check_projection_tower(pipeline, config.m_max)
    element = full_Lp(pipeline, config.m_max,
                      provenance=f"disc {config.n_minus}, level {config.n_plus}, "
                                 f"p {config.p}, K {config.disc_k}")
    report = mu_two_nu_check(pipeline, element)
    return LfunResult(config, target, alpha, element, report, sample,
                      base.unit_count())


def _first_coprime(bad: int) -> int:
    ell = 2
    while True:
        if is_prime(ell) and bad % ell != 0:
            return ell
        ell += 1


def raised_l_element(pair, disc_k: int, n_plus: int, m: int,
                     pin_primes=(3, 7, 13)):
    """L element of a level-raised eigensystem: the second reciprocity law's
    right-hand object, computed on the raised discriminant.

    The raised system must be ordinary at p (its T_p eigenvalue is read off
    its own eigenvector); everything else mirrors the main pipeline.
    """
    system = pair.new
    p, n = system.p, system.n
    q = p ** n
    new_disc = pair.v1 * pair.v2 * pair.old_disc
    alg = algebra_from_discriminant(new_disc)
    order = maximal_order(alg)
    if n_plus != 1:
        order = eichler_order(order, n_plus, local_splitting)
    class_set = ideal_class_set(order, _first_coprime(new_disc * n_plus * p))
    base, embedding = embedding_with_base(class_set, disc_k, 1)
    graph = QuotientGraph(base, p)

    pins = [ell for ell in pin_primes if (new_disc * n_plus * p) % ell != 0]
    from .brandtforms import eigenvector_mod
    vertex_target = EigenSystem(p, n, {ell: system.value(ell) for ell in pins},
                                {qq: system.value(qq)
                                 for qq in prime_factors(new_disc)},
                                system.provenance)
    vec = eigenvector_mod(graph, vertex_target, pins, "vertex",
                          cuspidal_only=True)
    tp = graph.brandt_matrix(p)
    h = len(vec.values)
    image = [sum(tp[i][j] * vec.values[j] for j in range(h)) % q for i in range(h)]
    a_p = _mod_ratio(image, vec.values, p, n)
    alpha = hensel_unit_root(a_p, p, n)
    edge_target = EigenSystem(p, n, dict(vertex_target.a),
                              {p: alpha, **vertex_target.u},
                              system.provenance)
    form = eigenvector_mod(graph, edge_target, pins, "edge")
    torus = build_torus(disc_k, embedding, graph)
    from .padicl import MeasurePipeline
    pipeline = MeasurePipeline(graph, torus, form, alpha, n)
    pipeline.check_distribution(m)
    element = full_Lp(pipeline, m, provenance=f"raised disc {new_disc}")
    report = mu_two_nu_check(pipeline, element)
    return element, report


def _mod_ratio(image, vec, p, n):
    """a with image ≡ a·vec mod p^n, read off a unit coordinate."""
    q = p ** n
    for x, y in zip(image, vec):
        if y % p:
            a = x * pow(y, -1, q) % q
            break
    else:
        raise DataMissingError("eigenvector has no unit coordinate")
    for x, y in zip(image, vec):
        if (x - a * y) % q:
            raise DataMissingError("vector is not an eigenvector of T_p")
    return a


def write_artifacts(result: LfunResult, out_dir: str):
    os.makedirs(out_dir, exist_ok=True)
    for name, text in sorted(result.artifacts().items()):
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write(text)
            fh.write("\n")
