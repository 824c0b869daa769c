"""Quotient graphs, Brandt/Hecke matrices, eigensystems, p-stabilization.

The quotient of the Bruhat-Tits tree by the p-unit group of an Eichler order
is realized through right-ideal classes: a tree vertex L maps to the ideal
{x in O : iota_p(x)·Z_p^2 ⊆ L} (all other places unchanged), a tree edge to
the analogous ideal of the level-p suborder. Completeness of the transport is
certified against independently computed class sets with their mass
certificates, so any inconsistency surfaces loudly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import bttree
from .errors import (DataMissingError, InvariantViolationError, UsageError)
from .exactalg import IntMatrix, kernel_mod
from .quatarith import (RightIdeal, eichler_mass, ideal_class_set,
                        local_splitting, neighbor_matrix, prime_factors,
                        two_sided_prime)
from .quatarith.classset import ClassSet
from .quatarith.ideal import reduce_ideal
from .quatarith.lattice import Lattice4
from .quatarith.order import QuaternionOrder


@dataclass(frozen=True)
class AutomorphicForm:
    """Vector of values on vertex or edge classes, over Z or Z/p^n."""

    values: tuple
    level_tag: str  # "vertex" or "edge"
    modulus: object = None  # None for integral forms, else (p, n)

    def __post_init__(self):
        if self.level_tag not in ("vertex", "edge"):
            raise UsageError("level tag must be 'vertex' or 'edge'")


@dataclass
class EigenSystem:
    """Map from primes to eigenvalues mod p^n, plus level eigenvalues.

    `a` holds T_ell eigenvalues at good primes, `u` the U_q eigenvalues at
    primes dividing the discriminant or level (including p when relevant).
    """

    p: int
    n: int
    a: dict
    u: dict = field(default_factory=dict)
    provenance: str = "computed"
    eisenstein: object = None

    @property
    def modulus(self) -> int:
        return self.p ** self.n

    def value(self, ell: int) -> int:
        if ell in self.a:
            return self.a[ell] % self.modulus
        if ell in self.u:
            return self.u[ell] % self.modulus
        raise DataMissingError(f"eigenvalue at {ell} is not available")

    def to_json(self) -> str:
        return json.dumps({"p": self.p, "n": self.n,
                           "a": {str(k): v for k, v in sorted(self.a.items())},
                           "eps": {str(k): v for k, v in sorted(self.u.items())},
                           "provenance": self.provenance}, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "EigenSystem":
        d = json.loads(text)
        return EigenSystem(d["p"], d["n"],
                           {int(k): v for k, v in d.get("a", {}).items()},
                           {int(k): v for k, v in d.get("eps", {}).items()},
                           d.get("provenance", "external fixture"))


class QuotientGraph:
    """Tree quotient data for an Eichler order at an auxiliary prime p.

    Vertex classes live at level N+; edge classes at level p N+. Both class
    sets carry mass certificates; the tree walk must rediscover every class
    or construction fails.
    """

    def __init__(self, base_order: QuaternionOrder, p: int, prec: int = 16,
                 max_radius: int = 40):
        disc = base_order.alg.discriminant
        level = base_order.reduced_discriminant() // disc
        if (disc * level) % p == 0:
            raise UsageError("p must be coprime to discriminant and level")
        self.p = p
        self.disc = disc
        self.level = level
        self.base_order = base_order
        self.max_radius = max_radius
        self.splitting = local_splitting(base_order, p, prec)
        self.vertex_classes = ideal_class_set(base_order,
                                              _aux_prime(disc * level * p))
        self._vertex_memo = {}
        self._edge_memo = {}
        self._matrix_memo = {}
        self.vertex_reps = {}
        self.parity_reps = {}
        self.edge_reps = {}
        self.edge_parity_reps = {}
        # edge-level data is built lazily: vertex-only consumers (eigensystem
        # searches on large discriminants) never pay for it
        self._edge_order_cache = None
        self._edge_classes_cache = None
        self._walked = False

    @property
    def edge_order(self) -> QuaternionOrder:
        if self._edge_order_cache is None:
            self._edge_order_cache = self._edge_order()
        return self._edge_order_cache

    @property
    def edge_classes(self) -> ClassSet:
        if self._edge_classes_cache is None:
            self._edge_classes_cache = ideal_class_set(
                self.edge_order, _aux_prime(self.disc * self.level * self.p))
        return self._edge_classes_cache

    def ensure_walk(self):
        if not self._walked:
            self._walk(self.max_radius)
            self._walked = True

    # -- construction --------------------------------------------------------

    def _edge_order(self) -> QuaternionOrder:
        """Level-p suborder cut out by the transport splitting itself."""
        spl = self.splitting
        p = self.p
        rows = []
        base = self.base_order.lattice
        cond = [[spl.apply(_unit_coords(i))[1][0] % p for i in range(4)]]
        gens = kernel_mod(IntMatrix.from_rows(cond), p, 1)
        new_rows = [[x * p for x in r] for r in base.rows]
        for g in gens:
            new_rows.append([sum(g[i] * base.rows[i][k] for i in range(4))
                             for k in range(4)])
        order = QuaternionOrder(self.base_order.alg, Lattice4(base.den, new_rows))
        if order.reduced_discriminant() != self.disc * self.level * p:
            raise InvariantViolationError("edge order has wrong discriminant")
        return order

    def _walk(self, max_radius: int):
        """BFS the tree, classifying vertices and edges until all classes appear."""
        p = self.p
        root = bttree.root_vertex(p)
        frontier = [root]
        seen = {root}
        self._note_vertex(root)
        radius = 0
        while frontier and radius < max_radius:
            if self._complete():
                break
            radius += 1
            nxt = []
            for v in frontier:
                for w in bttree.neighbors(v):
                    self._note_edge(bttree.TreeEdge(v, w))
                    self._note_edge(bttree.TreeEdge(w, v))
                    if w not in seen:
                        seen.add(w)
                        self._note_vertex(w)
                        nxt.append(w)
            frontier = nxt
        if not self._complete():
            raise InvariantViolationError(
                "tree walk did not reach every ideal class; transport broken")

    def _complete(self):
        return (len(self.vertex_reps) == len(self.vertex_classes)
                and len(self.edge_reps) == len(self.edge_classes)
                and len(self.parity_reps) == 2 * len(self.vertex_classes))

    def _note_vertex(self, v):
        idx = self.classify_vertex(v)
        self.vertex_reps.setdefault(idx, v)
        self.parity_reps.setdefault((idx, v.parity()), v)
        return idx

    def _note_edge(self, e):
        idx = self.classify_edge(e)
        self.edge_reps.setdefault(idx, e)
        self.edge_parity_reps.setdefault((idx, e.source.parity()), e)
        return idx

    # -- transport -----------------------------------------------------------

    def classify_vertex(self, v) -> int:
        key = (v.a, v.b, v.d)
        hit = self._vertex_memo.get(key)
        if hit is not None:
            return hit
        ideal = self._vertex_ideal(v)
        idx = self.vertex_classes.classify(reduce_ideal(ideal))
        self._vertex_memo[key] = idx
        return idx

    def classify_edge(self, e) -> int:
        key = (e.source.a, e.source.b, e.source.d,
               e.target.a, e.target.b, e.target.d)
        hit = self._edge_memo.get(key)
        if hit is not None:
            return hit
        ideal = self._edge_ideal(e)
        idx = self.edge_classes.classify(reduce_ideal(ideal))
        self._edge_memo[key] = idx
        return idx

    def _vertex_ideal(self, v) -> RightIdeal:
        """{x in O : iota(x) has columns in L} + p^k O, as a right ideal."""
        k = v.det_exponent
        if k == 0:
            return RightIdeal.unit_ideal(self.base_order)
        cond = [(v.matrix(), 1, (1, 1))]
        return self._ideal_from_conditions(cond, k, self.base_order)

    def _edge_ideal(self, e) -> RightIdeal:
        """Ideal of the chain condition: columns in L_s, shifted columns in M_t.

        The second condition maps the standard chain (Z_p^2 ⊃ e1, p e2) into
        (L_s ⊃ M_t): iota(x)·diag(1, p) must land in M_t mod p^(k_s + 1).
        """
        ks = e.source.det_exponent
        m_t = _chain_sublattice(e)
        kt = ks + 1
        cond = [(e.source.matrix(), self.p, (1, 1)),  # mod p^ks, rescaled
                (m_t, 1, (1, self.p))]
        return self._ideal_from_conditions(cond, kt, self.edge_order)

    def _ideal_from_conditions(self, conditions, k, target_order):
        """Sublattice where adj(g)·iota(x)·col_scales ≡ 0 mod p^k for each condition.

        conditions: (g 2x2 integer columns matrix, row multiplier, per-column
        multipliers). Containment in g·M_2(Z_p) is exactly adj(g)·m ≡ 0 mod
        det(g), applied to the scaled columns. The ambient is always the base
        order: away from p the two orders agree, and the local Hom need not
        lie inside the level-p suborder.
        """
        p = self.p
        q = p ** k
        if self.splitting.prec < k + 2:
            raise InvariantViolationError("transport splitting precision too low")
        base = self.base_order
        images = [self.splitting.apply(_unit_coords(i)) for i in range(4)]
        rows = []
        for g, mult, col_scales in conditions:
            adj = ((g[1][1], -g[0][1]), (-g[1][0], g[0][0]))
            for r in range(2):
                for s in range(2):
                    row = []
                    for mi in images:
                        val = sum(adj[r][t] * mi[t][s] for t in range(2))
                        row.append(val * mult * col_scales[s] % q)
                    rows.append(row)
        gens = kernel_mod(IntMatrix.from_rows(rows), p, k)
        lat_rows = [[x * q for x in r] for r in base.lattice.rows]
        for gvec in gens:
            lat_rows.append([sum(gvec[i] * base.lattice.rows[i][c] for i in range(4))
                             for c in range(4)])
        lat = Lattice4(base.lattice.den, lat_rows)
        return RightIdeal(target_order, lat)

    # -- operators ------------------------------------------------------------

    def vertex_count(self):
        return len(self.vertex_classes)

    def edge_count(self):
        return len(self.edge_classes)

    def vertex_weights(self):
        return list(self.vertex_classes.unit_counts)

    def edge_weights(self):
        return list(self.edge_classes.unit_counts)

    def source_class(self, edge_idx: int) -> int:
        self.ensure_walk()
        return self.classify_vertex(self.edge_reps[edge_idx].source)

    def target_class(self, edge_idx: int) -> int:
        self.ensure_walk()
        return self.classify_vertex(self.edge_reps[edge_idx].target)

    def tp_matrix(self):
        """T_p on vertex classes via tree neighbors of each representative."""
        self.ensure_walk()
        if "tp" in self._matrix_memo:
            return self._matrix_memo["tp"]
        h = self.vertex_count()
        rows = []
        for i in range(h):
            row = [0] * h
            for w in bttree.neighbors(self.vertex_reps[i]):
                row[self.classify_vertex(w)] += 1
            rows.append(row)
        self._matrix_memo["tp"] = rows
        return rows

    def up_matrix(self):
        """U_p on edge classes: sum over forward edges, reversal excluded."""
        self.ensure_walk()
        if "up" in self._matrix_memo:
            return self._matrix_memo["up"]
        m = self.edge_count()
        rows = []
        for i in range(m):
            row = [0] * m
            for f in bttree.forward_edges(self.edge_reps[i]):
                row[self.classify_edge(f)] += 1
            rows.append(row)
        self._matrix_memo["up"] = rows
        return rows

    def incidence_source(self):
        """m_s[v][e] = #edges at rep(v) in edge class e (as sources)."""
        self.ensure_walk()
        h, m = self.vertex_count(), self.edge_count()
        rows = []
        for i in range(h):
            row = [0] * m
            for e in bttree.edges_from(self.vertex_reps[i]):
                row[self.classify_edge(e)] += 1
            rows.append(row)
        return rows

    def incidence_target(self):
        """m_t[v][e] = #edges into rep(v) in edge class e (as targets)."""
        self.ensure_walk()
        h, m = self.vertex_count(), self.edge_count()
        rows = []
        for i in range(h):
            row = [0] * m
            for e in bttree.edges_from(self.vertex_reps[i]):
                row[self.classify_edge(e.reverse())] += 1
            rows.append(row)
        return rows

    def verify_regularity(self):
        """(p+1)-regularity and the two-level mass identity."""
        p = self.p
        for row in self.tp_matrix():
            if sum(row) != p + 1:
                raise InvariantViolationError("vertex quotient is not (p+1)-regular")
        for row in self.up_matrix():
            if sum(row) != p:
                raise InvariantViolationError("forward-edge count is not p")
        if eichler_mass(self.disc, self.level * p) != \
                (p + 1) * eichler_mass(self.disc, self.level):
            raise InvariantViolationError("mass bookkeeping failed")

    def brandt_matrix(self, ell: int, level_tag: str = "vertex"):
        """Neighbor-count Hecke matrix T_ell on the chosen class set.

        ell must be coprime to disc·level (and to p for the edge level).
        """
        key = ("brandt", ell, level_tag)
        if key in self._matrix_memo:
            return self._matrix_memo[key]
        cs = self.vertex_classes if level_tag == "vertex" else self.edge_classes
        total = self.disc * self.level * (self.p if level_tag == "edge" else 1)
        if total % ell == 0:
            raise UsageError("Brandt matrix wants a prime coprime to the level data")
        mat = neighbor_matrix(cs, ell)
        self._matrix_memo[key] = mat
        return mat

    def uq_matrix(self, q: int, level_tag: str = "vertex"):
        """Permutation action of the two-sided prime at a ramified q."""
        if self.disc % q != 0:
            raise UsageError("U_q this way only at discriminant primes")
        key = ("uq", q, level_tag)
        if key in self._matrix_memo:
            return self._matrix_memo[key]
        cs = self.vertex_classes if level_tag == "vertex" else self.edge_classes
        order = cs.order
        pq = two_sided_prime(order, q)
        h = len(cs)
        rows = [[0] * h for _ in range(h)]
        for i, rep in enumerate(cs.reps):
            image = RightIdeal(order, rep.product_lattice(pq))
            rows[i][cs.classify(reduce_ideal(image))] = 1
        self._matrix_memo[key] = rows
        return rows


def _unit_coords(i):
    v = [0, 0, 0, 0]
    v[i] = 1
    return tuple(v)


def _aux_prime(bad: int) -> int:
    ell = 2
    while True:
        if _is_prime_small(ell) and bad % ell != 0:
            return ell
        ell += 1


def _is_prime_small(n):
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _chain_sublattice(e):
    """Integer 2x2 matrix of the index-p sublattice of L_s in the class of t."""
    p = e.p
    ms = e.source.matrix()
    mt = e.target.matrix()
    ks, kt = e.source.det_exponent, e.target.det_exponent
    diff = ks + 1 - kt
    if diff % 2 != 0 or diff < 0:
        raise InvariantViolationError("edge endpoints have incompatible parity")
    j = diff // 2
    scaled = ((mt[0][0] * p ** j, mt[0][1] * p ** j),
              (mt[1][0] * p ** j, mt[1][1] * p ** j))
    # containment check: adj(ms)·scaled ≡ 0 mod det(ms) = p^ks
    adj = ((ms[1][1], -ms[0][1]), (0, ms[0][0]))
    for r in range(2):
        for s in range(2):
            val = sum(adj[r][t] * scaled[t][s] for t in range(2))
            if val % (p ** ks) != 0:
                raise InvariantViolationError("chain sublattice not contained in source")
    return scaled


# ---------------------------------------------------------------------------
# Operator application and eigensystem extraction
# ---------------------------------------------------------------------------

def tp_apply(graph: QuotientGraph, form: AutomorphicForm) -> AutomorphicForm:
    """Combinatorial T_p on a vertex form: sum over quotient tree neighbors."""
    if form.level_tag != "vertex":
        raise UsageError("T_p acts on vertex forms")
    mat = graph.tp_matrix()
    vals = tuple(sum(mat[i][j] * form.values[j] for j in range(len(form.values)))
                 for i in range(len(form.values)))
    if form.modulus:
        p, n = form.modulus
        vals = tuple(v % p ** n for v in vals)
    return AutomorphicForm(vals, "vertex", form.modulus)


def up_apply(graph: QuotientGraph, form: AutomorphicForm) -> AutomorphicForm:
    """Combinatorial U_p on an edge form: forward edges minus the reversal."""
    if form.level_tag != "edge":
        raise UsageError("U_p acts on edge forms")
    mat = graph.up_matrix()
    vals = tuple(sum(mat[i][j] * form.values[j] for j in range(len(form.values)))
                 for i in range(len(form.values)))
    if form.modulus:
        p, n = form.modulus
        vals = tuple(v % p ** n for v in vals)
    return AutomorphicForm(vals, "edge", form.modulus)


def hensel_unit_root(a_p: int, p: int, n: int) -> int:
    """The unit root of x^2 - a_p x + p mod p^n (requires p-ordinarity)."""
    if a_p % p == 0:
        raise UsageError("non-ordinary input: a_p is not a unit mod p")
    q = p ** n
    r = a_p % p  # x^2 - a x + p ≡ x(x - a) mod p: unit root ≡ a
    for _ in range(n.bit_length() + 2):
        f = (r * r - a_p * r + p) % q
        fp = (2 * r - a_p) % q
        r = (r - f * pow(fp, -1, q)) % q
    if (r * r - a_p * r + p) % q != 0:
        raise InvariantViolationError("Hensel lift failed")
    return r


def p_stabilize(system: EigenSystem, p: int) -> EigenSystem:
    """Attach the U_p eigenvalue alpha_p (unit root) to a T_p eigensystem."""
    if p != system.p:
        raise UsageError("stabilization prime must match the system's modulus prime")
    if p not in system.a:
        raise DataMissingError("need the T_p eigenvalue to stabilize")
    alpha = hensel_unit_root(system.a[p], p, system.n)
    out = EigenSystem(system.p, system.n, dict(system.a), dict(system.u),
                      system.provenance + "+p-stabilized", system.eisenstein)
    out.u[p] = alpha
    del out.a[p]
    return out


def _submodule_has_primitive(gens, p, n):
    return any(any(x % p for x in g) for g in gens)


def eigensystems_mod(graph: QuotientGraph, sample_primes, p: int, n: int,
                     level_tag: str = "vertex", include_up: bool = None,
                     cuspidal_only: bool = False):
    """All primitive simultaneous eigensystems of the Hecke action mod p^n.

    Operators: T_ell for the sample primes, U_q at discriminant primes, and
    U_p on the edge level (on by default there). Systems must admit a common
    eigenvector with a unit coordinate; with cuspidal_only the search runs in
    the sublattice orthogonal to the trivial (norm-form) line under the
    unit-weight pairing.
    """
    q = p ** n
    cs = graph.vertex_classes if level_tag == "vertex" else graph.edge_classes
    h = len(cs)
    if include_up is None:
        include_up = level_tag == "edge"
    operators = []
    labels = []
    for ell in sorted(sample_primes):
        operators.append(graph.brandt_matrix(ell, level_tag))
        labels.append(("a", ell))
    for qq in prime_factors(graph.disc):
        operators.append(graph.uq_matrix(qq, level_tag))
        labels.append(("u", qq))
    if include_up and level_tag == "edge":
        operators.append(graph.up_matrix())
        labels.append(("u", p))

    start_basis = [tuple(1 if i == j else 0 for i in range(h)) for j in range(h)]
    if cuspidal_only:
        start_basis = _cuspidal_sublattice(cs, p, n)

    results = []

    def extend(idx, assignment, basis):
        if idx == len(operators):
            results.append(list(assignment))
            return
        mat = operators[idx]
        for a in range(q):
            rows = [[(mat[i][j] - (a if i == j else 0)) % q for j in range(h)]
                    for i in range(h)]
            mb = [[sum(rows[i][k] * basis[col][k] for k in range(h)) % q
                   for col in range(len(basis))] for i in range(h)]
            gens = kernel_mod(IntMatrix.from_rows(mb), p, n)
            new_basis = []
            for gvec in gens:
                vec = tuple(sum(gvec[c] * basis[c][k] for c in range(len(basis))) % q
                            for k in range(h))
                if any(vec):
                    new_basis.append(vec)
            if new_basis and _submodule_has_primitive(new_basis, p, n):
                extend(idx + 1, assignment + [a], new_basis)

    extend(0, [], start_basis)

    systems = []
    seen = set()
    for assignment in results:
        key = tuple(assignment)
        if key in seen:
            continue
        seen.add(key)
        a_map, u_map = {}, {}
        for (kind, ell), val in zip(labels, assignment):
            (a_map if kind == "a" else u_map)[ell] = val
        sys_ = EigenSystem(p, n, a_map, u_map, "computed")
        sys_.eisenstein = all((ell + 1 - a_map[ell]) % q == 0 for ell in a_map)
        systems.append(sys_)
    return systems


def _cuspidal_sublattice(cs: ClassSet, p: int, n: int):
    """Generators of the sublattice orthogonal to the trivial line.

    The pairing weights are 1/#units; the weights must be units mod p for the
    quotient to split off the trivial line cleanly.
    """
    q = p ** n
    weights = cs.unit_counts
    if any(w % p == 0 for w in weights):
        raise UsageError("a unit-group order is divisible by p; "
                         "the trivial line does not split off")
    scale = 1
    for w in weights:
        scale = scale * w // _gcd(scale, w)
    functional = [(scale // w) % q for w in weights]
    m = IntMatrix.from_rows([functional])
    return [g for g in kernel_mod(m, p, n) if any(g)]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def eigenvector_mod(graph: QuotientGraph, system: EigenSystem, sample_primes,
                    level_tag: str = "edge", cuspidal_only: bool = False):
    """A canonical primitive joint eigenvector realizing the system mod p^n."""
    p, n = system.p, system.n
    q = p ** n
    operators = []
    assignments = []
    for ell in sorted(sample_primes):
        operators.append(graph.brandt_matrix(ell, level_tag))
        assignments.append(system.value(ell))
    for qq in prime_factors(graph.disc):
        operators.append(graph.uq_matrix(qq, level_tag))
        assignments.append(system.value(qq))
    if level_tag == "edge" and p in system.u:
        operators.append(graph.up_matrix())
        assignments.append(system.u[p])
    h = len(graph.edge_classes if level_tag == "edge" else graph.vertex_classes)
    basis = [tuple(1 if i == j else 0 for i in range(h)) for j in range(h)]
    if cuspidal_only:
        basis = _cuspidal_sublattice(
            graph.edge_classes if level_tag == "edge" else graph.vertex_classes, p, n)
    gens = joint_eigenvectors_mod_from(operators, assignments, p, n, h, basis)
    prim = [g for g in gens if any(x % p for x in g)]
    if not prim:
        raise DataMissingError("no primitive eigenvector realizes the system")
    vec = prim[0]
    # canonical scaling: first unit coordinate becomes 1
    for x in vec:
        if x % p:
            inv = pow(x, -1, q)
            vec = tuple(v * inv % q for v in vec)
            break
    return AutomorphicForm(vec, level_tag, (p, n))


def joint_eigenvectors_mod_from(operators, assignments, p, n, h, basis):
    q = p ** n
    for mat, a in zip(operators, assignments):
        rows = [[(mat[i][j] - (a if i == j else 0)) % q for j in range(h)]
                for i in range(h)]
        mb = [[sum(rows[i][k] * basis[col][k] for k in range(h)) % q
               for col in range(len(basis))] for i in range(h)]
        gens = kernel_mod(IntMatrix.from_rows(mb), p, n)
        new_basis = []
        for gvec in gens:
            vec = tuple(sum(gvec[c] * basis[c][k] for c in range(len(basis))) % q
                        for k in range(h))
            if any(vec):
                new_basis.append(vec)
        basis = new_basis
        if not basis:
            return []
    return basis


def rational_eigensystems(matrices, labels):
    """Integer joint eigensystems of commuting integer matrices.

    Candidates are bounded by row sums (the spectra of nonnegative Brandt
    matrices); eigenspaces are cut exactly over Z. Returns (assignment, basis)
    pairs covering the rationally split part of the space.
    """
    from .exactalg import kernel_basis
    h = len(matrices[0])
    results = []

    def extend(idx, assignment, basis_rows):
        if idx == len(matrices):
            results.append((dict(zip(labels, assignment)), basis_rows))
            return
        mat = matrices[idx]
        bound = max(sum(abs(x) for x in row) for row in mat)
        for a in range(-bound, bound + 1):
            rows = [[mat[i][j] - (a if i == j else 0) for j in range(h)]
                    for i in range(h)]
            # restrict to the current rational subspace
            mb = [[sum(rows[i][k] * b[k] for k in range(h)) for b in basis_rows]
                  for i in range(h)]
            gens = kernel_basis(IntMatrix.from_rows(mb)) if basis_rows else ()
            new_basis = []
            for g in gens:
                vec = tuple(sum(g[c] * basis_rows[c][k] for c in range(len(basis_rows)))
                            for k in range(h))
                if any(vec):
                    new_basis.append(vec)
            if new_basis:
                extend(idx + 1, assignment + [a], new_basis)

    start = [tuple(1 if i == j else 0 for i in range(h)) for j in range(h)]
    extend(0, [], start)
    return results


def mk_dual_graph(graph: QuotientGraph):
    """The parity-doubled dual graph: vertices are (class, parity) pairs.

    Vertices biject with ideal classes times Z/2 and edges with the level-p
    classes; each edge joins an even vertex to an odd one, realizing the
    bipartite source-even orientation. Unit lengths by default (fixture data
    may override downstream).
    """
    from .compgraph import LengthGraph
    graph.ensure_walk()
    h = graph.vertex_count()
    edges = []
    for idx in range(graph.edge_count()):
        rep = graph.edge_parity_reps.get((idx, 0))
        if rep is None:
            # use the odd-source representative reversed onto the even side
            odd = graph.edge_parity_reps.get((idx, 1))
            if odd is None:
                raise InvariantViolationError("edge class missing parity data")
            rep = odd.reverse()
            s_idx = graph.classify_vertex(rep.source)
            t_idx = graph.classify_vertex(rep.target)
        else:
            s_idx = graph.classify_vertex(rep.source)
            t_idx = graph.classify_vertex(rep.target)
        # source even, target odd
        edges.append((2 * s_idx, 2 * t_idx + 1, 1))
    return LengthGraph.make(2 * h, edges)


def mk_graph_checks(graph: QuotientGraph):
    """Bipartite-orientation facts for the doubled graph.

    Every cycle-basis vector lies in the degree-zero edge lattice (each edge
    runs even to odd, so closed cycles alternate signs), and the Betti number
    matches the doubled Euler count.
    """
    from .compgraph import character_group
    doubled = mk_dual_graph(graph)
    cycles = character_group(doubled)
    for vec in cycles.basis:
        if sum(vec) != 0:
            raise InvariantViolationError(
                "a cycle escapes the degree-zero edge lattice")
    expected = len(doubled.non_loop_edges()) - doubled.n_vertices \
        + doubled.n_components()
    if cycles.rank != expected:
        raise InvariantViolationError("doubled-graph Betti count mismatch")
    return doubled, cycles


@dataclass(frozen=True)
class DegeneracyData:
    """Matrices of the two pullbacks, two traces, and the v-new kernel."""

    pull_source: tuple  # E x V
    pull_target: tuple
    trace_source: tuple  # V x E
    trace_target: tuple
    vnew_basis: tuple

    @property
    def vnew_rank(self):
        return len(self.vnew_basis)


def degeneracy_and_vnew(graph: QuotientGraph) -> DegeneracyData:
    """Degeneracy/trace maps between the two levels and the new subspace."""
    h, m = graph.vertex_count(), graph.edge_count()
    pull_s = [[0] * h for _ in range(m)]
    pull_t = [[0] * h for _ in range(m)]
    for e in range(m):
        pull_s[e][graph.source_class(e)] = 1
        pull_t[e][graph.target_class(e)] = 1
    trace_s = graph.incidence_source()
    trace_t = graph.incidence_target()
    # v-new = integer kernel of the stacked traces
    from .quatarith.lattice import integer_kernel
    stacked = [list(trace_s[i]) for i in range(h)] + [list(trace_t[i]) for i in range(h)]
    basis = integer_kernel(stacked)
    return DegeneracyData(tuple(map(tuple, pull_s)), tuple(map(tuple, pull_t)),
                          tuple(map(tuple, trace_s)), tuple(map(tuple, trace_t)),
                          tuple(basis))
