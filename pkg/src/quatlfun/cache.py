"""Content-addressed disk cache for class sets.

Entries are keyed by a hash of the defining data (algebra, order lattice,
neighbor prime), stored as human-diffable JSON, and re-verify their mass
certificate on load, so a corrupted cache is caught rather than trusted.
"""

from __future__ import annotations

import hashlib
import json
import os

from .errors import InvariantViolationError

_cache_dir = None


def configure(path):
    """Set (or disable, with None) the process-wide cache directory."""
    global _cache_dir
    _cache_dir = path
    if path:
        os.makedirs(path, exist_ok=True)


def cache_directory():
    return _cache_dir


def class_set_key(order, neighbor_prime: int) -> str:
    payload = json.dumps({
        "a": order.alg.a, "b": order.alg.b,
        "den": order.lattice.den, "rows": [list(r) for r in order.lattice.rows],
        "neighbor": neighbor_prime,
    }, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def store_class_set(cs) -> None:
    if _cache_dir is None:
        return
    key = class_set_key(cs.order, cs.neighbor_prime)
    data = {
        "disc": cs.disc, "level": cs.level, "neighbor": cs.neighbor_prime,
        "algebra": [cs.order.alg.a, cs.order.alg.b],
        "order": {"den": cs.order.lattice.den,
                  "rows": [list(r) for r in cs.order.lattice.rows]},
        "reps": [{"den": r.lattice.den, "rows": [list(x) for x in r.lattice.rows]}
                 for r in cs.reps],
        "unit_counts": list(cs.unit_counts),
    }
    path = os.path.join(_cache_dir, f"classset_{key}.json")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(data, fh, sort_keys=True, indent=1)
    os.replace(tmp, path)


def load_class_set(order, neighbor_prime: int):
    """Cached ClassSet for the order, or None. Mass re-verified on load."""
    if _cache_dir is None:
        return None
    from .quatarith.classset import ClassSet
    from .quatarith.ideal import RightIdeal
    from .quatarith.lattice import Lattice4
    key = class_set_key(order, neighbor_prime)
    path = os.path.join(_cache_dir, f"classset_{key}.json")
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        data = json.load(fh)
    if data["algebra"] != [order.alg.a, order.alg.b]:
        raise InvariantViolationError("cache entry collides with a different algebra")
    reps = [RightIdeal(order, Lattice4(r["den"], r["rows"], reduce=False))
            for r in data["reps"]]
    cs = ClassSet(order, data["disc"], data["level"], data["neighbor"],
                  reps, list(data["unit_counts"]))
    cs.verify_mass()
    return cs
