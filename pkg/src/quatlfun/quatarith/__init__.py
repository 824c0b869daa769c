"""Definite quaternion arithmetic over Q: orders, class sets, embeddings."""

from .algebra import (QuaternionAlgebra, algebra_from_discriminant,
                      hilbert_symbol, kronecker, legendre, ramified_primes)
from .classset import (ClassSet, eichler_mass, ideal_class_set,
                       neighbor_matrix, prime_factors)
from .embedding import Embedding, optimal_embedding, quadratic_generator
from .ideal import RightIdeal, isometric, neighbors
from .lattice import Lattice4
from .order import (QuaternionOrder, eichler_order, left_order_of,
                    maximal_order, standard_order, two_sided_prime)
from .splitting import LocalSplitting, local_splitting

__all__ = [
    "ClassSet", "Embedding", "Lattice4", "LocalSplitting", "QuaternionAlgebra",
    "QuaternionOrder", "RightIdeal", "algebra_from_discriminant",
    "eichler_mass", "eichler_order", "hilbert_symbol", "ideal_class_set",
    "isometric", "kronecker", "left_order_of", "legendre", "local_splitting",
    "maximal_order", "neighbor_matrix", "neighbors", "optimal_embedding",
    "prime_factors", "quadratic_generator", "ramified_primes",
    "standard_order", "two_sided_prime",
]
