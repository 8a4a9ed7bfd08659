"""Quantum cluster algebras from quivers with potential: exact Laurent
expansions, QP mutation and DT-invariant wall crossing."""

from .quiver import IceQuiver, a2, kronecker, three_cycle, mutate_quiver, b_matrix
from .seed import QuantumSeed, initial_seed, quantize, mutate_seed, cluster_monomial
from .potential import QP, qp_mutate, nondegenerate_along, random_potential
from .dt import Stability, hn_factorize, dt_invariants, cluster_via_dt, dilog_product

__all__ = [
    "IceQuiver", "a2", "kronecker", "three_cycle", "mutate_quiver", "b_matrix",
    "QuantumSeed", "initial_seed", "quantize", "mutate_seed", "cluster_monomial",
    "QP", "qp_mutate", "nondegenerate_along", "random_potential",
    "Stability", "hn_factorize", "dt_invariants", "cluster_via_dt", "dilog_product",
]
