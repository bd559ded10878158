"""Quantum mutual entropy, channel capacities and entanglement classes.

Density matrices and Kraus operators are complex numpy arrays. Entropies are in nats.
"""

from ._qmi import (
    Channel,
    ConsistencyError,
    DimensionError,
    InvalidArgument,
    QmiError,
    SearchBudget,
    class_mutual_entropy,
    classical_mutual_entropy,
    classify_compound,
    cqc_capacity,
    cqc_mutual_entropy,
    d_compound,
    degree_of_disentanglement,
    entangled_mutual_entropy,
    holevo_bound,
    mutual_entropy,
    mutual_entropy_forms,
    partial_trace,
    pseudo_capacity,
    pseudo_mutual_entropy,
    q_entropy,
    quantum_capacity,
    relative_entropy,
    run,
    schatten_decomposition,
    standard_entanglement,
    tensor_product,
    verify,
    von_neumann_entropy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
