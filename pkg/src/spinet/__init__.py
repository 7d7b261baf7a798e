"""Mixed-state polarization transport on spin networks.

Exact fidelity evaluation (dense and free-fermion), Hilbert-Schmidt
perfect-transport conditions, the walk-operator hierarchy and synthesis of
engineered networks that collapse onto perfect-transfer chains.
"""

from .conditions import (
    appendix_unitary,
    check_invariance,
    check_perfect_transport,
    classify_appendix_form,
    fidelity_hs,
    hamiltonian_support_check,
    solve_lambda_combination,
    swap_transport_check,
)
from .engineering import (
    BranchPlan,
    ClassChain,
    EngineeredNetwork,
    collapse_network,
    collapsed_op,
    expand_chain,
    parse_plan,
    verify_perfect_transport,
)
from .errors import (
    CapacityError,
    CollapseError,
    ContractError,
    DimensionError,
    NetworkParseError,
    SpinetError,
    SynthesisError,
)
from .fermion import fermion_fidelity, fermion_trace
from .hilbert import dense, fidelity_trace, general_fidelity, pauli_decompose, transport_fidelity
from .library import library, parse_library_spec
from .network import (
    HamiltonianKind,
    SpinNetwork,
    chain,
    hamiltonian,
    parse_network,
    pst_chain,
    pst_couplings,
    serialize_network,
)
from .pauli import OperatorExpr, PauliString, commutator, hs_inner
from .walk import extract_A, moments, skeleton, table1_check, walk_operators

__version__ = "0.1.0"
