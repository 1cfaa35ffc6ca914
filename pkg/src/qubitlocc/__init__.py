"""Local distinguishability of orthogonal multi-qubit states."""

from .config import RunConfig, Tolerances, load_config
from .corpus import CorpusEntry, corpus_get, corpus_names
from .errors import (
    CorpusLookupError,
    DimensionError,
    DomainError,
    IllConditionedError,
    InvalidCutError,
    InvalidStateError,
    PreconditionError,
    QubitLoccError,
    StructuralError,
    UnsupportedSizeError,
)
from .lpmcc import (
    CandidateSet,
    Decision,
    Leaf,
    MeasurementBasis,
    Node,
    decide,
    first_mover_exists,
    ok_candidates,
    protocol_to_product_basis,
    verify_protocol,
)
from .prodfind import ProductStateHit, is_product, product_states_in_subspace, upb_check
from .qstate import (
    DensityOperator,
    PairOverlapOperator,
    PureState,
    Subspace,
    bloch_decompose,
    collapse,
    pair_overlap_operator,
    support,
    support_contains,
)
from .schmidt import SchmidtBounds, decide_2x2, orth_schmidt_number, schmidt_rank, schmidt_sum_criterion

__version__ = "0.1.0"
