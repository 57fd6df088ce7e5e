"""Run-length constrained strand ensembles and DNA-synthesis cost analysis.

The package builds the transfer graph of words over {0..r-1} with runs
capped at k, solves its spectral data in closed form, samples strands from
the entropy-maximizing Markov chain, and measures synthesis cost of strand
batches under periodic or finite reference sequences.
"""

__version__ = "0.1.0"

from .constraints import (
    ConstraintParams,
    TransferGraph,
    build_graph,
    check_irreducible,
    count_words,
    from_rll_word,
    is_admissible,
    lsb_run,
    state_label,
    state_to_word,
    to_rll_word,
    word_to_state,
)
from .errors import (
    ComputationError,
    InadmissibleWord,
    InputError,
    InvalidParams,
    NoBracket,
    NoConvergence,
    NoSuchEdge,
    NotASupersequence,
    NumericalFailure,
    ShapeMismatch,
    SingularSystem,
    SymbolOutOfRange,
    SynthcostError,
    TooLarge,
)
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    cost_concentration_experiment,
    default_alternative_references,
    dominance_experiment,
    hoeffding_bound,
    max_edge_hitting_time,
    step_cost_tail_fractions,
)
from .measure import (
    Batch,
    MarkovMeasure,
    build_measure,
    default_thread_count,
    entropy_rate,
    pattern_probability,
    run_probability_table,
    sample_batch,
    transitions_favor_short_runs,
)
from .spectral import (
    SpectralData,
    capacity,
    char_poly,
    compute_spectral,
    eigvec_poly,
    extend_eigvec,
    left_eigvec_numeric,
    perron_eigenvalue,
    right_eigvec_by_extension,
    right_eigvec_closed_form,
    right_eigvec_power,
)
from .strandio import decode_lines, decode_word, encode_lines, encode_word
from .synthesis import (
    CostReport,
    ReferenceSeq,
    batch_cost,
    batch_final_positions,
    batch_step_costs,
    canonical_reference,
    compare_references,
    cost_report,
    expected_cost_rate,
    greedy_embed,
    is_subsequence,
    parse_reference,
    shortest_common_supersequence,
    step_cost,
)
