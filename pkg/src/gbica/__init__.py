"""Large-alphabet source coding through binary decompositions."""
from .probability import (
    JointDistribution,
    binary_entropy,
    empirical_distribution,
    gen_markov,
    gen_uniform_simplex,
    gen_zipf,
    sample,
    sum_marginal_entropies,
)
from .transforms import (
    PermutationTransform,
    apply,
    block_order_permutation,
    cost,
    decode_descriptor,
    encode_descriptor,
    linear_transform,
    order_permutation,
)
from .bica_exact import branch_and_bound_optimal, exhaustive_optimum, recover_independent_components
from .bica_relax import build_pwl_bound, objective_descent_qary, relaxed_bica_binary
from .bica_linear import greedy_linear_bica, linear_lower_bound, xor_entropy_table
from .entropy_coding import decode_stream, encode_stream, huffman_build
from .universal import (
    blockwise_pipeline,
    minimax_redundancy,
    patterns_bound,
    permutation_coded_decode,
    permutation_coded_encode,
    sliding_window_decode,
    sliding_window_encode,
    total_size_blocks,
)
from .vq import bica_ecvq, ecvq, gaussian_rate_distortion, lattice_quantize
from .experiments import ingest_word_frequencies, run_experiment

__version__ = "0.1.0"
