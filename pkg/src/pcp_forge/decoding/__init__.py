"""Decoding graphs, the udPCP chain and the E-decoder."""

from .circuit import (
    Circuit,
    CircuitError,
    Gate,
    circuit_from_json,
    circuit_to_json,
    const_circuit,
    eval_circuit,
    random_circuit,
    random_satisfiable_circuit,
    satisfying_assignments,
    xor_circuit,
)
from .edecoder import (
    LinearDecodingGraph,
    estimate_decoding,
    exact_F_marginal,
    run_e_decoder,
    sample_conditioned_pair,
    sample_edecoder_instance,
    sampled_F_marginal,
    similarity_propagation,
    synthetic_linear_decoding_graph,
    total_variation,
)
from .graph import (
    DecodingGraph,
    DecodingGraphError,
    DEdge,
    TablePsi,
    VertexPsi,
    decoding_error,
    eval_decoding,
    eval_decoding_uniform,
    similarity_check,
    smoothness,
)
from .pcpp import PCPDecoder, PCPPVerifier, honest_proof, pcpp_to_udpcp, toy_pcpp
from .pipeline import PipelineResult, StageReport, run_pipeline
from .transforms import (
    Stage,
    degree_reduce_decoding,
    embed_decoding,
    lift_through,
    minimal_m,
    pad_vertices,
    udpcp_to_vertex_decoding_graph,
)
