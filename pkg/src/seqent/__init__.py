"""seqent: entropy rates, edit pseudometrics, and induced systems for symbolic sequences."""

from .channels import (
    ChannelSpec,
    ProofTriple,
    budget,
    build_proof_triple,
    indel_channel,
    substitute_channel,
)
from .core import (
    IID,
    Alphabet,
    Markov,
    Mixture,
    Periodic,
    Word,
    analytic_entropy,
    derive_seed,
    make_rng,
    quasi_generic_path,
    sample_path,
)
from .entropy import (
    BlockCensus,
    EntropyEstimate,
    block_census,
    conditional_entropy,
    empirical_entropy,
    estimate_entropy_rate,
    max_entropy_geometric,
    shannon_h,
)
from .harness import (
    AbramovReport,
    ContinuityReport,
    ExperimentConfig,
    emit_plots,
    run_abramov,
    run_continuity,
    run_full,
)
from .induced import (
    AbramovResult,
    AdaptedName,
    InducedName,
    MarkedSet,
    NotVisitedError,
    ReturnTimeCensus,
    StructureError,
    abramov_check,
    decode_adapted_name,
    encode_adapted_name,
    induce,
    kac_check,
)
from .metrics import (
    CertificateError,
    DistanceProfile,
    MatchCertificate,
    distance_profile,
    edit_fn,
    edit_fn_fast,
    hamming_dn,
    verify_hat_f_certificate,
)

__version__ = "0.1.0"
