"""Exact finite-truncation toolkit for weak-L^p (Lorentz) spaces."""
from ._backend import BACKEND
from .core import (
    AtomicVector,
    DomainError,
    DyadicStep,
    Params,
    RearrangementProfile,
    cond_expect,
    lq1_norm,
    make_params,
    pairing,
    quasi_norm,
    rearrange,
    weak_norm,
)
from .embeddings import (
    BlockLayout,
    LevelStack,
    NotInYkError,
    SplitDiagnostic,
    YkMembership,
    build_layout,
    p_project,
    phi_eval,
    phi_nj_eval,
    r_embed,
    r_profile,
    r_split,
    restrict_block,
    restrict_tower,
    shift_snj,
    stack_norm,
    t_embed,
    tower_limit,
    unit_stack,
    w_project,
    yk_check,
    yk_reconstruct,
)
from .harness import (
    SuiteReport,
    TrialConfig,
    chain_report,
    gen_atoms,
    gen_stack,
    gen_step,
    oracle_norm,
    run_suite,
)

__version__ = "0.1.0"
