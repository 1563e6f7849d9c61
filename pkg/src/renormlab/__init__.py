# read version from installed package
from importlib.metadata import version
__version__ = version("renormlab")

from .numerics import (
    DEFAULT_PRECISION,
    PRECISION_CAP,
    CertReal,
    Comparison,
    PrecisionExhaustedError,
    as_rational,
    cert_cmp,
    cert_pow,
    cert_root,
    cert_sqrt,
    refine_compare,
)
from .reports import Report, Verdict, summary_frame, write_summary_workbook
from .seqspace import (
    Ambient,
    BlockIso,
    BlockVec,
    CSeq,
    IsoCElem,
    act_blocks,
    act_c,
    c0sum_sorted_norm,
    c_renorm,
    c_renorm_map,
    l1sum_sc_norm,
    sorted_sc_norm,
    sup_norm,
)
from .l1space import (
    FDAction,
    FreeWord,
    IntervalMap,
    L1Iso,
    SearchBudgetError,
    StepFn,
    apply_iso,
    compose_iso,
    eval_word,
    f2_counterexample,
    fd_apply,
    find_np,
    fundamental_domain_action,
    l1_norm,
    parse_word,
    pn_apply,
    pn_defect_schedule,
    step_from_json,
    step_to_json,
)
from .cantorspace import (
    CylFn,
    ObstructionCertificate,
    XFn,
    XPoint,
    classify,
    odometer_act,
    odometer_sc_norm,
    subshift_certificate,
    verify_cover_identities,
)
from .renormkit import (
    EquivariantMapDescriptor,
    NormOracle,
    certify_injectivity,
    check_equivalence,
    check_equivariance,
    check_invariance,
    check_obstruction,
    check_strict_convexity,
    epsilon_close_norm,
    fundamental_domain_norm,
    l2_assembly,
    orbit_sup_norm,
    pn_descriptor,
    pushforward_norm,
)
from .scenarios import SCENARIOS, ScenarioConfig, run_scenario

__all__ = [
    "DEFAULT_PRECISION",
    "PRECISION_CAP",
    "CertReal",
    "Comparison",
    "PrecisionExhaustedError",
    "as_rational",
    "cert_cmp",
    "cert_pow",
    "cert_root",
    "cert_sqrt",
    "refine_compare",
    "Report",
    "Verdict",
    "summary_frame",
    "write_summary_workbook",
    "Ambient",
    "BlockIso",
    "BlockVec",
    "CSeq",
    "IsoCElem",
    "act_blocks",
    "act_c",
    "c0sum_sorted_norm",
    "c_renorm",
    "c_renorm_map",
    "l1sum_sc_norm",
    "sorted_sc_norm",
    "sup_norm",
    "FDAction",
    "FreeWord",
    "IntervalMap",
    "L1Iso",
    "SearchBudgetError",
    "StepFn",
    "apply_iso",
    "compose_iso",
    "eval_word",
    "f2_counterexample",
    "fd_apply",
    "find_np",
    "fundamental_domain_action",
    "l1_norm",
    "parse_word",
    "pn_apply",
    "pn_defect_schedule",
    "step_from_json",
    "step_to_json",
    "CylFn",
    "ObstructionCertificate",
    "XFn",
    "XPoint",
    "classify",
    "odometer_act",
    "odometer_sc_norm",
    "subshift_certificate",
    "verify_cover_identities",
    "EquivariantMapDescriptor",
    "NormOracle",
    "certify_injectivity",
    "check_equivalence",
    "check_equivariance",
    "check_invariance",
    "check_obstruction",
    "check_strict_convexity",
    "epsilon_close_norm",
    "fundamental_domain_norm",
    "l2_assembly",
    "orbit_sup_norm",
    "pn_descriptor",
    "pushforward_norm",
    "SCENARIOS",
    "ScenarioConfig",
    "run_scenario",
]
