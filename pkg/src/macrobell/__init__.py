"""Toolkit for 2-2-2 no-signaling boxes: CHSH strength, polytope
membership, exact majority-vote coarse-graining of M independent copies,
Monte Carlo estimation, and the information-causality necessary test."""

from .boxes import (
    Box,
    ChshReport,
    ClassBox,
    EPS_PROB,
    FACET_SIGNS,
    LOCAL_VERTEX_IDS,
    MixtureSpec,
    all_local_vertices,
    box_from_json,
    box_to_json,
    chsh,
    class_generator,
    deterministic_vertex,
    make_box,
    mix,
    mix_boxes,
    pr_box,
    uniform_box,
    vertex_by_id,
)
from .errors import MacrobellError
from .ic import IcReport, class_v_F, cross_check_class_v, fig6_grid, ic_necessary
from .macro import (
    MAJORITY,
    LimitLabel,
    MacroBox,
    OutcomeTally,
    TracePoint,
    VotingRule,
    closed_form_case,
    coarse_grain_row,
    coarse_grain_row_exact,
    coarse_grain_setting,
    limit_classify,
    macro_box,
    macro_chsh_trace,
)
from .montecarlo import McEstimate, mc_chsh, sample_macro
from .polytope import (
    DecompositionCertificate,
    EPS_LP,
    MembershipVerdict,
    TSIRELSON_BOUND,
    decompose_ns,
    is_local,
    is_no_signaling,
    tsirelson_check,
)
from .reports import ClassificationReport, classify_box

__version__ = "0.1.0"

__all__ = [
    "Box",
    "ChshReport",
    "ClassBox",
    "ClassificationReport",
    "DecompositionCertificate",
    "EPS_LP",
    "EPS_PROB",
    "FACET_SIGNS",
    "IcReport",
    "LOCAL_VERTEX_IDS",
    "LimitLabel",
    "MAJORITY",
    "MacroBox",
    "MacrobellError",
    "McEstimate",
    "MembershipVerdict",
    "MixtureSpec",
    "OutcomeTally",
    "TSIRELSON_BOUND",
    "TracePoint",
    "VotingRule",
    "all_local_vertices",
    "box_from_json",
    "box_to_json",
    "chsh",
    "class_generator",
    "class_v_F",
    "classify_box",
    "closed_form_case",
    "coarse_grain_row",
    "coarse_grain_row_exact",
    "coarse_grain_setting",
    "cross_check_class_v",
    "decompose_ns",
    "deterministic_vertex",
    "fig6_grid",
    "ic_necessary",
    "is_local",
    "is_no_signaling",
    "limit_classify",
    "macro_box",
    "macro_chsh_trace",
    "make_box",
    "mc_chsh",
    "mix",
    "mix_boxes",
    "pr_box",
    "sample_macro",
    "tsirelson_check",
    "uniform_box",
    "vertex_by_id",
]
