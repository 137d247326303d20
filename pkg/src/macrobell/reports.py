"""Full classification of a box: polytope membership, CHSH strength,
Tsirelson and information-causality necessary checks, and the
macroscopic-limit label from an exact majority-vote trace."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .boxes import Box, ChshReport, chsh
from .ic import IcReport, ic_necessary
from .macro import MAJORITY, LimitLabel, TracePoint, VotingRule, limit_classify, macro_chsh_trace
from .polytope import MembershipVerdict, is_local, is_no_signaling, tsirelson_check

DEFAULT_TRACE_M = tuple(range(2, 201, 2))


@dataclass(frozen=True)
class ClassificationReport:
    chsh: ChshReport
    no_signaling: MembershipVerdict
    local: MembershipVerdict
    tsirelson_ok: bool
    ic: IcReport
    limit: LimitLabel
    trace: tuple[TracePoint, ...]

    def to_dict(self) -> dict:
        return {
            "chsh": {
                "canonical_value": self.chsh.canonical_value,
                "max_violation": self.chsh.max_violation,
                "symmetrized_values": list(self.chsh.symmetrized_values),
                "a_coefficients": list(self.chsh.a_coefficients),
            },
            "no_signaling": {
                "in_set": self.no_signaling.in_set,
                "worst_violation": self.no_signaling.worst_violation,
                "detail": self.no_signaling.detail,
            },
            "local": {
                "in_set": self.local.in_set,
                "certificate": (
                    self.local.certificate.to_json() if self.local.certificate else None
                ),
            },
            "tsirelson_ok": self.tsirelson_ok,
            "ic": {
                "q1": self.ic.q1,
                "q2": self.ic.q2,
                "e1": self.ic.e1,
                "e2": self.ic.e2,
                "lhs": self.ic.lhs,
                "satisfied": self.ic.satisfied,
                "lhs_relabel_max": self.ic.lhs_relabel_max,
            },
            "limit": {
                "label": self.limit.label,
                "final_value": self.limit.final_value,
            },
            "trace": [
                {"M": p.M, "I_chsh": p.i_chsh, "A": list(p.a_values)} for p in self.trace
            ],
        }


def classify_box(
    box: Box,
    M_values: Optional[Sequence[int]] = None,
    rule: VotingRule = MAJORITY,
    window: int = 5,
    tol: float = 0.15,
) -> ClassificationReport:
    """Run every check on one box.

    The limit label is read from the tail of the exact trace (default even
    M up to 200, window 5, tolerance 0.15; the canonical PR box sits at
    I = 3.887 by M = 200, which the default tolerance must accommodate).
    The label reflects the computed trace only, not any asymptotic argument.
    """
    ms = list(M_values) if M_values is not None else list(DEFAULT_TRACE_M)
    trace = macro_chsh_trace(box, ms, rule)
    return ClassificationReport(
        chsh=chsh(box),
        no_signaling=is_no_signaling(box.table),
        local=is_local(box),
        tsirelson_ok=tsirelson_check(box),
        ic=ic_necessary(box),
        limit=limit_classify(trace, window=window, tol=tol),
        trace=tuple(trace),
    )
