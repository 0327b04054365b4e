"""SMT certificates for guarded Skolems.

Three kinds of obligation are discharged for a Skolem against its check:

* soundness of every case: ``guard => goal[y := f]``
* the local relation of every case, when it is still attached: ``guard => atoms[y := f]``
* coverage: ``premise => guard_1 or ... or guard_n``
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

from ...core.errors import RejectedInputError
from ...core.logic import Implies, conj, disj, substitute
from ...core.solver import SolverSession, Unknown
from .types import GuardedSkolem, QuantifiedCheck

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Finding:
    check: str
    subject: str
    outcome: Union[bool, Unknown]

    @property
    def ok(self) -> bool:
        return self.outcome is True

    def describe(self) -> str:
        if self.outcome is True:
            verdict = "ok"
        elif self.outcome is False:
            verdict = "FAILED"
        else:
            verdict = f"unknown ({self.outcome.reason})"  # type: ignore[union-attr]
        return f"{self.check} {self.subject}: {verdict}"


@dataclass
class CertificateReport:
    findings: List[Finding]
    init_ok: Optional[bool] = None

    @property
    def ok(self) -> bool:
        return self.init_ok is not False and all(f.ok for f in self.findings)

    def failures(self) -> List[Finding]:
        return [f for f in self.findings if not f.ok]

    def to_text(self) -> str:
        lines = [f.describe() for f in self.findings]
        if self.init_ok is not None:
            lines.insert(0, f"initial state: {'ok' if self.init_ok else 'FAILED'}")
        lines.append("CERTIFIED" if self.ok else f"NOT CERTIFIED ({len(self.failures())} failing)")
        return "\n".join(lines)


def certify_skolem(session: SolverSession, check: QuantifiedCheck, skolem: GuardedSkolem) -> List[Finding]:
    findings: List[Finding] = []
    for index, case in enumerate(skolem.cases):
        body = substitute(check.goal, case.assigns)
        outcome = session.check_valid(Implies(case.guard, body))  # type: ignore[arg-type]
        findings.append(Finding(check.tag, f"case {index}", outcome))
        if case.relation is not None:
            atoms = [a for y in case.relation.order for a in case.relation.atoms.get(y.name, ())]
            local = substitute(conj(*atoms), case.assigns)
            outcome = session.check_valid(Implies(case.guard, local))  # type: ignore[arg-type]
            findings.append(Finding(check.tag, f"case {index} relation", outcome))
    coverage = session.check_valid(Implies(check.premise, disj(*(c.guard for c in skolem.cases))))
    findings.append(Finding(check.tag, "coverage", coverage))
    for finding in findings:
        if not finding.ok:
            logger.warning("certificate %s", finding.describe())
    return findings


def _names(variables) -> List[str]:
    return sorted(v.name for v in variables)


def _require_pairing(checks: Sequence[QuantifiedCheck], skolems: Sequence[GuardedSkolem]) -> None:
    """Every check needs exactly one Skolem over the same symbols."""
    if len(checks) != len(skolems):
        raise RejectedInputError(f"{len(skolems)} skolems for {len(checks)} checks")
    for check, skolem in zip(checks, skolems):
        if check.tag != skolem.tag:
            raise RejectedInputError(f"skolem {skolem.tag} given for check {check.tag}")
        same_universals = _names(check.universals) == _names(skolem.universals)
        if not same_universals or _names(check.existentials) != _names(skolem.existentials):
            raise RejectedInputError(f"skolem {skolem.tag} ranges over other symbols than its check")


def certify_all(
    session: SolverSession,
    checks: Sequence[QuantifiedCheck],
    skolems: Sequence[GuardedSkolem],
    init_ok: Optional[bool] = None,
) -> CertificateReport:
    findings: List[Finding] = []
    _require_pairing(checks, skolems)
    for check, skolem in zip(checks, skolems):
        findings.extend(certify_skolem(session, check, skolem))
    report = CertificateReport(findings, init_ok)
    logger.info("certified %d skolems: %s", len(skolems), "ok" if report.ok else "failed")
    return report
