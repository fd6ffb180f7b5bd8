"""Check orchestration: dependency-aware runs with machine-readable reports.

Checks are keyed by name and run in a fixed order so reports are stable.
A failed prerequisite downgrades dependents to ``skipped`` with a recorded
reason; failures are verdicts, never exceptions. All sampling flows through
the model's counter-based domain, so a report is a pure function of
(model, seed, samples, tol).
"""

from __future__ import annotations

import time
from typing import Callable, Optional, Sequence

from . import expr as ex
from .algebroid import CheckOutcome, check_axioms
from .connection import check_h1
from .exterior import exterior_derivative
from .geometry import c3_pointwise, c4_frame_check
from .hamiltonian import (check_h2, check_h3, quotient_by_isotropy,
                          torsion_criterion, zero_locus_report)
from .models import CheckReportModel, CheckResultModel, RuntimeModel
from .weil import (GradedModel, cartan_table_check, commirhod_outcome,
                   lemma916_outcome, parallel_projection_check,
                   prop917_outcome, theorem_check)

__all__ = ["CHECK_NAMES", "run_checks"]

CHECK_NAMES = [
    "closed_omega", "axioms", "c3_pointwise", "c4_frame", "h1", "h2", "h3",
    "torsion_criterion", "commirhod", "zero_locus", "weil_theorem",
    "cartan_table", "parallel_projection", "quotient", "lemma916", "prop917",
]


def _result_from_outcome(name: str, outcome: CheckOutcome,
                         detail: Optional[dict] = None) -> CheckResultModel:
    return CheckResultModel(
        name=name,
        verdict="pass" if outcome.passed else "fail",
        residual_max=outcome.residual,
        exact=outcome.exact if outcome.passed else None,
        witness=outcome.witness,
        detail=detail,
    )


def _skip(name: str, reason: str) -> CheckResultModel:
    return CheckResultModel(name=name, verdict="skipped", skipped_reason=reason)


class _Runner:
    def __init__(self, rt: RuntimeModel):
        self.rt = rt
        self.results: dict[str, CheckResultModel] = {}

    def passed(self, name: str) -> bool:
        r = self.results.get(name)
        return r is not None and r.verdict == "pass"

    def graded(self) -> GradedModel:
        return GradedModel(self.rt.algebroid, self.rt.connection)

    # -- individual checks --------------------------------------------------

    def closed_omega(self) -> CheckResultModel:
        if self.rt.omega is None:
            return _skip("closed_omega", "model has no omega")
        d = exterior_derivative(self.rt.omega)
        items = [(f"d omega on {key}", ex.is_identically_zero(c, self.rt.domain))
                 for key, c in d.terms.items()]
        return _result_from_outcome("closed_omega", CheckOutcome.from_verdicts(items))

    def axioms(self) -> CheckResultModel:
        rep = check_axioms(self.rt.algebroid, self.rt.domain)
        detail = {
            "anchor_morphism": rep.anchor_morphism.passed,
            "jacobi": rep.jacobi.passed,
            "d_squared": rep.d_squared.passed,
        }
        worst = max((rep.anchor_morphism, rep.jacobi, rep.d_squared),
                    key=lambda o: o.residual)
        outcome = CheckOutcome(rep.passed, worst.exact and rep.passed,
                               worst.residual, worst.witness)
        return _result_from_outcome("axioms", outcome, detail)

    def _omega_ready(self, name: str) -> Optional[CheckResultModel]:
        if self.rt.omega is None:
            return _skip(name, "model has no omega")
        if not self.passed("closed_omega"):
            return _skip(name, "omega is not certified closed")
        return None

    def _connection_ready(self, name: str) -> Optional[CheckResultModel]:
        if self.rt.synthesis_error is not None:
            return _skip(name, f"connection synthesis failed: {self.rt.synthesis_error}")
        return None

    def c3(self) -> CheckResultModel:
        gate = self._omega_ready("c3_pointwise")
        if gate:
            return gate
        points = self.rt.c3_points or [self.rt.domain.point(k) for k in range(3)]
        detail_rows = []
        worst = 0.0
        witness = None
        for p in points:
            rep = c3_pointwise(self.rt.bundle, self.rt.omega, p, self.rt.domain.tol)
            detail_rows.append({
                "point": list(p.values), "passed": rep.passed,
                "kernel_dim": rep.kernel_dim, "residual": rep.residual,
            })
            if not rep.passed and rep.residual >= worst:
                worst = rep.residual
                witness = f"{rep.witness} at {tuple(p.values)}"
        verdict = all(r["passed"] for r in detail_rows)
        return CheckResultModel(
            name="c3_pointwise", verdict="pass" if verdict else "fail",
            residual_max=worst, witness=witness, detail={"points": detail_rows})

    def c4(self) -> CheckResultModel:
        gate = self._omega_ready("c4_frame")
        if gate:
            return gate
        if not self.rt.frames:
            return _skip("c4_frame", "no orthogonal frame supplied")
        rep = c4_frame_check(self.rt.bundle, self.rt.omega, self.rt.frames,
                             self.rt.domain)
        return CheckResultModel(
            name="c4_frame", verdict="pass" if rep.passed else "fail",
            residual_max=rep.residual, witness=rep.witness,
            detail={"membership_ok": rep.membership_ok, "span_dim": rep.span_dim})

    def h1(self) -> CheckResultModel:
        gate = self._omega_ready("h1") or self._connection_ready("h1")
        if gate:
            return gate
        rep = check_h1(self.rt.bundle, self.rt.omega, self.rt.connection,
                       self.rt.domain, self.rt.algebroid)
        if not rep.agree:
            return CheckResultModel(
                name="h1", verdict="fail", residual_max=rep.dgamma.residual,
                witness="the D-gamma and opposite-connection routes disagree")
        detail = {"dgamma_passed": rep.dgamma.passed,
                  "opposite_passed": rep.opposite.passed}
        return _result_from_outcome("h1", rep.dgamma, detail)

    def h2(self) -> CheckResultModel:
        gate = self._omega_ready("h2") or self._connection_ready("h2")
        if gate:
            return gate
        if self.rt.momentum is None:
            return _skip("h2", "model has no momentum section")
        outcome = check_h2(self.rt.bundle, self.rt.omega, self.rt.connection,
                           self.rt.momentum, self.rt.domain)
        return _result_from_outcome("h2", outcome)

    def h3(self) -> CheckResultModel:
        gate = self._omega_ready("h3")
        if gate:
            return gate
        if self.rt.momentum is None:
            return _skip("h3", "model has no momentum section")
        if not self.passed("axioms"):
            return _skip("h3", "algebroid axioms fail")
        outcome = check_h3(self.rt.algebroid, self.rt.omega, self.rt.momentum,
                           self.rt.domain)
        return _result_from_outcome("h3", outcome)

    def torsion(self) -> CheckResultModel:
        gate = self._omega_ready("torsion_criterion") \
            or self._connection_ready("torsion_criterion")
        if gate:
            return gate
        if self.rt.momentum is None:
            return _skip("torsion_criterion", "model has no momentum section")
        if not self.passed("h2"):
            return _skip("torsion_criterion", "momentum equation fails")
        rep = torsion_criterion(self.rt.algebroid, self.rt.omega,
                                self.rt.connection, self.rt.momentum,
                                self.rt.domain)
        return _result_from_outcome("torsion_criterion", rep.outcome)

    def commirhod(self) -> CheckResultModel:
        if not self.passed("axioms"):
            return _skip("commirhod", "algebroid axioms fail")
        gate = self._connection_ready("commirhod")
        if gate:
            return gate
        return _result_from_outcome(
            "commirhod", commirhod_outcome(self.graded(), self.rt.domain))

    def zero_locus(self) -> CheckResultModel:
        gate = self._omega_ready("zero_locus") or self._connection_ready("zero_locus")
        if gate:
            return gate
        if self.rt.momentum is None:
            return _skip("zero_locus", "model has no momentum section")
        if not self.rt.locus_points:
            return _skip("zero_locus", "no locus points supplied")
        rows = []
        ok = True
        witness = None
        for p in self.rt.locus_points:
            rep = zero_locus_report(self.rt.algebroid, self.rt.omega,
                                    self.rt.connection, self.rt.momentum,
                                    p, self.rt.domain)
            row = {"point": list(p.values), "on_locus": rep.on_locus}
            if rep.on_locus:
                row.update({"clean": rep.clean, "tangent_dim": rep.tangent_dim,
                            "equals_orthogonal": rep.equals_orthogonal,
                            "coisotropic": rep.coisotropic,
                            "invariance_passed": rep.invariance.passed})
                if not (rep.equals_orthogonal and rep.invariance.passed):
                    ok = False
                    witness = witness or f"locus geometry fails at {tuple(p.values)}"
            else:
                ok = False
                witness = witness or f"point {tuple(p.values)} is not on the locus"
            rows.append(row)
        return CheckResultModel(
            name="zero_locus", verdict="pass" if ok else "fail",
            witness=witness, detail={"points": rows})

    def weil(self) -> CheckResultModel:
        gate = self._omega_ready("weil_theorem") or self._connection_ready("weil_theorem")
        if gate:
            return gate
        if self.rt.momentum is None:
            return _skip("weil_theorem", "model has no momentum section")
        rep = theorem_check(self.graded(), self.rt.omega, self.rt.momentum,
                            self.rt.domain)
        classical = {
            "closed": self.passed("closed_omega"),
            "momentum": self.passed("h2"),
            "bracket": self.results["h3"].verdict == "pass"
            if self.results.get("h3") and self.results["h3"].verdict != "skipped"
            else None,
        }
        components = {
            "closed": rep.closed_part.passed,
            "momentum": rep.momentum_part.passed,
            "bracket": rep.bracket_part.passed,
        }
        agreement = all(classical[k] is None or classical[k] == components[k]
                        for k in components)
        detail = {"bidegree_passed": components, "classical_passed": classical,
                  "oracle_agreement": agreement,
                  "extension_property": rep.extension_property.passed,
                  "residuals": {
                      "closed": rep.closed_part.residual,
                      "momentum": rep.momentum_part.residual,
                      "bracket": rep.bracket_part.residual,
                  }}
        if not agreement:
            return CheckResultModel(
                name="weil_theorem", verdict="fail",
                witness="bidegree verdicts disagree with the classical checks",
                detail=detail)
        worst = max(rep.closed_part.residual, rep.momentum_part.residual,
                    rep.bracket_part.residual)
        ok = rep.closed and rep.extension_property.passed
        witness = None
        if not ok:
            for label, part in (("(3,0)", rep.closed_part),
                                ("(2,1)", rep.momentum_part),
                                ("(1,2)", rep.bracket_part)):
                if not part.passed:
                    witness = f"bidegree {label}: {part.witness}"
                    break
        return CheckResultModel(
            name="weil_theorem", verdict="pass" if ok else "fail",
            residual_max=worst, witness=witness, detail=detail)

    def cartan(self) -> CheckResultModel:
        if not self.passed("axioms"):
            return _skip("cartan_table", "algebroid axioms fail")
        results = cartan_table_check(self.graded(), self.rt.domain,
                                     basket_seed=self.rt.domain.seed + 7)
        failing = [(label, o) for label, o in results if not o.passed]
        detail = {"relations": len(results),
                  "failing": [label for label, _ in failing]}
        if failing:
            label, o = failing[0]
            return CheckResultModel(name="cartan_table", verdict="fail",
                                    residual_max=o.residual,
                                    witness=f"{label}: {o.witness}", detail=detail)
        return CheckResultModel(name="cartan_table", verdict="pass",
                                residual_max=0.0, detail=detail)

    def parallel(self) -> CheckResultModel:
        gate = self._connection_ready("parallel_projection")
        if gate:
            return gate
        return _result_from_outcome(
            "parallel_projection",
            parallel_projection_check(self.graded(), self.rt.domain))

    def quotient(self) -> CheckResultModel:
        if self.rt.lie is None:
            return _skip("quotient", "model has no finite Lie algebra data")
        if self.rt.momentum is None:
            return _skip("quotient", "model has no momentum section")
        if not self.passed("axioms"):
            return _skip("quotient", "algebroid axioms fail")
        try:
            rep = quotient_by_isotropy(self.rt.lie, self.rt.bundle,
                                       self.rt.momentum, self.rt.domain)
        except ValueError as err:
            return CheckResultModel(name="quotient", verdict="fail",
                                    witness=str(err))
        names = self.rt.chart.names
        detail = {
            "kernel": [[str(c) for c in row] for row in rep.kernel],
            "kernel_values": [str(v) for v in rep.kernel_values],
            "momentum_constant_on_kernel": rep.momentum_constant_on_kernel,
            "descended_momentum": None if rep.descended is None
            else [ex.to_string(ex.simplify(m), names) for m in rep.descended],
            "obstruction_basis": [[str(c) for c in row]
                                  for row in rep.obstruction_basis],
            "obstruction_values": [str(v) for v in rep.obstruction_values],
            "descends_hamiltonian": rep.descends_hamiltonian,
        }
        if not rep.momentum_constant_on_kernel:
            return CheckResultModel(name="quotient", verdict="fail",
                                    witness=rep.note, detail=detail)
        return CheckResultModel(name="quotient", verdict="pass", detail=detail)

    def lemma916(self) -> CheckResultModel:
        if self.rt.omega is None:
            return _skip("lemma916", "model has no omega")
        if not self.passed("axioms"):
            # the identity consumes rho[a,b] = [rho a, rho b]
            return _skip("lemma916", "algebroid axioms fail")
        gate = self._connection_ready("lemma916")
        if gate:
            return gate
        outcome = lemma916_outcome(self.graded(), self.rt.omega, self.rt.domain)
        return _result_from_outcome("lemma916", outcome)

    def prop917(self) -> CheckResultModel:
        if self.rt.momentum is None:
            return _skip("prop917", "model has no momentum section")
        for dep in ("h1", "h2", "h3"):
            r = self.results.get(dep)
            if r is None or r.verdict != "pass":
                return _skip("prop917", f"{dep} does not pass")
        full, dt_only = prop917_outcome(self.graded(), self.rt.momentum,
                                        self.rt.domain)
        detail = {"curvature_torsion_passed": full.passed,
                  "torsion_only_passed": dt_only.passed}
        outcome = CheckOutcome(full.passed and dt_only.passed,
                               full.exact and dt_only.exact,
                               max(full.residual, dt_only.residual),
                               full.witness or dt_only.witness)
        return _result_from_outcome("prop917", outcome, detail)


def run_checks(rt: RuntimeModel, selection: Optional[Sequence[str]] = None,
               measure_time: bool = True) -> CheckReportModel:
    """Run the selected checks (all by default) in dependency order."""
    wanted = set(CHECK_NAMES if not selection else selection)
    unknown = wanted - set(CHECK_NAMES)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    # prerequisites always execute so that gating verdicts exist
    needed = set(wanted)
    if needed & {"c3_pointwise", "c4_frame", "h1", "h2", "h3",
                 "torsion_criterion", "zero_locus", "weil_theorem", "prop917"}:
        needed.add("closed_omega")
    if needed & {"h3", "torsion_criterion", "commirhod", "cartan_table",
                 "quotient", "prop917", "lemma916"}:
        needed.add("axioms")
    if needed & {"torsion_criterion", "weil_theorem", "prop917"}:
        needed |= {"h2"}
        needed.add("closed_omega")
    if needed & {"weil_theorem", "prop917"}:
        needed |= {"h3", "h1"}

    start = time.monotonic()
    runner = _Runner(rt)
    steps: list[tuple[str, Callable[[], CheckResultModel]]] = [
        ("closed_omega", runner.closed_omega),
        ("axioms", runner.axioms),
        ("c3_pointwise", runner.c3),
        ("c4_frame", runner.c4),
        ("h1", runner.h1),
        ("h2", runner.h2),
        ("h3", runner.h3),
        ("torsion_criterion", runner.torsion),
        ("commirhod", runner.commirhod),
        ("zero_locus", runner.zero_locus),
        ("weil_theorem", runner.weil),
        ("cartan_table", runner.cartan),
        ("parallel_projection", runner.parallel),
        ("quotient", runner.quotient),
        ("lemma916", runner.lemma916),
        ("prop917", runner.prop917),
    ]
    for name, step in steps:
        if name in needed:
            runner.results[name] = step()
    elapsed = int((time.monotonic() - start) * 1000) if measure_time else 0
    checks = [runner.results[name] for name in CHECK_NAMES
              if name in wanted and name in runner.results]
    return CheckReportModel(
        model=rt.name, seed=rt.domain.seed, samples=rt.domain.n_samples,
        tol=rt.domain.tol, checks=checks, elapsed_ms=elapsed)
