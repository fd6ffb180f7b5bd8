"""Anchored vector bundles and Lie algebroids in a trivialized chart frame.

Models carry a fixed global frame a_1 .. a_r. The anchor is an r x n matrix
of expressions (row i holds the components of rho applied to a_i), the
bracket is determined by antisymmetric structure functions c^k_ij stored for
i < j, and exterior forms on the bundle live on increasing frame-index
tuples. The differential of the algebroid complex acts by

    (d nu)(a_i0, ..., a_iq) = sum_s (-1)^s rho(a_is) . nu(rest)
                            + sum_{s<t} (-1)^{s+t} nu([a_is, a_it], rest)

which on functions is (d f)(a) = rho(a) . f.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from . import expr as ex
from .expr import Expression, SampleDomain
from .exterior import Chart, VectorField, lie_bracket, sort_with_sign

__all__ = [
    "AnchoredBundle", "LieAlgebroid", "Section", "AForm", "anchor_apply",
    "algebroid_bracket", "algebroid_differential", "check_axioms",
    "AxiomReport",
]


@dataclass(frozen=True)
class AnchoredBundle:
    chart: Chart
    rank: int
    anchor: tuple  # anchor[i][alpha] = component alpha of rho(a_i)

    def __post_init__(self):
        if len(self.anchor) != self.rank:
            raise ValueError("anchor needs one row per frame section")
        for row in self.anchor:
            if len(row) != self.chart.dim:
                raise ValueError("anchor rows must match chart dimension")

    @staticmethod
    def from_strings(chart: Chart, rows: Sequence[Sequence[str]]) -> "AnchoredBundle":
        return AnchoredBundle(chart, len(rows),
                              tuple(tuple(chart.parse(c) for c in row) for row in rows))

    def frame_field(self, i: int) -> VectorField:
        return VectorField(self.chart, tuple(self.anchor[i]))


@dataclass(frozen=True)
class LieAlgebroid:
    bundle: AnchoredBundle
    structure: Mapping  # (i, j, k) -> Expression, stored for i < j

    def __post_init__(self):
        for (i, j, k) in self.structure:
            r = self.bundle.rank
            if not (0 <= i < j < r and 0 <= k < r):
                raise ValueError(f"structure key {(i, j, k)} out of range")

    @staticmethod
    def from_strings(bundle: AnchoredBundle, entries: Mapping[tuple, str]) -> "LieAlgebroid":
        return LieAlgebroid(bundle, {tuple(k): bundle.chart.parse(v)
                                     for k, v in entries.items()})

    @property
    def chart(self) -> Chart:
        return self.bundle.chart

    @property
    def rank(self) -> int:
        return self.bundle.rank

    def c(self, i: int, j: int, k: int) -> Expression:
        """Structure function with antisymmetry in (i, j) built in."""
        if i == j:
            return ex.ZERO
        if i < j:
            return self.structure.get((i, j, k), ex.ZERO)
        return ex.neg(self.structure.get((j, i, k), ex.ZERO))

    def frame_bracket(self, i: int, j: int) -> "Section":
        return Section(self, tuple(self.c(i, j, k) for k in range(self.rank)))


@dataclass(frozen=True)
class Section:
    algebroid: LieAlgebroid
    components: tuple

    def __post_init__(self):
        if len(self.components) != self.algebroid.rank:
            raise ValueError("component count must equal the rank")

    @staticmethod
    def frame(algebroid: LieAlgebroid, i: int) -> "Section":
        comps = [ex.ZERO] * algebroid.rank
        comps[i] = ex.ONE
        return Section(algebroid, tuple(comps))

    @staticmethod
    def from_strings(algebroid: LieAlgebroid, comps: Sequence[str]) -> "Section":
        return Section(algebroid, tuple(algebroid.chart.parse(c) for c in comps))

    def scale(self, f: Expression) -> "Section":
        return Section(self.algebroid, tuple(ex.mul(f, c) for c in self.components))

    def add(self, other: "Section") -> "Section":
        return Section(self.algebroid, tuple(ex.add(a, b) for a, b in
                                             zip(self.components, other.components)))

    def subtract(self, other: "Section") -> "Section":
        return Section(self.algebroid,
                       tuple(ex.sub(a, b) for a, b in
                             zip(self.components, other.components)))


class AForm:
    """Element of the exterior algebra of the dual bundle, degree q."""

    def __init__(self, algebroid: LieAlgebroid, degree: int, terms: Mapping[tuple, Expression]):
        r = algebroid.rank
        if degree < 0 or degree > r + 1:
            raise ValueError(f"degree {degree} out of range for rank {r}")
        if degree > r and terms:
            raise ValueError("forms above the top degree must be zero")
        self.algebroid = algebroid
        self.degree = degree
        clean = {}
        for key, coeff in terms.items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"key {key} has wrong length")
            if any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                raise ValueError(f"key {key} is not strictly increasing")
            if not (isinstance(coeff, ex.Rat) and coeff.value == 0):
                clean[key] = coeff
        self.terms = clean

    @staticmethod
    def zero(algebroid: LieAlgebroid, degree: int) -> "AForm":
        return AForm(algebroid, degree, {})

    @staticmethod
    def function(algebroid: LieAlgebroid, f: Expression) -> "AForm":
        return AForm(algebroid, 0, {(): f})

    @staticmethod
    def covector(algebroid: LieAlgebroid, comps: Sequence[Expression]) -> "AForm":
        return AForm(algebroid, 1, {(i,): c for i, c in enumerate(comps)})

    @staticmethod
    def from_strings(algebroid: LieAlgebroid, degree: int,
                     terms: Mapping[tuple, str]) -> "AForm":
        return AForm(algebroid, degree,
                     {tuple(k): algebroid.chart.parse(v) for k, v in terms.items()})

    def coefficient(self, indices: Sequence[int]) -> Expression:
        key, sign = sort_with_sign(indices)
        if key is None or key not in self.terms:
            return ex.ZERO
        c = self.terms[key]
        return c if sign == 1 else ex.neg(c)

    def pair(self, section: Section) -> Expression:
        """Pairing of a degree-1 form with a section."""
        if self.degree != 1:
            raise ValueError("pairing needs a degree-1 form")
        return ex.add(*(ex.mul(self.coefficient((i,)), section.components[i])
                        for i in range(self.algebroid.rank)))

    def add(self, other: "AForm") -> "AForm":
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        keys = set(self.terms) | set(other.terms)
        return AForm(self.algebroid, self.degree, {
            k: ex.add(self.terms.get(k, ex.ZERO), other.terms.get(k, ex.ZERO))
            for k in keys})

    def subtract(self, other: "AForm") -> "AForm":
        neg_other = AForm(self.algebroid, other.degree,
                          {k: ex.neg(c) for k, c in other.terms.items()})
        return self.add(neg_other)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms):
            coeff = ex.to_string(self.terms[key], self.algebroid.chart.names)
            basis = "^".join(f"th{i}" for i in key)
            parts.append(f"({coeff}) {basis}" if basis else coeff)
        return " + ".join(parts)


def anchor_apply(bundle: AnchoredBundle, components: Sequence[Expression]) -> VectorField:
    """Push a section (given by frame components) through the anchor."""
    comps = []
    for alpha in range(bundle.chart.dim):
        comps.append(ex.add(*(ex.mul(components[i], bundle.anchor[i][alpha])
                              for i in range(bundle.rank))))
    return VectorField(bundle.chart, tuple(comps))


def anchor_of_section(algebroid: LieAlgebroid, a: Section) -> VectorField:
    return anchor_apply(algebroid.bundle, a.components)


def algebroid_bracket(algebroid: LieAlgebroid, a: Section, b: Section) -> Section:
    """[a, b]^k = a^i b^j c^k_ij + rho(a).b^k - rho(b).a^k."""
    rho_a = anchor_of_section(algebroid, a)
    rho_b = anchor_of_section(algebroid, b)
    r = algebroid.rank
    comps = []
    for k in range(r):
        structural = []
        for i in range(r):
            for j in range(r):
                if i == j:
                    continue
                structural.append(ex.mul(a.components[i], b.components[j],
                                         algebroid.c(i, j, k)))
        comps.append(ex.add(*structural,
                            rho_a.apply_to(b.components[k]),
                            ex.neg(rho_b.apply_to(a.components[k]))))
    return Section(algebroid, tuple(comps))


def algebroid_differential(algebroid: LieAlgebroid, nu: AForm) -> AForm:
    """Degree-raising differential of the algebroid complex."""
    r = algebroid.rank
    q = nu.degree
    if q >= r:
        return AForm.zero(algebroid, min(q + 1, r + 1))
    out: dict[tuple, Expression] = {}
    if q == 0:
        f = nu.terms.get((), ex.ZERO)
        for i in range(r):
            rho_i = algebroid.bundle.frame_field(i)
            d = rho_i.apply_to(f)
            if not (isinstance(d, ex.Rat) and d.value == 0):
                out[(i,)] = d
        return AForm(algebroid, 1, out)
    from itertools import combinations
    for key in combinations(range(r), q + 1):
        terms = []
        for s in range(q + 1):
            rest = key[:s] + key[s + 1:]
            coeff = nu.coefficient(rest)
            if not (isinstance(coeff, ex.Rat) and coeff.value == 0):
                rho_s = algebroid.bundle.frame_field(key[s])
                term = rho_s.apply_to(coeff)
                if s % 2 == 1:
                    term = ex.neg(term)
                terms.append(term)
        for s in range(q + 1):
            for t in range(s + 1, q + 1):
                rest = key[:s] + key[s + 1:t] + key[t + 1:]
                inner = []
                for k in range(r):
                    c = algebroid.c(key[s], key[t], k)
                    if isinstance(c, ex.Rat) and c.value == 0:
                        continue
                    coeff = nu.coefficient((k,) + rest)
                    inner.append(ex.mul(c, coeff))
                if inner:
                    term = ex.add(*inner)
                    if (s + t) % 2 == 1:
                        term = ex.neg(term)
                    terms.append(term)
        total = ex.add(*terms)
        if not (isinstance(total, ex.Rat) and total.value == 0):
            out[key] = total
    return AForm(algebroid, q + 1, out)


@dataclass
class CheckOutcome:
    passed: bool
    exact: bool
    residual: float
    witness: Optional[str] = None

    @staticmethod
    def from_verdicts(items) -> "CheckOutcome":
        worst = None
        exact = True
        for label, verdict in items:
            if not verdict.exact:
                exact = False
            if not verdict.is_zero:
                if worst is None or abs(verdict.value) > worst[1]:
                    worst = (label, abs(verdict.value), verdict)
        if worst is None:
            return CheckOutcome(True, exact, 0.0)
        label, mag, verdict = worst
        return CheckOutcome(False, False, mag, f"{label}: {verdict}")


@dataclass
class AxiomReport:
    anchor_morphism: CheckOutcome
    jacobi: CheckOutcome
    d_squared: CheckOutcome

    @property
    def passed(self) -> bool:
        return (self.anchor_morphism.passed and self.jacobi.passed
                and self.d_squared.passed)


def check_axioms(algebroid: LieAlgebroid, domain: SampleDomain) -> AxiomReport:
    """Verify the anchor is a bracket morphism, the Jacobi identity on frame
    triples, and nilpotency of the differential on generators."""
    r = algebroid.rank
    items_anchor = []
    for i in range(r):
        for j in range(i + 1, r):
            ai = Section.frame(algebroid, i)
            aj = Section.frame(algebroid, j)
            lhs = anchor_of_section(algebroid, algebroid_bracket(algebroid, ai, aj))
            rhs = lie_bracket(algebroid.bundle.frame_field(i),
                              algebroid.bundle.frame_field(j))
            for alpha in range(algebroid.chart.dim):
                resid = ex.sub(lhs.components[alpha], rhs.components[alpha])
                items_anchor.append((f"rho[a{i},a{j}]-[rho a{i},rho a{j}] comp {alpha}",
                                     ex.is_identically_zero(resid, domain)))
    items_jacobi = []
    for i in range(r):
        for j in range(i + 1, r):
            for k in range(j + 1, r):
                si = Section.frame(algebroid, i)
                sj = Section.frame(algebroid, j)
                sk = Section.frame(algebroid, k)
                cyc = algebroid_bracket(algebroid, si, algebroid_bracket(algebroid, sj, sk))
                cyc = cyc.add(algebroid_bracket(algebroid, sj, algebroid_bracket(algebroid, sk, si)))
                cyc = cyc.add(algebroid_bracket(algebroid, sk, algebroid_bracket(algebroid, si, sj)))
                for m in range(r):
                    items_jacobi.append((f"jacobi({i},{j},{k}) comp {m}",
                                         ex.is_identically_zero(cyc.components[m], domain)))
    items_dsq = []
    for k in range(r):
        theta_k = AForm(algebroid, 1, {(k,): ex.ONE})
        dd = algebroid_differential(algebroid, algebroid_differential(algebroid, theta_k))
        for key, coeff in dd.terms.items():
            items_dsq.append((f"d^2 theta{k} on {key}",
                              ex.is_identically_zero(coeff, domain)))
    for alpha in range(algebroid.chart.dim):
        f = AForm.function(algebroid, ex.Coord(alpha))
        dd = algebroid_differential(algebroid, algebroid_differential(algebroid, f))
        for key, coeff in dd.terms.items():
            items_dsq.append((f"d^2 x{alpha} on {key}",
                              ex.is_identically_zero(coeff, domain)))
    return AxiomReport(
        anchor_morphism=CheckOutcome.from_verdicts(items_anchor),
        jacobi=CheckOutcome.from_verdicts(items_jacobi),
        d_squared=CheckOutcome.from_verdicts(items_dsq),
    )
