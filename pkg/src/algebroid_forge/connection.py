"""Linear connections on the bundle and the anchoring condition.

Conventions: D a_i = Omega^j_{alpha i} dx^alpha (x) a_j, so the dual
connection acts on the dual frame by D theta^i = -Omega^i_{alpha j}
dx^alpha (x) theta^j, and on a degree-0 dual section mu = mu_i theta^i by
(D mu)_i = d mu_i - mu_j Omega^j_i. Curvature is computed symbolically as
R^i_j = d Omega^i_j + Omega^i_k ^ Omega^k_j; on the dual frame the square
of the covariant derivative then satisfies D^2 theta^i = -R^i_j (x)
theta^j (the sign is fixed once by that cross-check and by the duality
pairing test in the suite).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from . import expr as ex
from .expr import Expression, SampleDomain
from .exterior import (Chart, DifferentialForm, VectorField,
                       exterior_derivative, lie_bracket, merge_with_sign, wedge)
from .algebroid import (AnchoredBundle, CheckOutcome, LieAlgebroid,
                        Section, algebroid_bracket, anchor_apply,
                        anchor_of_section)
from .geometry import DualizedAnchor, dualized_anchor

__all__ = [
    "Connection", "AStarValuedForm", "covariant_derivative", "curvature",
    "torsion", "torsion_frame", "opposite_connection_apply", "check_h1",
    "H1Report", "gamma_as_astar_form",
]


@dataclass(frozen=True)
class Connection:
    """Connection coefficients Omega^j_{alpha i}, indexed [j][alpha][i]."""

    chart: Chart
    rank: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.rank:
            raise ValueError("coefficient block needs one sheet per output index")
        for sheet in self.coeffs:
            if len(sheet) != self.chart.dim:
                raise ValueError("each sheet needs one row per base direction")
            for row in sheet:
                if len(row) != self.rank:
                    raise ValueError("each row needs one entry per input index")

    @staticmethod
    def trivial(chart: Chart, rank: int) -> "Connection":
        zero = tuple(tuple(tuple(ex.ZERO for _ in range(rank))
                           for _ in range(chart.dim)) for _ in range(rank))
        return Connection(chart, rank, zero)

    @staticmethod
    def from_entries(chart: Chart, rank: int,
                     entries: Mapping[tuple, Expression]) -> "Connection":
        coeffs = [[[ex.ZERO for _ in range(rank)] for _ in range(chart.dim)]
                  for _ in range(rank)]
        for (j, alpha, i), v in entries.items():
            coeffs[j][alpha][i] = v
        return Connection(chart, rank,
                          tuple(tuple(tuple(row) for row in sheet) for sheet in coeffs))

    def omega(self, j: int, alpha: int, i: int) -> Expression:
        return self.coeffs[j][alpha][i]

    def one_form(self, j: int, i: int) -> DifferentialForm:
        """The connection 1-form Omega^j_i."""
        return DifferentialForm(self.chart, 1,
                                {(a,): self.coeffs[j][a][i]
                                 for a in range(self.chart.dim)})

    def derivative_of_section(self, components: Sequence[Expression]) -> "AStarValuedForm":
        """D a for a = a^i a_i, as an A-valued 1-form (same index layout)."""
        terms = {}
        for alpha in range(self.chart.dim):
            vec = []
            for j in range(self.rank):
                parts = [ex.differentiate(components[j], alpha)]
                for i in range(self.rank):
                    parts.append(ex.mul(components[i], self.coeffs[j][alpha][i]))
                vec.append(ex.add(*parts))
            terms[(alpha,)] = tuple(vec)
        return AStarValuedForm(self.chart, self.rank, 1, terms)

    def directional_of_section(self, v: VectorField,
                               components: Sequence[Expression]) -> list:
        """(D_v a)^j = v(a^j) + a^i Omega^j_{alpha i} v^alpha."""
        out = []
        for j in range(self.rank):
            parts = [v.apply_to(components[j])]
            for alpha in range(self.chart.dim):
                for i in range(self.rank):
                    parts.append(ex.mul(v.components[alpha],
                                        components[i], self.coeffs[j][alpha][i]))
            out.append(ex.add(*parts))
        return out


class AStarValuedForm:
    """Degree-p differential form with values in the dual bundle.

    ``terms`` maps increasing base-index tuples to r-vectors of coefficients;
    sigma = sum sigma_{I,i} dx^I (x) theta^i.
    """

    def __init__(self, chart: Chart, rank: int, degree: int, terms: Mapping[tuple, tuple]):
        self.chart = chart
        self.rank = rank
        self.degree = degree
        clean = {}
        for key, vec in terms.items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"key {key} has wrong length for degree {degree}")
            vec = tuple(vec)
            if len(vec) != rank:
                raise ValueError("value vectors must have one entry per frame index")
            if any(not (isinstance(c, ex.Rat) and c.value == 0) for c in vec):
                clean[key] = vec
        self.terms = clean

    @staticmethod
    def from_dual_section(chart: Chart, components: Sequence[Expression]) -> "AStarValuedForm":
        return AStarValuedForm(chart, len(components), 0, {(): tuple(components)})

    def component(self, key: tuple, i: int) -> Expression:
        vec = self.terms.get(tuple(key))
        return vec[i] if vec is not None else ex.ZERO

    def pair_with_section(self, components: Sequence[Expression]) -> DifferentialForm:
        """<sigma, a> as a scalar p-form."""
        out = {}
        for key, vec in self.terms.items():
            out[key] = ex.add(*(ex.mul(vec[i], components[i])
                                for i in range(self.rank)))
        return DifferentialForm(self.chart, self.degree, out)

    def subtract(self, other: "AStarValuedForm") -> "AStarValuedForm":
        keys = set(self.terms) | set(other.terms)
        terms = {}
        for k in keys:
            a = self.terms.get(k, (ex.ZERO,) * self.rank)
            b = other.terms.get(k, (ex.ZERO,) * self.rank)
            terms[k] = tuple(ex.sub(x, y) for x, y in zip(a, b))
        return AStarValuedForm(self.chart, self.rank, self.degree, terms)

    def coefficients(self):
        for key, vec in self.terms.items():
            for i, c in enumerate(vec):
                yield (key, i), c


def gamma_as_astar_form(gamma: DualizedAnchor) -> AStarValuedForm:
    chart = gamma.bundle.chart
    r = gamma.bundle.rank
    terms = {}
    for beta in range(chart.dim):
        terms[(beta,)] = tuple(gamma.rows[i][beta] for i in range(r))
    return AStarValuedForm(chart, r, 1, terms)


def covariant_derivative(conn: Connection, sigma: AStarValuedForm) -> AStarValuedForm:
    """Graded Leibniz extension of the dual covariant derivative.

    D(alpha (x) theta^i) = d alpha (x) theta^i + (-1)^p alpha ^ D theta^i
    with D theta^i = -Omega^i_{alpha j} dx^alpha (x) theta^j.
    """
    n = conn.chart.dim
    r = conn.rank
    p = sigma.degree
    out: dict[tuple, list] = {}

    def accumulate(key: tuple, i: int, value: Expression) -> None:
        vec = out.setdefault(key, [ex.ZERO] * r)
        vec[i] = ex.add(vec[i], value)

    sign = 1 if p % 2 == 0 else -1
    for key, vec in sigma.terms.items():
        for i in range(r):
            coeff = vec[i]
            if isinstance(coeff, ex.Rat) and coeff.value == 0:
                continue
            for beta in range(n):
                d = ex.differentiate(coeff, beta)
                if not (isinstance(d, ex.Rat) and d.value == 0):
                    new_key, s = merge_with_sign((beta,), key)
                    if new_key is not None:
                        accumulate(new_key, i, d if s == 1 else ex.neg(d))
            # (-1)^p sigma_{I,i} dx^I ^ (-Omega^i_{alpha j} dx^alpha) theta^j
            for alpha in range(n):
                for j in range(r):
                    om = conn.coeffs[i][alpha][j]
                    if isinstance(om, ex.Rat) and om.value == 0:
                        continue
                    new_key, s = merge_with_sign(key, (alpha,))
                    if new_key is None:
                        continue
                    term = ex.mul(coeff, om)
                    if sign * s == 1:
                        term = ex.neg(term)
                    accumulate(new_key, j, term)
    return AStarValuedForm(conn.chart, r, p + 1,
                           {k: tuple(v) for k, v in out.items()})


def curvature(conn: Connection) -> dict:
    """R^j_i = d Omega^j_i + Omega^j_k ^ Omega^k_i, one 2-form per (j, i)."""
    out = {}
    for j in range(conn.rank):
        for i in range(conn.rank):
            total = exterior_derivative(conn.one_form(j, i))
            for k in range(conn.rank):
                total = total.add(wedge(conn.one_form(j, k), conn.one_form(k, i)))
            out[(j, i)] = total
    return out


def torsion(algebroid: LieAlgebroid, conn: Connection, a: Section, b: Section) -> Section:
    """T(a, b) = D_{rho a} b - D_{rho b} a - [a, b]."""
    rho_a = anchor_of_section(algebroid, a)
    rho_b = anchor_of_section(algebroid, b)
    da = conn.directional_of_section(rho_a, b.components)
    db = conn.directional_of_section(rho_b, a.components)
    br = algebroid_bracket(algebroid, a, b)
    return Section(algebroid, tuple(ex.sub(ex.sub(x, y), z)
                                    for x, y, z in zip(da, db, br.components)))


def torsion_frame(algebroid: LieAlgebroid, conn: Connection) -> dict:
    """Frame components T^k_ij for i < j."""
    out = {}
    for i in range(algebroid.rank):
        for j in range(i + 1, algebroid.rank):
            t = torsion(algebroid, conn,
                        Section.frame(algebroid, i), Section.frame(algebroid, j))
            out[(i, j)] = t.components
    return out


def opposite_connection_apply(algebroid: LieAlgebroid, conn: Connection,
                              a: Section, v: VectorField) -> VectorField:
    """The A-connection on vector fields: D-check_a v = [rho a, v] + rho(D_v a)."""
    rho_a = anchor_of_section(algebroid, a)
    br = lie_bracket(rho_a, v)
    da = conn.directional_of_section(v, a.components)
    pushed = anchor_apply(algebroid.bundle, da)
    return VectorField(algebroid.chart,
                       tuple(ex.add(x, y) for x, y in
                             zip(br.components, pushed.components)))


@dataclass
class H1Report:
    dgamma: CheckOutcome
    opposite: CheckOutcome

    @property
    def passed(self) -> bool:
        return self.dgamma.passed

    @property
    def agree(self) -> bool:
        return self.dgamma.passed == self.opposite.passed


def check_h1(bundle: AnchoredBundle, omega: DifferentialForm, conn: Connection,
             domain: SampleDomain,
             algebroid: Optional[LieAlgebroid] = None) -> H1Report:
    """Presymplectic anchoring, certified along two independent routes.

    Route one tests every coefficient of D gamma. Route two tests invariance
    of omega under the opposite A-connection, (D-check_{a_i} omega)(e_b, e_d)
    = rho(a_i).omega_bd - omega(D-check_{a_i} e_b, e_d) - omega(e_b,
    D-check_{a_i} e_d). The two verdicts must agree; the report keeps both.
    """
    gamma = dualized_anchor(bundle, omega)
    dgamma = covariant_derivative(conn, gamma_as_astar_form(gamma))
    items = [(f"(D gamma){key} theta{i}", ex.is_identically_zero(c, domain))
             for (key, i), c in dgamma.coefficients()]
    route_one = CheckOutcome.from_verdicts(items)

    if algebroid is None:
        algebroid = LieAlgebroid(bundle, {})
    n = bundle.chart.dim
    items2 = []
    basis = [VectorField(bundle.chart,
                         tuple(ex.ONE if a == b else ex.ZERO for a in range(n)))
             for b in range(n)]
    check_fields = [opposite_connection_apply(algebroid, conn,
                                              Section.frame(algebroid, i), basis[b])
                    for i in range(bundle.rank) for b in range(n)]
    for i in range(bundle.rank):
        rho_i = bundle.frame_field(i)
        for b in range(n):
            for d in range(b + 1, n):
                cb = check_fields[i * n + b]
                cd = check_fields[i * n + d]
                omega_bd = omega.coefficient((b, d))
                resid = ex.sub(rho_i.apply_to(omega_bd),
                               ex.add(_omega_pair(omega, cb, basis[d]),
                                      _omega_pair(omega, basis[b], cd)))
                items2.append((f"(Dcheck_a{i} omega)({b},{d})",
                               ex.is_identically_zero(resid, domain)))
    route_two = CheckOutcome.from_verdicts(items2)
    return H1Report(dgamma=route_one, opposite=route_two)


def _omega_pair(omega: DifferentialForm, u: VectorField, w: VectorField) -> Expression:
    parts = []
    for (a, b), coeff in omega.terms.items():
        parts.append(ex.mul(coeff, ex.sub(ex.mul(u.components[a], w.components[b]),
                                          ex.mul(u.components[b], w.components[a]))))
    return ex.add(*parts)
