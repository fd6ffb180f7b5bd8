"""Momentum sections and the hamiltonian compatibility conditions.

A momentum section mu satisfies D mu = gamma, written in the frame as
d mu_i - mu_j Omega^j_i = gamma_i. Bracket compatibility additionally
demands (bold-d mu)(a, b) = -omega(rho a, rho b); given the momentum
equation this is equivalent to the torsion criterion <mu, T(a, b)> =
omega(rho a, rho b). The zero locus of a momentum section of a structure
satisfying all conditions is coisotropic where it is clean.

Also here: the explicit construction of a connection making a prescribed
nowhere-vanishing 1-form a momentum section for the tangent algebroid of a
constant-coefficient symplectic chart, and the Lie-algebra level quotient
operations for actions with kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import expr as ex
from . import linalg
from .expr import Expression, SampleDomain, SamplePoint
from .exterior import Chart, DifferentialForm
from .algebroid import (AForm, AnchoredBundle, CheckOutcome, LieAlgebroid,
                        Section, algebroid_bracket, algebroid_differential)
from .connection import (AStarValuedForm, Connection, covariant_derivative,
                         gamma_as_astar_form, torsion_frame)
from .geometry import dualized_anchor, pointwise_subspace_ops

__all__ = [
    "check_h2", "check_h3", "torsion_criterion", "TorsionCriterionReport",
    "zero_locus_report", "ZeroLocusReport", "synthesize_tangent_connection",
    "SynthesisError", "FiniteLieAlgebra", "quotient_by_isotropy",
    "QuotientReport", "reduced_bracket", "rho_pullback_of_omega",
]


def check_h2(bundle: AnchoredBundle, omega: DifferentialForm, conn: Connection,
             mu: Sequence[Expression], domain: SampleDomain) -> CheckOutcome:
    """Momentum equation: residual 1-forms d mu_i - mu_j Omega^j_i - gamma_i."""
    gamma = gamma_as_astar_form(dualized_anchor(bundle, omega))
    dmu = covariant_derivative(conn, AStarValuedForm.from_dual_section(bundle.chart, mu))
    residual = dmu.subtract(gamma)
    items = [(f"(D mu - gamma){key} theta{i}", ex.is_identically_zero(c, domain))
             for (key, i), c in residual.coefficients()]
    return CheckOutcome.from_verdicts(items)


def rho_pullback_of_omega(algebroid: LieAlgebroid, omega: DifferentialForm) -> AForm:
    """(rho* omega)(a_i, a_j) = omega(rho a_i, rho a_j), as a 2-form on the bundle."""
    r = algebroid.rank
    fields = [algebroid.bundle.frame_field(i) for i in range(r)]
    terms = {}
    for i, j in combinations(range(r), 2):
        parts = []
        for (a, b), coeff in omega.terms.items():
            u, w = fields[i].components, fields[j].components
            parts.append(ex.mul(coeff, ex.sub(ex.mul(u[a], w[b]),
                                              ex.mul(u[b], w[a]))))
        terms[(i, j)] = ex.add(*parts)
    return AForm(algebroid, 2, terms)


def check_h3(algebroid: LieAlgebroid, omega: DifferentialForm,
             mu: Sequence[Expression], domain: SampleDomain) -> CheckOutcome:
    """Bracket compatibility: residual bold-d mu + rho* omega. No connection
    enters here."""
    mu_form = AForm.covector(algebroid, mu)
    residual = algebroid_differential(algebroid, mu_form).add(
        rho_pullback_of_omega(algebroid, omega))
    items = [(f"(bold-d mu + rho*omega){key}", ex.is_identically_zero(c, domain))
             for key, c in residual.terms.items()]
    return CheckOutcome.from_verdicts(items)


@dataclass
class TorsionCriterionReport:
    precondition_ok: bool
    outcome: Optional[CheckOutcome]

    @property
    def passed(self) -> bool:
        return bool(self.precondition_ok and self.outcome and self.outcome.passed)


def torsion_criterion(algebroid: LieAlgebroid, omega: DifferentialForm,
                      conn: Connection, mu: Sequence[Expression],
                      domain: SampleDomain) -> TorsionCriterionReport:
    """<mu, T(a_i, a_j)> = omega(rho a_i, rho a_j) on frame pairs.

    Only meaningful for momentum sections, so the momentum equation is
    checked first and reported distinctly when it fails.
    """
    h2 = check_h2(algebroid.bundle, omega, conn, mu, domain)
    if not h2.passed:
        return TorsionCriterionReport(False, None)
    pullback = rho_pullback_of_omega(algebroid, omega)
    tf = torsion_frame(algebroid, conn)
    items = []
    for (i, j), comps in tf.items():
        paired = ex.add(*(ex.mul(mu[k], comps[k]) for k in range(algebroid.rank)))
        resid = ex.sub(paired, pullback.coefficient((i, j)))
        items.append((f"<mu,T(a{i},a{j})> - omega(rho a{i},rho a{j})",
                      ex.is_identically_zero(resid, domain)))
    return TorsionCriterionReport(True, CheckOutcome.from_verdicts(items))


@dataclass
class ZeroLocusReport:
    on_locus: bool
    clean: Optional[bool] = None
    tangent_dim: Optional[int] = None
    equals_orthogonal: Optional[bool] = None
    coisotropic: Optional[bool] = None
    invariance: Optional[CheckOutcome] = None


def zero_locus_report(algebroid: LieAlgebroid, omega: DifferentialForm,
                      conn: Connection, mu: Sequence[Expression],
                      point: SamplePoint, domain: SampleDomain,
                      stencil: float = 1e-4) -> ZeroLocusReport:
    """Locus geometry at one point: tangent space from the Jacobian of mu,
    comparison with the presymplectic orthogonal of the anchor image, and
    the coisotropy test. Cleanness is only assessed through rank constancy
    of the Jacobian on a small stencil around the point.

    The orbit-invariance identity L_{rho a_i}<mu, a_j> = <mu, [a_i, a_j] +
    D_{rho a_j} a_i> is verified symbolically on frame pairs and reported
    as a residual outcome alongside the pointwise data.
    """
    tol = domain.tol
    r = algebroid.rank
    n = algebroid.chart.dim
    vals = [ex.evaluate(m, point) for m in mu]
    scale = 1.0 + max(abs(v) for v in vals)
    if any(not np.isfinite(v) for v in vals) or max(abs(v) for v in vals) > tol * scale:
        return ZeroLocusReport(on_locus=False)

    def jacobian_at(p) -> np.ndarray:
        out = np.zeros((r, n))
        for i in range(r):
            for a in range(n):
                out[i, a] = ex.evaluate(ex.differentiate(mu[i], a), p)
        return out

    jac = jacobian_at(point)
    if not np.all(np.isfinite(jac)):
        raise ValueError("non-finite Jacobian entries at the locus point")
    base_rank = linalg.numerical_rank(jac, tol)
    offsets = [np.zeros(n)]
    for a in range(min(n, 2)):
        e = np.zeros(n)
        e[a] = stencil
        offsets.append(e)
        offsets.append(-e)
    clean = all(linalg.numerical_rank(jacobian_at(tuple(np.array(point.values) + off)), tol)
                == base_rank for off in offsets)
    tangent = linalg.nullspace(jac, tol)
    gamma = dualized_anchor(algebroid.bundle, omega)
    orth = gamma.kernel_at(point, tol)
    equals = linalg.subspaces_equal(tangent, orth, tol)
    if tangent.shape[1] == 0:
        # {0}-perp is the whole tangent space, never inside {0} for n >= 1
        coiso = n == 0
    else:
        sub = pointwise_subspace_ops(omega, point, tangent.T, tol)
        coiso = sub.is_coisotropic

    invariance_items = []
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            ai = Section.frame(algebroid, i)
            aj = Section.frame(algebroid, j)
            rho_i = algebroid.bundle.frame_field(i)
            rho_j = algebroid.bundle.frame_field(j)
            lhs = rho_i.apply_to(mu[j])
            inner = algebroid_bracket(algebroid, ai, aj).add(
                Section(algebroid, tuple(conn.directional_of_section(rho_j, ai.components))))
            rhs = ex.add(*(ex.mul(mu[k], inner.components[k]) for k in range(r)))
            invariance_items.append((f"invariance ({i},{j})",
                                     ex.is_identically_zero(ex.sub(lhs, rhs), domain)))
    return ZeroLocusReport(
        on_locus=True, clean=clean, tangent_dim=int(tangent.shape[1]),
        equals_orthogonal=bool(equals), coisotropic=bool(coiso),
        invariance=CheckOutcome.from_verdicts(invariance_items))


class SynthesisError(Exception):
    pass


def synthesize_tangent_connection(chart: Chart, omega: DifferentialForm,
                                  mu: Sequence[Expression],
                                  v_ref: Sequence[Expression],
                                  domain: SampleDomain) -> Connection:
    """Connection making ``mu`` a momentum section of the tangent algebroid.

    Requires a constant-coefficient symplectic form (so the trivial base
    connection is flat, torsion free, and parallelizes omega) and a
    nowhere-vanishing mu on the sampling domain, with <mu, v_ref> bounded
    away from zero there. Writes n for the omega-dual of mu and n-bar for
    v_ref / <mu, v_ref>, builds the trilinear correction

      C3(u, v, w) = omega(u, nbar) omega(D_v n + v, w)
                  + omega(v, nbar) omega(D_u n + u, w)
                  - omega(u, nbar) omega(v, nbar) omega(D_n n + n, w)

    and returns the trivial connection shifted by Gamma with
    omega(u, Gamma(v, w)) = C3(u, v, w).
    """
    n = chart.dim
    # constant-coefficient check
    w_rat = [[Fraction(0)] * n for _ in range(n)]
    for (a, b), coeff in omega.terms.items():
        for beta in range(n):
            d = ex.differentiate(coeff, beta)
            if not (ex.is_polynomial(d) and not ex.expand_polynomial(d)):
                raise SynthesisError(
                    "the base form must have constant coefficients for the "
                    "trivial connection to parallelize it")
        if not isinstance(coeff, ex.Rat):
            if ex.is_polynomial(coeff):
                poly = ex.expand_polynomial(coeff)
                if set(poly) - {()}:
                    raise SynthesisError("omega coefficients must be constants")
                value = poly.get((), Fraction(0))
            else:
                raise SynthesisError("omega coefficients must be rational constants")
        else:
            value = coeff.value
        w_rat[a][b] = value
        w_rat[b][a] = -value
    # invertibility (exact)
    mat = [[Fraction(v) for v in row] for row in w_rat]
    inv = _invert_rational(mat)
    if inv is None:
        raise SynthesisError("omega is degenerate; the tangent construction "
                             "needs a symplectic form")
    # nowhere-vanishing certificates: interval bounds over the whole box
    boxes = domain.intervals
    if not any(_interval_excludes_zero(ex.interval_evaluate(m, boxes)) for m in mu):
        raise SynthesisError(
            "vanishing momentum candidate: no component of mu is certified "
            "nonzero on the domain")
    pairing_expr = ex.add(*(ex.mul(m, v) for m, v in zip(mu, v_ref)))
    if not _interval_excludes_zero(ex.interval_evaluate(pairing_expr, boxes)):
        raise SynthesisError("<mu, v_ref> is not certified nonzero on the domain")
    for k in range(domain.n_samples):
        p = domain.point(k)
        mvals = [ex.evaluate(m, p) for m in mu]
        if max(abs(v) for v in mvals) <= domain.tol * (1 + max(abs(v) for v in mvals)):
            raise SynthesisError(f"momentum candidate vanishes near sample {k}: {p}")

    # n-field: solve n^a w_ab = mu_b exactly (constant w)
    n_field = []
    for a in range(n):
        n_field.append(ex.add(*(ex.mul(ex.Rat(inv[b][a]), mu[b]) for b in range(n))))
    pairing = ex.add(*(ex.mul(m, v) for m, v in zip(mu, v_ref)))
    nbar = [ex.quot(v, pairing) if not _expr_is_one(pairing) else v for v in v_ref]

    def omega_vec(u_comps, w_comps) -> Expression:
        parts = []
        for a in range(n):
            for b in range(n):
                if w_rat[a][b] != 0:
                    parts.append(ex.mul(ex.Rat(w_rat[a][b]), u_comps[a], w_comps[b]))
        return ex.add(*parts)

    def d_dir_n(v_comps) -> list:
        """Trivial-connection derivative of the n-field along v."""
        return [ex.add(*(ex.mul(v_comps[b], ex.differentiate(n_field[a], b))
                         for b in range(n))) for a in range(n)]

    basis = [[ex.ONE if a == b else ex.ZERO for a in range(n)] for b in range(n)]
    dn_basis = [d_dir_n(basis[b]) for b in range(n)]
    dn_n = d_dir_n(n_field)
    dnn_plus_n = [ex.add(a, b) for a, b in zip(dn_n, n_field)]

    def c3(u_comps, v_comps, dn_v, w_comps) -> Expression:
        dv = [ex.add(a, b) for a, b in zip(dn_v, v_comps)]
        term1 = ex.mul(omega_vec(u_comps, nbar), omega_vec(dv, w_comps))
        du = d_dir_n(u_comps)
        duu = [ex.add(a, b) for a, b in zip(du, u_comps)]
        term2 = ex.mul(omega_vec(v_comps, nbar), omega_vec(duu, w_comps))
        term3 = ex.mul(omega_vec(u_comps, nbar), omega_vec(v_comps, nbar),
                       omega_vec(dnn_plus_n, w_comps))
        return ex.sub(ex.add(term1, term2), term3)

    entries = {}
    for alpha in range(n):
        for i in range(n):
            cvec = [c3(basis[kappa], basis[alpha], dn_basis[alpha], basis[i])
                    for kappa in range(n)]
            for lam in range(n):
                val = ex.add(*(ex.mul(ex.Rat(inv[lam][kappa]), cvec[kappa])
                               for kappa in range(n)))
                # solve w_{kappa lam} Gamma^lam = C_kappa: Gamma = w^{-1} C,
                # with (w^{-1})[lam][kappa] laid out so that
                # sum_kappa inv[lam][kappa] * w[kappa][mu] = delta^lam_mu.
                if not (isinstance(val, ex.Rat) and val.value == 0):
                    entries[(lam, alpha, i)] = ex.simplify(val) \
                        if ex.is_polynomial(val) else val
    return Connection.from_entries(chart, n, entries)


def _expr_is_one(e: Expression) -> bool:
    return isinstance(e, ex.Rat) and e.value == 1


def _interval_excludes_zero(bounds: tuple) -> bool:
    lo, hi = bounds
    return lo > 0 or hi < 0


def _invert_rational(m: list) -> Optional[list]:
    size = len(m)
    aug = [list(row) + [Fraction(1) if i == j else Fraction(0) for j in range(size)]
           for i, row in enumerate(m)]
    reduced, pivots = linalg.rref(aug)
    if pivots[:size] != list(range(size)) or len(reduced) < size:
        return None
    return [row[size:] for row in reduced[:size]]


# ---------------------------------------------------------------------------
# Finite Lie algebras and quotients by the isotropy kernel


class FiniteLieAlgebra:
    """Structure constants over the rationals, antisymmetric, Jacobi-certified."""

    def __init__(self, dim: int, structure: dict):
        self.dim = dim
        self.structure = {}
        for (i, j, k), v in structure.items():
            if not (0 <= i < j < dim and 0 <= k < dim):
                raise ValueError(f"structure key {(i, j, k)} out of range")
            self.structure[(i, j, k)] = Fraction(v)
        self._certify_jacobi()

    def c(self, i: int, j: int, k: int) -> Fraction:
        if i == j:
            return Fraction(0)
        if i < j:
            return self.structure.get((i, j, k), Fraction(0))
        return -self.structure.get((j, i, k), Fraction(0))

    def bracket(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> list:
        out = [Fraction(0)] * self.dim
        for i in range(self.dim):
            if x[i] == 0:
                continue
            for j in range(self.dim):
                if y[j] == 0 or i == j:
                    continue
                for k in range(self.dim):
                    out[k] += x[i] * y[j] * self.c(i, j, k)
        return out

    def _certify_jacobi(self) -> None:
        basis = [[Fraction(1) if a == b else Fraction(0) for a in range(self.dim)]
                 for b in range(self.dim)]
        for i, j, k in combinations(range(self.dim), 3):
            total = self.bracket(basis[i], self.bracket(basis[j], basis[k]))
            second = self.bracket(basis[j], self.bracket(basis[k], basis[i]))
            third = self.bracket(basis[k], self.bracket(basis[i], basis[j]))
            for m in range(self.dim):
                if total[m] + second[m] + third[m] != 0:
                    raise ValueError(
                        f"structure constants violate the Jacobi identity on "
                        f"basis triple {(i, j, k)}")

    def derived_subalgebra(self) -> list:
        vectors = []
        basis = [[Fraction(1) if a == b else Fraction(0) for a in range(self.dim)]
                 for b in range(self.dim)]
        for i, j in combinations(range(self.dim), 2):
            v = self.bracket(basis[i], basis[j])
            if any(c != 0 for c in v):
                vectors.append(v)
        reduced, _ = linalg.rref(vectors) if vectors else ([], [])
        return reduced


@dataclass
class QuotientReport:
    kernel: list                    # RREF basis of ker rho
    kernel_values: list             # <mu, k> for each kernel basis vector
    momentum_constant_on_kernel: bool
    descended: Optional[list]       # components of mu' with <mu', ker rho> = 0
    obstruction_basis: list         # basis of [g, g] n ker rho
    obstruction_values: list        # <mu, z> on that basis
    descends_hamiltonian: Optional[bool]
    note: str = ""


def quotient_by_isotropy(lie: FiniteLieAlgebra, bundle: AnchoredBundle,
                         mu: Sequence[Expression],
                         domain: SampleDomain) -> QuotientReport:
    """Kernel of an action, the shifted momentum map annihilating it, and the
    obstruction <mu, [g, g] n ker rho> to the quotient action staying
    hamiltonian.

    The kernel is computed exactly over a rational basis, which needs the
    anchor entries to be polynomial.
    """
    g, n = lie.dim, bundle.chart.dim
    if g != bundle.rank:
        raise ValueError("Lie algebra dimension must match the bundle rank")
    rows = []
    for alpha in range(n):
        polys = []
        for i in range(g):
            entry = bundle.anchor[i][alpha]
            if not ex.is_polynomial(entry):
                raise ValueError("kernel extraction needs polynomial anchor entries")
            polys.append(ex.expand_polynomial(entry))
        monomials = sorted(set().union(*[set(p) for p in polys]))
        for m in monomials:
            rows.append([p.get(m, Fraction(0)) for p in polys])
    kernel = linalg.rational_nullspace(rows, g)
    if kernel:
        kernel, kernel_pivots = linalg.rref(kernel)
    else:
        kernel_pivots = []

    kernel_values = []
    constant = True
    for kvec in kernel:
        paired = ex.add(*(ex.mul(ex.Rat(c), mu[i]) for i, c in enumerate(kvec)))
        for alpha in range(n):
            if not ex.is_identically_zero(ex.differentiate(paired, alpha), domain).is_zero:
                constant = False
        if ex.is_polynomial(paired):
            poly = ex.expand_polynomial(paired)
            kernel_values.append(poly.get((), Fraction(0)) if set(poly) <= {()} else None)
        else:
            kernel_values.append(None)
        if kernel_values[-1] is None:
            mid = domain.point(0)
            kernel_values[-1] = ex.evaluate(paired, mid)
    if not constant:
        return QuotientReport(kernel, kernel_values, False, None, [], [], None,
                              note="<mu, X> is non-constant on the kernel; "
                                   "mu is not a momentum map for this action")

    # mu' = mu - nu with nu supported on the kernel pivot columns; since the
    # kernel basis is in RREF, <nu, k_a> = value_a holds automatically.
    descended = list(mu)
    for pivot, value in zip(kernel_pivots, kernel_values):
        descended[pivot] = ex.sub(descended[pivot],
                                  ex.Rat(Fraction(value)) if isinstance(value, Fraction)
                                  else ex.rat(str(value)))
    derived = lie.derived_subalgebra()
    obstruction = linalg.rational_span_intersection(derived, kernel) \
        if kernel and derived else []
    values = []
    for z in obstruction:
        paired = ex.add(*(ex.mul(ex.Rat(c), mu[i]) for i, c in enumerate(z)))
        poly = ex.expand_polynomial(paired) if ex.is_polynomial(paired) else None
        if poly is not None and set(poly) <= {()}:
            values.append(poly.get((), Fraction(0)))
        else:
            values.append(ex.evaluate(paired, domain.point(0)))
    descends = all(v == 0 for v in values)
    return QuotientReport(kernel, kernel_values, True, descended,
                          obstruction, values, descends)


def reduced_bracket(lie: FiniteLieAlgebra, subalgebra: Sequence[Sequence[Fraction]],
                    kappa: Sequence[Sequence[Expression]], chart: Chart,
                    x: Sequence[Fraction], y: Sequence[Fraction],
                    domain: SampleDomain) -> list:
    """Bracket of cosets through a chart-dependent correction into the
    subalgebra: [X + kappa(X), Y + kappa(Y)] + h.

    ``subalgebra`` must be a subalgebra (certified); ``kappa`` has one row
    per subalgebra basis vector and one column per complement coordinate.
    Returns the canonical coset representative, an expression vector with
    zero entries on the subalgebra pivots.
    """
    h_basis, pivots = linalg.rref(subalgebra)
    if not h_basis and subalgebra:
        raise ValueError("subalgebra basis is degenerate")
    for a in range(len(h_basis)):
        for b in range(a + 1, len(h_basis)):
            br = lie.bracket(h_basis[a], h_basis[b])
            if not linalg.in_rational_span(h_basis, br):
                raise ValueError("the given span is not a subalgebra")
    complement = [i for i in range(lie.dim) if i not in pivots]

    def correct(vec: Sequence[Fraction]) -> list:
        """Expression components of v + kappa(v-bar)."""
        out = [ex.Rat(Fraction(c)) for c in vec]
        coords = _coset_coordinates(vec, h_basis, pivots, complement)
        for a, hrow in enumerate(h_basis):
            corr = ex.add(*(ex.mul(kappa[a][c], ex.Rat(coords[c]))
                            for c in range(len(complement))))
            for m in range(lie.dim):
                if hrow[m] != 0:
                    out[m] = ex.add(out[m], ex.mul(ex.Rat(hrow[m]), corr))
        return out

    xt = correct(x)
    yt = correct(y)
    bracket = [ex.ZERO] * lie.dim
    for i in range(lie.dim):
        for j in range(lie.dim):
            if i == j:
                continue
            for k in range(lie.dim):
                c = lie.c(i, j, k)
                if c != 0:
                    bracket[k] = ex.add(bracket[k],
                                        ex.mul(ex.Rat(c), xt[i], yt[j]))
    return _reduce_mod_subalgebra(bracket, h_basis, pivots)


def _coset_coordinates(vec, h_basis, pivots, complement) -> list:
    residual = [Fraction(v) for v in vec]
    for row, p in zip(h_basis, pivots):
        if residual[p] != 0:
            f = residual[p]
            residual = [a - f * b for a, b in zip(residual, row)]
    return [residual[c] for c in complement]


def _reduce_mod_subalgebra(components: Sequence[Expression], h_basis, pivots) -> list:
    out = list(components)
    for row, p in zip(h_basis, pivots):
        f = out[p]
        if isinstance(f, ex.Rat) and f.value == 0:
            continue
        for m in range(len(out)):
            if row[m] != 0:
                out[m] = ex.sub(out[m], ex.mul(f, ex.Rat(row[m])))
    return out
