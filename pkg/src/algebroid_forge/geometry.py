"""Presymplectic structure on a chart and pointwise subspace tests.

The dualized anchor pairs the image of the anchor with the 2-form:
gamma_i = iota_{rho(a_i)} omega, with components (gamma_i)_beta =
rho^alpha_i omega_{alpha beta}. Pointwise linear algebra (presymplectic
orthogonals, isotropy, coisotropy) is float work with SVD rank decisions;
the differential-ideal and involutivity compatibility conditions are
checked as necessary pointwise tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import expr as ex
from . import linalg
from .expr import SampleDomain
from .exterior import (Chart, DifferentialForm, VectorField,
                       exterior_derivative, interior, lie_bracket)
from .algebroid import AnchoredBundle, CheckOutcome

__all__ = [
    "PresymplecticStructure", "DualizedAnchor", "dualized_anchor",
    "omega_matrix_at", "pointwise_subspace_ops", "SubspaceReport",
    "c3_pointwise", "C3PointReport", "c4_frame_check", "C4Report",
]


@dataclass
class PresymplecticStructure:
    """A 2-form together with its closedness certificate."""

    form: DifferentialForm
    closed: CheckOutcome

    @staticmethod
    def load(form: DifferentialForm, domain: SampleDomain) -> "PresymplecticStructure":
        if form.degree != 2:
            raise ValueError("a presymplectic structure is a 2-form")
        d = exterior_derivative(form)
        items = [(f"d omega on {key}", ex.is_identically_zero(coeff, domain))
                 for key, coeff in d.terms.items()]
        return PresymplecticStructure(form, CheckOutcome.from_verdicts(items))

    @property
    def chart(self) -> Chart:
        return self.form.chart


@dataclass
class DualizedAnchor:
    """Matrix (gamma_i)_beta of 1-forms pairing the anchor with omega."""

    bundle: AnchoredBundle
    rows: tuple  # rows[i][beta] = (gamma_i)_beta

    def one_form(self, i: int) -> DifferentialForm:
        return DifferentialForm(self.bundle.chart, 1,
                                {(b,): c for b, c in enumerate(self.rows[i])})

    def matrix_at(self, point) -> np.ndarray:
        r = self.bundle.rank
        n = self.bundle.chart.dim
        out = np.zeros((r, n))
        for i in range(r):
            for b in range(n):
                out[i, b] = ex.evaluate(self.rows[i][b], point)
        return out

    def kernel_at(self, point, tol: float) -> np.ndarray:
        """Pointwise presymplectic orthogonal of the anchor image."""
        return linalg.nullspace(self.matrix_at(point), tol)


def dualized_anchor(bundle: AnchoredBundle, omega: DifferentialForm) -> DualizedAnchor:
    if bundle.chart.names != omega.chart.names:
        raise ValueError("bundle and form live on different charts")
    rows = []
    for i in range(bundle.rank):
        gi = interior(bundle.frame_field(i), omega)
        rows.append(tuple(gi.coefficient((b,)) for b in range(bundle.chart.dim)))
    return DualizedAnchor(bundle, tuple(rows))


def omega_matrix_at(omega: DifferentialForm, point) -> np.ndarray:
    n = omega.chart.dim
    w = np.zeros((n, n))
    for (a, b), coeff in omega.terms.items():
        v = ex.evaluate(coeff, point)
        w[a, b] = v
        w[b, a] = -v
    return w


@dataclass
class SubspaceReport:
    rank: int
    orthogonal: np.ndarray  # columns form a basis of V-perp
    is_isotropic: bool
    is_coisotropic: bool


def pointwise_subspace_ops(omega: DifferentialForm, point,
                           spanning: Sequence[Sequence[float]],
                           tol: float) -> SubspaceReport:
    """Rank of omega at the point plus orthogonal/isotropy data for span(V)."""
    w = omega_matrix_at(omega, point)
    if not np.all(np.isfinite(w)):
        raise ValueError(f"omega has non-finite entries at {point}")
    n = w.shape[0]
    rank = linalg.numerical_rank(w, tol)
    v = np.array(spanning, dtype=float).reshape(-1, n)
    pairings = v @ w  # row k = iota_{v_k} omega as a covector
    orth = linalg.nullspace(pairings, tol)
    vt = v.T  # columns span V
    iso = linalg.subspace_contains(orth, vt, tol)
    coiso = linalg.subspace_contains(vt, orth, tol)
    return SubspaceReport(rank=rank, orthogonal=orth,
                          is_isotropic=iso, is_coisotropic=coiso)


@dataclass
class C3PointReport:
    passed: bool
    kernel_dim: int
    residual: float
    witness: Optional[str] = None


def c3_pointwise(bundle: AnchoredBundle, omega: DifferentialForm,
                 point, tol: float) -> C3PointReport:
    """Necessary pointwise test for the differential-ideal condition.

    At the given point, each d(gamma_i) must vanish on pairs of vectors from
    the joint kernel of all gamma_j. Necessary but not sufficient: vanishing
    on the kernel at a point does not produce the required factorization
    d(gamma_i) = Omega^j_i ^ gamma_j globally.
    """
    gamma = dualized_anchor(bundle, omega)
    kernel = gamma.kernel_at(point, tol)
    kdim = kernel.shape[1]
    worst = 0.0
    witness = None
    scale = 1.0 + float(np.max(np.abs(gamma.matrix_at(point))) if gamma.rows else 0.0)
    for i in range(bundle.rank):
        dg = exterior_derivative(gamma.one_form(i))
        for a in range(kdim):
            for b in range(a + 1, kdim):
                u, w = kernel[:, a], kernel[:, b]
                total = 0.0
                for (s, t), coeff in dg.terms.items():
                    v = ex.evaluate(coeff, point)
                    total += v * (u[s] * w[t] - u[t] * w[s])
                    scale = max(scale, 1.0 + abs(v))
                if abs(total) > worst:
                    worst = float(abs(total))
                    witness = f"d gamma_{i} on kernel pair ({a},{b})"
    passed = bool(worst <= tol * scale)
    return C3PointReport(passed=passed, kernel_dim=int(kdim), residual=worst,
                         witness=None if passed else witness)


@dataclass
class C4Report:
    passed: bool
    membership_ok: bool
    span_dim: Optional[int]
    residual: float
    witness: Optional[str] = None


def c4_frame_check(bundle: AnchoredBundle, omega: DifferentialForm,
                   frame: Sequence[VectorField], domain: SampleDomain) -> C4Report:
    """Involutivity of the presymplectic orthogonal of the anchor image.

    The caller supplies a symbolic frame claimed to span rho(A)-perp on the
    sampling domain. Checks, per sample: membership of each frame field in
    the orthogonal, constancy of the span dimension, and containment of all
    pairwise Lie brackets in the pointwise span.
    """
    gamma = dualized_anchor(bundle, omega)
    tol = domain.tol
    names = bundle.chart.names
    brackets = {}
    for a in range(len(frame)):
        for b in range(a + 1, len(frame)):
            brackets[(a, b)] = lie_bracket(frame[a], frame[b])
    span_dim = None
    worst = 0.0
    witness = None
    membership_ok = True
    for k in range(domain.n_samples):
        p = domain.point(k)
        gm = gamma.matrix_at(p)
        fmat = np.array([f.evaluate(p) for f in frame], dtype=float)  # rows
        pair = gm @ fmat.T
        scale = 1.0 + max(np.max(np.abs(gm)), np.max(np.abs(fmat)))
        if pair.size and np.max(np.abs(pair)) > tol * scale:
            worst = max(worst, float(np.max(np.abs(pair))))
            return C4Report(False, False, span_dim, worst,
                            f"frame field leaves the orthogonal at sample {k}")
        dim = int(linalg.numerical_rank(fmat, tol))
        if span_dim is None:
            span_dim = dim
        elif dim != span_dim:
            return C4Report(False, True, span_dim, worst,
                            f"span dimension varies ({span_dim} vs {dim} at sample {k})")
        basis = fmat.T
        for (a, b), br in brackets.items():
            vec = np.array(br.evaluate(p), dtype=float)
            norm = 1.0 + float(np.max(np.abs(vec)))
            if not np.any(np.abs(vec) > 0):
                continue
            sol, residuals, _, _ = np.linalg.lstsq(basis, vec, rcond=None)
            resid = float(np.max(np.abs(basis @ sol - vec)))
            if resid > tol * norm:
                worst = max(worst, resid)
                if witness is None:
                    comps = ", ".join(ex.to_string(ex.simplify(c), names)
                                      for c in br.components)
                    witness = (f"[frame {a}, frame {b}] = ({comps}) leaves the "
                               f"span at sample {k}, residual {resid:.3g}")
    if witness is not None:
        return C4Report(False, True, span_dim, worst, witness)
    return C4Report(True, True, span_dim, 0.0)
