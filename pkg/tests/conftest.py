"""Shared fixtures: chart builders and seeded random model factories.

Random models are deterministic functions of an integer seed, built from
the same counter-based generator the engine uses, so test runs are
reproducible byte for byte.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from algebroid_forge import expr as ex
from algebroid_forge.expr import SampleDomain, sample_unit
from algebroid_forge.exterior import Chart, DifferentialForm, VectorField
from algebroid_forge.algebroid import AnchoredBundle, LieAlgebroid
from algebroid_forge.connection import Connection
from algebroid_forge.hamiltonian import synthesize_tangent_connection


def make_chart(names, box=(-2.0, 2.0), n=32, seed=0, tol=1e-9):
    return Chart(tuple(names), SampleDomain(tuple([box] * len(names)), n, seed, tol))


@pytest.fixture
def plane():
    return make_chart(("q", "p"))


@pytest.fixture
def cylinder_chart():
    return make_chart(("phi", "z"), box=(-3.0, 3.0))


def assert_exact_zero(e, domain):
    verdict = ex.is_identically_zero(e, domain)
    assert verdict.exact, f"expected ExactZero, got {verdict}"


def assert_zero(e, domain):
    verdict = ex.is_identically_zero(e, domain)
    assert verdict.is_zero, f"expected a zero verdict, got {verdict}"


def assert_expr_equal(a, b, domain):
    assert_zero(ex.sub(a, b), domain)


def assert_form_zero(form, domain):
    for key, coeff in form.terms.items():
        verdict = ex.is_identically_zero(coeff, domain)
        assert verdict.is_zero, f"coefficient {key}: {verdict}"


def assert_forms_equal(a, b, domain):
    assert_form_zero(a.subtract(b), domain)


# ---------------------------------------------------------------------------
# Deterministic random ingredients


def rand_int(seed, stream, index, lo, hi):
    u = sample_unit(seed, stream, index)
    return lo + int(u * (hi - lo + 1))


def random_polynomial(seed, stream, n_coords, degree=2, terms=3):
    """Small-coefficient polynomial in the first n_coords coordinates."""
    out = ex.ZERO
    for t in range(terms):
        c = rand_int(seed, stream, 3 * t, -3, 3)
        if c == 0:
            c = 1
        factors = [ex.rat(c)]
        total_deg = rand_int(seed, stream, 3 * t + 1, 0, degree)
        for d in range(total_deg):
            idx = rand_int(seed, stream, 3 * t + 2 + 17 * d, 0, n_coords - 1)
            factors.append(ex.Coord(idx))
        out = ex.add(out, ex.mul(*factors))
    return out


def random_vector_field(chart, seed, stream, degree=2):
    return VectorField(chart, tuple(
        random_polynomial(seed, stream + 101 * a, chart.dim, degree)
        for a in range(chart.dim)))


def random_form(chart, seed, stream, degree):
    from itertools import combinations
    terms = {}
    for idx, key in enumerate(combinations(range(chart.dim), degree)):
        terms[key] = random_polynomial(seed, stream + 211 * idx, chart.dim, 2)
    return DifferentialForm(chart, degree, terms)


def random_connection(chart, rank, seed, stream, degree=1):
    entries = {}
    for j in range(rank):
        for alpha in range(chart.dim):
            for i in range(rank):
                entries[(j, alpha, i)] = random_polynomial(
                    seed, stream + 7 * j + 13 * alpha + 29 * i, chart.dim, degree,
                    terms=2)
    return Connection.from_entries(chart, rank, entries)


# ---------------------------------------------------------------------------
# Random model families over the plane (rank 2)


def synth_tangent_model(k, compatible):
    """Tangent algebroid of the symplectic plane with a synthesized
    connection; the momentum candidate is compatible exactly when its
    differential is minus the area form."""
    chart = make_chart(("q", "p"))
    bundle = AnchoredBundle.from_strings(chart, [["1", "0"], ["0", "1"]])
    algebroid = LieAlgebroid(bundle, {})
    omega = DifferentialForm.from_strings(chart, 2, {(0, 1): "1"})
    f = random_polynomial(1000 + k, 5, 2, degree=2, terms=2)
    base = [ex.add(chart.parse("p"), ex.differentiate(f, 0)),
            ex.add(chart.parse("1"), ex.differentiate(f, 1))]
    if not compatible:
        # adding q^2 dp leaves mu nowhere vanishing in the dp component
        # direction while making d(mu) different from -omega
        base[1] = ex.add(base[1], chart.parse("q^2"))
        base[1] = ex.add(base[1], ex.ONE)  # keep the component positive
    # certify the dp-component is positive on the box by brute bounds
    lo, _ = ex.interval_evaluate(base[1], chart.domain.intervals)
    if lo <= 0:
        shift = ex.rat(Fraction(int(-lo) + 1))
        base[1] = ex.add(base[1], shift)
    v_ref = [ex.ZERO, ex.ONE]
    conn = synthesize_tangent_connection(chart, omega, base, v_ref, chart.domain)
    return dict(chart=chart, bundle=bundle, algebroid=algebroid, omega=omega,
                connection=conn, momentum=base)


def constant_action_model(k, compatible):
    """Abelian action by constant fields with the exact-primitive momentum
    map. With the trivial connection the compatibility residual is forced to
    -omega(v1, v2), so the action is compatible exactly when the two anchor
    images are parallel (isotropic image) and incompatible otherwise."""
    chart = make_chart(("q", "p"))
    a1 = (rand_int(2000 + k, 0, 0, -2, 2), rand_int(2000 + k, 0, 1, -2, 2))
    if a1 == (0, 0):
        a1 = (1, 0)
    if compatible:
        scale = rand_int(2000 + k, 1, 0, 1, 3)
        a2 = (scale * a1[0], scale * a1[1])
    else:
        a2 = (-a1[1], a1[0])  # rotate: independent, omega(v1, v2) != 0
    bundle = AnchoredBundle(chart, 2, (
        (ex.rat(a1[0]), ex.rat(a1[1])), (ex.rat(a2[0]), ex.rat(a2[1]))))
    algebroid = LieAlgebroid(bundle, {})
    omega = DifferentialForm.from_strings(chart, 2, {(0, 1): "1"})
    # gamma_i = iota_{v_i} omega = v^q dp - v^p dq has primitive
    # g_i = v^q p - v^p q
    q, p = ex.Coord(0), ex.Coord(1)
    mu = [ex.add(ex.mul(ex.rat(a1[0]), p), ex.neg(ex.mul(ex.rat(a1[1]), q))),
          ex.add(ex.mul(ex.rat(a2[0]), p), ex.neg(ex.mul(ex.rat(a2[1]), q)))]
    return dict(chart=chart, bundle=bundle, algebroid=algebroid, omega=omega,
                connection=Connection.trivial(chart, 2), momentum=mu)


def fibre_model(k, compatible):
    """Rank-2 bundle of Lie algebras (zero anchor) with constant structure
    and a horizontal momentum section."""
    chart = make_chart(("q", "p"))
    bundle = AnchoredBundle(chart, 2, ((ex.ZERO, ex.ZERO), (ex.ZERO, ex.ZERO)))
    c = rand_int(3000 + k, 0, 0, 1, 3)
    algebroid = LieAlgebroid(bundle, {(0, 1, 0): ex.rat(c)})
    omega = DifferentialForm.from_strings(chart, 2, {(0, 1): "1"})
    mu = [ex.ZERO if compatible else ex.ONE, ex.rat(rand_int(3000 + k, 1, 0, -2, 2))]
    return dict(chart=chart, bundle=bundle, algebroid=algebroid, omega=omega,
                connection=Connection.trivial(chart, 2), momentum=mu)


def unconstrained_model(k):
    """Fully random rank-2 data over the plane; nothing is guaranteed to hold."""
    chart = make_chart(("q", "p"))
    bundle = AnchoredBundle(chart, 2, (
        (random_polynomial(4000 + k, 0, 2), random_polynomial(4000 + k, 1, 2)),
        (random_polynomial(4000 + k, 2, 2), random_polynomial(4000 + k, 3, 2))))
    algebroid = LieAlgebroid(bundle, {
        (0, 1, 0): random_polynomial(4000 + k, 4, 2, degree=1, terms=2),
        (0, 1, 1): random_polynomial(4000 + k, 5, 2, degree=1, terms=2)})
    omega = DifferentialForm(chart, 2,
                             {(0, 1): random_polynomial(4000 + k, 6, 2, degree=2)})
    conn = random_connection(chart, 2, 4000 + k, 50)
    mu = [random_polynomial(4000 + k, 7, 2), random_polynomial(4000 + k, 8, 2)]
    return dict(chart=chart, bundle=bundle, algebroid=algebroid, omega=omega,
                connection=conn, momentum=mu)


def random_model_suite():
    """The twenty-model suite used by the oracle-equivalence criteria."""
    out = []
    for k in range(4):
        out.append(("synth-compat-%d" % k, synth_tangent_model(k, True)))
    for k in range(4):
        out.append(("synth-noncompat-%d" % k, synth_tangent_model(k, False)))
    for k in range(2):
        out.append(("action-compat-%d" % k, constant_action_model(k, True)))
    for k in range(2):
        out.append(("action-noncompat-%d" % k, constant_action_model(k, False)))
    for k in range(2):
        out.append(("fibre-compat-%d" % k, fibre_model(k, True)))
    for k in range(2):
        out.append(("fibre-noncompat-%d" % k, fibre_model(k, False)))
    for k in range(4):
        out.append(("unconstrained-%d" % k, unconstrained_model(k)))
    return out


def valid_algebroid_r3_models():
    """Axiom-satisfying rank-2 models over a 3-dimensional chart, used with
    arbitrary (generally non-closed) 2-forms."""
    out = []
    for k in range(20):
        chart = make_chart(("x", "y", "z"))
        kind = k % 3
        if kind == 0:
            # abelian action by constant fields
            rows = tuple(tuple(ex.rat(rand_int(5000 + k, i, a, -2, 2))
                               for a in range(3)) for i in range(2))
            bundle = AnchoredBundle(chart, 2, rows)
            algebroid = LieAlgebroid(bundle, {})
        elif kind == 1:
            # central-extension flavor: second section anchored to zero
            row = tuple(ex.rat(rand_int(5000 + k, 0, a, -2, 2)) for a in range(3))
            bundle = AnchoredBundle(chart, 2, (row, (ex.ZERO,) * 3))
            algebroid = LieAlgebroid(bundle, {(0, 1, 1): ex.rat(1)})
        else:
            # both sections anchored into one line field: a2 = f a1
            v = tuple(random_polynomial(5000 + k, a, 3, degree=1, terms=2)
                      for a in range(3))
            f = random_polynomial(5000 + k, 9, 3, degree=1, terms=2)
            vf = VectorField(chart, v)
            bundle = AnchoredBundle(chart, 2,
                                    (v, tuple(ex.mul(f, c) for c in v)))
            algebroid = LieAlgebroid(bundle, {(0, 1, 0): vf.apply_to(f)})
        omega = random_form(chart, 6000 + k, 0, 2)
        conn = random_connection(chart, 2, 7000 + k, 0)
        mu = [random_polynomial(8000 + k, 0, 3), random_polynomial(8000 + k, 1, 3)]
        out.append(dict(chart=chart, bundle=bundle, algebroid=algebroid,
                        omega=omega, connection=conn, momentum=mu))
    return out
