"""Momentum sections: the compatibility checks, locus geometry, synthesis,
and Lie-algebra quotients."""

from fractions import Fraction

import pytest

from algebroid_forge import expr as ex
from algebroid_forge.expr import SamplePoint
from algebroid_forge.exterior import DifferentialForm
from algebroid_forge.algebroid import AnchoredBundle, LieAlgebroid
from algebroid_forge.connection import Connection, check_h1
from algebroid_forge.hamiltonian import (FiniteLieAlgebra, SynthesisError,
                                         check_h2, check_h3,
                                         quotient_by_isotropy, reduced_bracket,
                                         rho_pullback_of_omega,
                                         synthesize_tangent_connection,
                                         torsion_criterion, zero_locus_report)
from algebroid_forge.weil import GradedModel, prop917_outcome

from conftest import (assert_expr_equal, make_chart, random_model_suite,
                      valid_algebroid_r3_models)
from algebroid_forge.weil import lemma916_outcome


def std_omega(chart, pairs=((0, 1),)):
    return DifferentialForm(chart, 2, {p: ex.ONE for p in pairs})


def tangent_plane(plane):
    bundle = AnchoredBundle.from_strings(plane, [["1", "0"], ["0", "1"]])
    return bundle, LieAlgebroid(bundle, {})


# ---------------------------------------------------------------------------
# momentum equation and bracket compatibility


def test_h2_cylinder(cylinder_chart):
    ch = cylinder_chart
    bundle = AnchoredBundle.from_strings(ch, [["1", "-z"]])
    conn = Connection.from_entries(ch, 1, {(0, 0, 0): ch.parse("-1")})
    out = check_h2(bundle, std_omega(ch), conn, [ch.parse("z")], ch.domain)
    assert out.passed and out.exact


def test_h2_darboux_rotational(plane):
    bundle, _ = tangent_plane(plane)
    out = check_h2(bundle, std_omega(plane), Connection.trivial(plane, 2),
                   [plane.parse("p"), plane.parse("-q")], plane.domain)
    assert out.passed and out.exact


def test_h2_zero_momentum_fails_when_anchored(cylinder_chart):
    ch = cylinder_chart
    bundle = AnchoredBundle.from_strings(ch, [["1", "-z"]])
    conn = Connection.from_entries(ch, 1, {(0, 0, 0): ch.parse("-1")})
    out = check_h2(bundle, std_omega(ch), conn, [ex.ZERO], ch.domain)
    assert not out.passed


def test_h3_rank_one_vacuous(cylinder_chart):
    ch = cylinder_chart
    bundle = AnchoredBundle.from_strings(ch, [["1", "-z"]])
    L = LieAlgebroid(bundle, {})
    out = check_h3(L, std_omega(ch), [ch.parse("z")], ch.domain)
    assert out.passed and out.exact


def test_h3_darboux_rotational_fails_with_residual_minus_omega(plane):
    _, L = tangent_plane(plane)
    mu = [plane.parse("p"), plane.parse("-q")]
    out = check_h3(L, std_omega(plane), mu, plane.domain)
    assert not out.passed
    # the residual 2-form is exactly -omega
    from algebroid_forge.algebroid import AForm, algebroid_differential
    resid = algebroid_differential(L, AForm.covector(L, mu)).add(
        rho_pullback_of_omega(L, std_omega(plane)))
    assert_expr_equal(resid.coefficient((0, 1)), ex.rat(-1), plane.domain)


def test_h3_darboux_liouville_passes(plane):
    _, L = tangent_plane(plane)
    out = check_h3(L, std_omega(plane), [plane.parse("p"), ex.ONE],
                   plane.domain)
    assert out.passed


def test_rho_pullback_is_antisymmetric_well_formed(plane, cylinder_chart):
    for m_name, m in random_model_suite()[:6]:
        form = rho_pullback_of_omega(m["algebroid"], m["omega"])
        assert form.degree == 2
        # storage only keeps i < j keys; coefficient access antisymmetrizes
        assert_expr_equal(form.coefficient((1, 0)),
                          ex.neg(form.coefficient((0, 1))), m["chart"].domain)


# ---------------------------------------------------------------------------
# torsion criterion


def test_torsion_criterion_darboux_rotational(plane):
    _, L = tangent_plane(plane)
    rep = torsion_criterion(L, std_omega(plane), Connection.trivial(plane, 2),
                            [plane.parse("p"), plane.parse("-q")], plane.domain)
    assert rep.precondition_ok and not rep.passed
    assert rep.outcome.residual == pytest.approx(1.0)


def test_torsion_criterion_cylinder(cylinder_chart):
    ch = cylinder_chart
    bundle = AnchoredBundle.from_strings(ch, [["1", "-z"]])
    L = LieAlgebroid(bundle, {})
    conn = Connection.from_entries(ch, 1, {(0, 0, 0): ch.parse("-1")})
    rep = torsion_criterion(L, std_omega(ch), conn, [ch.parse("z")], ch.domain)
    assert rep.precondition_ok and rep.passed


def test_torsion_criterion_fibre_model(plane):
    bundle = AnchoredBundle(plane, 3, (((ex.ZERO,) * 2),) * 3)
    L = LieAlgebroid.from_strings(bundle, {(0, 1, 2): "1"})
    rep = torsion_criterion(L, std_omega(plane), Connection.trivial(plane, 3),
                            [ex.ZERO, ex.ZERO, ex.ONE], plane.domain)
    assert rep.precondition_ok and not rep.passed
    assert rep.outcome.residual == pytest.approx(1.0)  # <mu, T(a0,a1)> = -1


def test_torsion_criterion_reports_failed_precondition(plane):
    _, L = tangent_plane(plane)
    rep = torsion_criterion(L, std_omega(plane), Connection.trivial(plane, 2),
                            [plane.parse("p"), ex.ONE], plane.domain)
    assert not rep.precondition_ok and rep.outcome is None


def test_torsion_criterion_equals_h3_wherever_h2_passes():
    for name, m in random_model_suite():
        dom = m["chart"].domain
        h2 = check_h2(m["bundle"], m["omega"], m["connection"], m["momentum"],
                      dom)
        if not h2.passed:
            continue
        h3 = check_h3(m["algebroid"], m["omega"], m["momentum"], dom)
        rep = torsion_criterion(m["algebroid"], m["omega"], m["connection"],
                                m["momentum"], dom)
        assert rep.precondition_ok
        assert rep.passed == h3.passed, name


# ---------------------------------------------------------------------------
# zero locus


def test_zero_locus_translation_model(plane):
    bundle = AnchoredBundle.from_strings(plane, [["1", "0"]])
    L = LieAlgebroid(bundle, {})
    for q0 in (-1.5, -0.75, 0.0, 0.75, 1.5):
        rep = zero_locus_report(L, std_omega(plane),
                                Connection.trivial(plane, 1),
                                [plane.parse("p")], SamplePoint((q0, 0.0)),
                                plane.domain)
        assert rep.on_locus and rep.clean
        assert rep.tangent_dim == 1
        assert rep.equals_orthogonal and rep.coisotropic
        assert rep.invariance.passed


def test_zero_locus_darboux_origin_not_coisotropic(plane):
    _, L = tangent_plane(plane)
    rep = zero_locus_report(L, std_omega(plane), Connection.trivial(plane, 2),
                            [plane.parse("p"), plane.parse("-q")],
                            SamplePoint((0.0, 0.0)), plane.domain)
    assert rep.on_locus and rep.tangent_dim == 0
    assert rep.equals_orthogonal
    assert not rep.coisotropic


def test_zero_locus_off_locus(plane):
    bundle = AnchoredBundle.from_strings(plane, [["1", "0"]])
    L = LieAlgebroid(bundle, {})
    rep = zero_locus_report(L, std_omega(plane), Connection.trivial(plane, 1),
                            [plane.parse("p")], SamplePoint((0.0, 1.0)),
                            plane.domain)
    assert not rep.on_locus


# ---------------------------------------------------------------------------
# connection synthesis for tangent models


def test_synthesis_darboux_full_certificate(plane):
    bundle, L = tangent_plane(plane)
    omega = std_omega(plane)
    mu = [plane.parse("p"), ex.ONE]
    conn = synthesize_tangent_connection(plane, omega, mu,
                                         [ex.ZERO, ex.ONE], plane.domain)
    assert check_h1(bundle, omega, conn, plane.domain, L).passed
    assert check_h2(bundle, omega, conn, mu, plane.domain).passed
    assert check_h3(L, omega, mu, plane.domain).passed


def test_synthesis_away_from_zero_gives_weak_structure_only():
    ch = make_chart(("q", "p"), box=(1.0, 2.0))
    bundle = AnchoredBundle.from_strings(ch, [["1", "0"], ["0", "1"]])
    L = LieAlgebroid(bundle, {})
    omega = std_omega(ch)
    mu = [ch.parse("p"), ch.parse("-q")]
    conn = synthesize_tangent_connection(ch, omega, mu, [ex.ONE, ex.ZERO],
                                         ch.domain)
    assert check_h1(bundle, omega, conn, ch.domain, L).passed
    assert check_h2(bundle, omega, conn, mu, ch.domain).passed
    assert not check_h3(L, omega, mu, ch.domain).passed


def test_synthesis_refuses_vanishing_momentum(plane):
    with pytest.raises(SynthesisError, match="vanishing momentum"):
        synthesize_tangent_connection(plane, std_omega(plane),
                                      [plane.parse("p"), ex.ZERO],
                                      [ex.ONE, ex.ZERO], plane.domain)


def test_synthesis_refuses_non_constant_omega(plane):
    omega = DifferentialForm(plane, 2, {(0, 1): plane.parse("q + 2")})
    with pytest.raises(SynthesisError, match="constant"):
        synthesize_tangent_connection(plane, omega, [plane.parse("p"), ex.ONE],
                                      [ex.ZERO, ex.ONE], plane.domain)


def test_synthesis_refuses_degenerate_omega():
    ch = make_chart(("q", "p", "z"))
    omega = std_omega(ch)
    with pytest.raises(SynthesisError, match="degenerate"):
        synthesize_tangent_connection(ch, omega,
                                      [ch.parse("p"), ex.ONE, ex.ZERO],
                                      [ex.ZERO, ex.ONE, ex.ZERO], ch.domain)


def test_synthesis_output_contract_on_random_momenta():
    # the synthesized connection always certifies the momentum equation
    for name, m in random_model_suite()[:8]:
        assert check_h1(m["bundle"], m["omega"], m["connection"],
                        m["chart"].domain, m["algebroid"]).passed, name
        assert check_h2(m["bundle"], m["omega"], m["connection"],
                        m["momentum"], m["chart"].domain).passed, name


# ---------------------------------------------------------------------------
# operator identities tied to momentum sections


def test_prop917_on_fully_compatible_models(plane, cylinder_chart):
    # <mu, iota_rho R + DT> = 0 and <mu, DT> = 0 wherever the full set of
    # conditions holds
    cases = []
    ch = cylinder_chart
    cyl_bundle = AnchoredBundle.from_strings(ch, [["1", "-z"]])
    cases.append((GradedModel(LieAlgebroid(cyl_bundle, {}),
                              Connection.from_entries(ch, 1, {(0, 0, 0):
                                                              ch.parse("-1")})),
                  [ch.parse("z")], ch.domain))
    bundle, L = tangent_plane(plane)
    mu = [plane.parse("p"), ex.ONE]
    conn = synthesize_tangent_connection(plane, std_omega(plane), mu,
                                         [ex.ZERO, ex.ONE], plane.domain)
    cases.append((GradedModel(L, conn), mu, plane.domain))
    heis_bundle = AnchoredBundle.from_strings(plane, [["0", "-1"], ["1", "0"],
                                                      ["0", "0"]])
    heis = LieAlgebroid.from_strings(heis_bundle, {(0, 1, 2): "1"})
    cases.append((GradedModel(heis, Connection.trivial(plane, 3)),
                  [plane.parse("q"), plane.parse("p"), ex.rat(-1)],
                  plane.domain))
    trans_bundle = AnchoredBundle.from_strings(plane, [["1", "0"]])
    cases.append((GradedModel(LieAlgebroid(trans_bundle, {}),
                              Connection.trivial(plane, 1)),
                  [plane.parse("p")], plane.domain))
    for gm, mu, dom in cases:
        full, dt_only = prop917_outcome(gm, mu, dom)
        assert full.passed and dt_only.passed


def test_lemma916_holds_for_arbitrary_two_forms():
    # twenty seeded models with valid axioms, most omegas not closed
    for m in valid_algebroid_r3_models():
        gm = GradedModel(m["algebroid"], m["connection"])
        assert lemma916_outcome(gm, m["omega"], m["chart"].domain).passed


# ---------------------------------------------------------------------------
# finite Lie algebras, quotients, reduced brackets


def heisenberg_lie():
    return FiniteLieAlgebra(3, {(0, 1, 2): 1})


def test_finite_lie_algebra_certifies_jacobi():
    heisenberg_lie()
    with pytest.raises(ValueError, match="Jacobi"):
        FiniteLieAlgebra(3, {(0, 1, 2): 1, (0, 2, 0): 1, (1, 2, 1): 1})


def test_quotient_heisenberg_action(plane):
    bundle = AnchoredBundle.from_strings(plane, [["0", "-1"], ["1", "0"],
                                                 ["0", "0"]])
    rep = quotient_by_isotropy(heisenberg_lie(), bundle,
                               [plane.parse("q"), plane.parse("p"), ex.ONE],
                               plane.domain)
    assert rep.kernel == [[0, 0, 1]]
    assert rep.momentum_constant_on_kernel
    assert rep.kernel_values == [Fraction(1)]
    # the descended momentum annihilates the kernel
    assert_expr_equal(rep.descended[2], ex.ZERO, plane.domain)
    assert rep.obstruction_basis == [[0, 0, 1]]
    assert rep.obstruction_values == [Fraction(1)]
    assert rep.descends_hamiltonian is False


def test_quotient_abelian_action_descends(plane):
    bundle = AnchoredBundle.from_strings(plane, [["1", "0"]])
    rep = quotient_by_isotropy(FiniteLieAlgebra(1, {}), bundle,
                               [plane.parse("p")], plane.domain)
    assert rep.kernel == []
    assert rep.obstruction_basis == []
    assert rep.descends_hamiltonian is True


def test_quotient_detects_nonconstant_kernel_pairing(plane):
    bundle = AnchoredBundle.from_strings(plane, [["0", "-1"], ["1", "0"],
                                                 ["0", "0"]])
    rep = quotient_by_isotropy(heisenberg_lie(), bundle,
                               [plane.parse("q"), plane.parse("p"),
                                plane.parse("q")], plane.domain)
    assert not rep.momentum_constant_on_kernel
    assert "not a momentum map" in rep.note


def test_reduced_bracket_ideal_quotient(plane):
    # kappa = 0 with an ideal reproduces the quotient algebra bracket
    lie = FiniteLieAlgebra(2, {(0, 1, 1): 1})  # [X, Y] = Y
    h = [[Fraction(0), Fraction(1)]]
    kappa = [[ex.ZERO]]
    out = reduced_bracket(lie, h, kappa, plane,
                          [Fraction(1), Fraction(0)],
                          [Fraction(0), Fraction(1)], plane.domain)
    # [X, Y] = Y lies in h, so the coset is zero
    for c in out:
        assert_expr_equal(c, ex.ZERO, plane.domain)


def test_reduced_bracket_heisenberg_center(plane):
    lie = heisenberg_lie()
    h = [[Fraction(0), Fraction(0), Fraction(1)]]
    kappa = [[plane.parse("q"), plane.parse("p^2")]]
    out = reduced_bracket(lie, h, kappa, plane,
                          [Fraction(1), Fraction(0), Fraction(0)],
                          [Fraction(0), Fraction(1), Fraction(0)],
                          plane.domain)
    for c in out:
        assert_expr_equal(c, ex.ZERO, plane.domain)


def test_reduced_bracket_antisymmetry_and_representative_independence(plane):
    lie = FiniteLieAlgebra(2, {(0, 1, 1): 1})
    h = [[Fraction(0), Fraction(1)]]
    kappa = [[plane.parse("q*p")]]
    x = [Fraction(1), Fraction(0)]
    out = reduced_bracket(lie, h, kappa, plane, x, x, plane.domain)
    for c in out:
        assert_expr_equal(c, ex.ZERO, plane.domain)
    # shifting a representative by the subalgebra leaves the coset unchanged
    y = [Fraction(1), Fraction(0)]
    shifted = [Fraction(1), Fraction(5)]
    a = reduced_bracket(lie, h, kappa, plane, x, y, plane.domain)
    b = reduced_bracket(lie, h, kappa, plane, x, shifted, plane.domain)
    for u, v in zip(a, b):
        assert_expr_equal(u, v, plane.domain)


def test_reduced_bracket_rejects_non_subalgebra():
    lie = FiniteLieAlgebra(3, {(0, 1, 2): 1})
    ch = make_chart(("q", "p"))
    h = [[Fraction(1), Fraction(0), Fraction(0)],
         [Fraction(0), Fraction(1), Fraction(0)]]  # [Q, P] = I not in span
    with pytest.raises(ValueError, match="not a subalgebra"):
        reduced_bracket(lie, h, [[ex.ZERO], [ex.ZERO]], ch,
                        [Fraction(0)] * 3, [Fraction(0)] * 3, ch.domain)
