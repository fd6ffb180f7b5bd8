"""Model files, orchestration, the CLI, and the HTTP service."""

import json

import pytest
from fastapi.testclient import TestClient

from algebroid_forge.catalog import CATALOG, catalog_model, catalog_names
from algebroid_forge.checks import CHECK_NAMES, run_checks
from algebroid_forge.cli import main as cli_main
from algebroid_forge.models import ModelError, ModelSpec, build_runtime
from algebroid_forge.service import (CatalogRunRequest, CheckRequest,
                                     SynthRequest, WeilRequest, app,
                                     do_catalog_run, do_check, do_synth,
                                     do_weil)


def cylinder_spec():
    return catalog_model("cylinder")


# ---------------------------------------------------------------------------
# model files


def test_model_round_trips_through_json():
    spec = cylinder_spec()
    raw = json.loads(spec.model_dump_json())
    again = ModelSpec.model_validate(raw)
    assert again == spec


def test_model_rejects_bad_expression():
    spec = cylinder_spec()
    spec.anchor = [["nope", "-z"]]
    with pytest.raises(ModelError, match="unknown identifier"):
        build_runtime(spec)


def test_model_rejects_bad_sparse_key():
    spec = cylinder_spec()
    spec.omega = {"0,5": "1"}
    with pytest.raises(ModelError, match="out of range"):
        build_runtime(spec)
    spec = cylinder_spec()
    spec.omega = {"0": "1"}
    with pytest.raises(ModelError, match="needs 2 indices"):
        build_runtime(spec)


def test_model_rejects_wrong_momentum_length():
    spec = cylinder_spec()
    spec.momentum = ["z", "0"]
    with pytest.raises(ModelError, match="one component per frame section"):
        build_runtime(spec)


def test_model_rejects_structure_without_ordered_indices():
    spec = catalog_model("heisenberg-action")
    spec.structure = {"1,0,2": "1"}
    with pytest.raises(ModelError, match="i<j"):
        build_runtime(spec)


def test_sampling_overrides_apply():
    rt = build_runtime(cylinder_spec(), samples=8, seed=11, tol=1e-7)
    assert rt.domain.n_samples == 8
    assert rt.domain.seed == 11
    assert rt.domain.tol == 1e-7


# ---------------------------------------------------------------------------
# orchestration


def test_dependency_skips_on_nonclosed_omega():
    rep = run_checks(build_runtime(catalog_model("nonclosed-omega")))
    by_name = {c.name: c for c in rep.checks}
    assert by_name["closed_omega"].verdict == "fail"
    for dependent in ("c3_pointwise", "c4_frame", "h1", "h2", "h3",
                      "torsion_criterion", "weil_theorem"):
        assert by_name[dependent].verdict == "skipped"
        assert "closed" in by_name[dependent].skipped_reason
    # identities that hold for arbitrary 2-forms still run
    assert by_name["lemma916"].verdict == "pass"
    assert by_name["cartan_table"].verdict == "pass"


def test_torsion_criterion_skipped_when_momentum_equation_fails():
    spec = catalog_model("darboux-r2-compatible")
    spec.synthesis = None  # trivial connection: the momentum equation fails
    rep = run_checks(build_runtime(spec))
    by_name = {c.name: c for c in rep.checks}
    assert by_name["h2"].verdict == "fail"
    assert by_name["torsion_criterion"].verdict == "skipped"
    assert "momentum equation" in by_name["torsion_criterion"].skipped_reason


def test_h3_skipped_when_axioms_fail():
    spec = catalog_model("contact-r4")
    spec.momentum = ["0", "0"]
    rep = run_checks(build_runtime(spec))
    by_name = {c.name: c for c in rep.checks}
    assert by_name["axioms"].verdict == "fail"
    assert by_name["h3"].verdict == "skipped"


def test_selection_subset_runs_prerequisites_silently():
    rep = run_checks(build_runtime(cylinder_spec()), ["h3", "weil_theorem"])
    names = [c.name for c in rep.checks]
    assert names == ["h3", "weil_theorem"]
    assert all(c.verdict == "pass" for c in rep.checks)


def test_unknown_check_name_raises():
    with pytest.raises(ValueError, match="unknown checks"):
        run_checks(build_runtime(cylinder_spec()), ["h9"])


def test_catalog_has_enough_entries_and_expected_tables():
    assert len(catalog_names()) >= 9
    for name in catalog_names():
        spec = CATALOG[name]
        assert set(spec.expected) == set(CHECK_NAMES)


def test_catalog_golden_suite_matches():
    out = do_catalog_run(CatalogRunRequest())
    assert out.ok, [(r.model, r.mismatches) for r in out.results if not r.matches]


def test_reports_are_deterministic():
    a = do_catalog_run(CatalogRunRequest(seed=3)).model_dump_json()
    b = do_catalog_run(CatalogRunRequest(seed=3)).model_dump_json()
    assert a == b


def test_synthesis_failure_degrades_to_skips():
    spec = catalog_model("darboux-r2-compatible")
    spec.momentum = ["p", "0"]  # vanishing candidate: synthesis refuses
    rt = build_runtime(spec)
    assert rt.synthesis_error is not None
    rep = run_checks(rt)
    by_name = {c.name: c for c in rep.checks}
    assert by_name["h2"].verdict == "skipped"
    assert "synthesis failed" in by_name["h2"].skipped_reason


def test_catalog_wide_bracket_leibniz_and_detection_agreement():
    # over every catalog model: the bracket satisfies the Leibniz rule for a
    # random coefficient function, the nilpotency detection of the bundle
    # differential agrees with the bracket-level axiom checks, and the
    # anchor-morphism comparison matches the direct vector-field computation
    from algebroid_forge import expr as ex
    from algebroid_forge.algebroid import (Section, algebroid_bracket,
                                           anchor_of_section, check_axioms)
    from algebroid_forge.exterior import lie_bracket
    from conftest import assert_expr_equal, random_polynomial

    for name in catalog_names():
        rt = build_runtime(catalog_model(name))
        L = rt.algebroid
        dom = rt.domain
        rep = check_axioms(L, dom)
        assert rep.d_squared.passed == (rep.anchor_morphism.passed
                                        and rep.jacobi.passed), name
        direct_ok = True
        for i in range(L.rank):
            for j in range(i + 1, L.rank):
                lhs = anchor_of_section(L, algebroid_bracket(
                    L, Section.frame(L, i), Section.frame(L, j)))
                rhs = lie_bracket(L.bundle.frame_field(i),
                                  L.bundle.frame_field(j))
                for a, b in zip(lhs.components, rhs.components):
                    if not ex.is_identically_zero(ex.sub(a, b), dom).is_zero:
                        direct_ok = False
        assert direct_ok == rep.anchor_morphism.passed, name
        f = random_polynomial(777, 0, rt.chart.dim)
        a = Section.frame(L, 0)
        b = Section.frame(L, L.rank - 1)
        lhs = algebroid_bracket(L, a, b.scale(f))
        rhs = algebroid_bracket(L, a, b).scale(f).add(
            b.scale(anchor_of_section(L, a).apply_to(f)))
        for x, y in zip(lhs.components, rhs.components):
            assert_expr_equal(x, y, dom)


def test_catalog_wide_dual_pairing_identity():
    # d<mu, a> = <D mu, a> + <mu, D a> on every catalog model carrying a
    # momentum section, for frame sections and coordinate multiples
    from algebroid_forge import expr as ex
    from algebroid_forge.algebroid import Section
    from algebroid_forge.connection import AStarValuedForm, covariant_derivative
    from conftest import assert_expr_equal

    for name in catalog_names():
        rt = build_runtime(catalog_model(name))
        if rt.momentum is None or rt.synthesis_error:
            continue
        r = rt.algebroid.rank
        dmu = covariant_derivative(
            rt.connection,
            AStarValuedForm.from_dual_section(rt.chart, rt.momentum))
        for i in range(r):
            for scale in (ex.ONE, ex.Coord(0)):
                a = Section.frame(rt.algebroid, i).scale(scale)
                paired = ex.add(*(ex.mul(rt.momentum[k], a.components[k])
                                  for k in range(r)))
                da = rt.connection.derivative_of_section(a.components)
                for alpha in range(rt.chart.dim):
                    lhs = ex.differentiate(paired, alpha)
                    rhs = ex.add(
                        ex.add(*(ex.mul(dmu.component((alpha,), k),
                                        a.components[k]) for k in range(r))),
                        ex.add(*(ex.mul(rt.momentum[k],
                                        da.component((alpha,), k))
                                 for k in range(r))))
                    assert_expr_equal(lhs, rhs, rt.domain)


# ---------------------------------------------------------------------------
# service layer and endpoints


def test_do_check_selected_checks():
    rep = do_check(CheckRequest(model=cylinder_spec(), checks=["h1", "h2"]))
    assert [c.name for c in rep.checks] == ["h1", "h2"]
    assert all(c.verdict == "pass" for c in rep.checks)


def test_do_synth_emits_connection_entries():
    spec = catalog_model("darboux-r2-compatible")
    spec.synthesis = None
    out = do_synth(SynthRequest(model=spec, v_ref=["0", "1"]))
    assert out.model.connection == {"1,0,1": "1"}


def test_do_weil_reports_bidegrees():
    out = do_weil(WeilRequest(model=catalog_model("darboux-r2-noncompatible")))
    assert out.bidegree_passed == {"(3,0)": True, "(2,1)": True, "(1,2)": False}
    assert not out.closed
    ok = do_weil(WeilRequest(model=cylinder_spec()))
    assert ok.closed and ok.basic


def test_http_endpoints():
    client = TestClient(app)
    assert client.get("/health").json()["status"] == "ok"
    assert "cylinder" in client.get("/catalog").json()["models"]
    assert client.get("/catalog/zzz").status_code == 404
    spec = client.get("/catalog/translation").json()
    rep = client.post("/check", json={"model": spec})
    assert rep.status_code == 200
    verdicts = {c["name"]: c["verdict"] for c in rep.json()["checks"]}
    assert verdicts["zero_locus"] == "pass"
    bad = dict(spec)
    bad["anchor"] = [["oops", "0"]]
    assert client.post("/check", json={"model": bad}).status_code == 422
    run = client.post("/catalog/run", json={"name": "cylinder"})
    assert run.json()["ok"] is True
    weil = client.post("/weil", json={"model": spec})
    assert weil.json()["closed"] is True
    synth_spec = client.get("/catalog/darboux-r2-compatible").json()
    synth_spec["synthesis"] = None
    synth = client.post("/synth", json={"model": synth_spec, "v_ref": ["0", "1"]})
    assert synth.status_code == 200
    assert synth.json()["model"]["connection"] == {"1,0,1": "1"}
    refused = client.post("/synth", json={"model": synth_spec,
                                          "v_ref": ["0", "q"]})
    assert refused.status_code == 409


# ---------------------------------------------------------------------------
# command-line client


def write_model(tmp_path, spec, name="model.json"):
    path = tmp_path / name
    path.write_text(spec.model_dump_json())
    return str(path)


def test_cli_check_pass_and_fail_exit_codes(tmp_path, capsys):
    ok = cli_main(["check", write_model(tmp_path, cylinder_spec())])
    assert ok == 0
    bad = cli_main(["check",
                    write_model(tmp_path, catalog_model("euler-plane"))])
    assert bad == 1
    out = capsys.readouterr().out
    assert "c3_pointwise" in out and "FAIL" in out


def test_cli_malformed_model_exits_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"chart": {"coordinates": ["x"], "domain": [[0, 1]]}, '
                    '"rank": 1, "anchor": [["y"]]}')
    assert cli_main(["check", str(path)]) == 2
    assert "unknown identifier" in capsys.readouterr().err


def test_cli_json_format_is_machine_readable(tmp_path, capsys):
    code = cli_main(["check", write_model(tmp_path, cylinder_spec()),
                     "--format", "json", "--checks", "h1,h2,h3"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert [c["name"] for c in payload["checks"]] == ["h1", "h2", "h3"]


def test_cli_catalog_run_detects_mismatch(tmp_path, capsys, monkeypatch):
    assert cli_main(["catalog", "run", "cylinder"]) == 0
    # sabotage one expectation to see the nonzero exit
    import algebroid_forge.catalog as cat
    spec = cat.CATALOG["cylinder"].model_copy(deep=True)
    spec.expected = dict(spec.expected)
    spec.expected["h1"] = "fail"
    monkeypatch.setitem(cat.CATALOG, "cylinder", spec)
    assert cli_main(["catalog", "run", "cylinder"]) == 1
    assert "MISMATCH" in capsys.readouterr().out


def test_cli_catalog_run_byte_identical(tmp_path, capsys):
    assert cli_main(["catalog", "run", "--format", "json", "--seed", "4"]) == 0
    first = capsys.readouterr().out
    assert cli_main(["catalog", "run", "--format", "json", "--seed", "4"]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_cli_weil_exit_codes(tmp_path):
    assert cli_main(["weil", write_model(tmp_path, cylinder_spec())]) == 0
    assert cli_main(["weil", write_model(
        tmp_path, catalog_model("darboux-r2-noncompatible"))]) == 1


def test_cli_synth_round_trip(tmp_path, capsys):
    spec = catalog_model("darboux-r2-compatible")
    spec.synthesis = None
    code = cli_main(["synth", write_model(tmp_path, spec), "--vref", "0,1"])
    assert code == 0
    emitted = json.loads(capsys.readouterr().out)
    assert emitted["connection"] == {"1,0,1": "1"}
    # the emitted model passes the full battery
    path = tmp_path / "synth.json"
    path.write_text(json.dumps(emitted))
    assert cli_main(["check", str(path)]) == 0
    capsys.readouterr()


def test_cli_synth_refusal(tmp_path, capsys):
    spec = catalog_model("darboux-r2-compatible")
    spec.synthesis = None
    spec.momentum = ["p", "0"]
    code = cli_main(["synth", write_model(tmp_path, spec), "--vref", "1,0"])
    assert code == 1
    assert "vanishing momentum" in capsys.readouterr().err


def test_cli_remote_mode_against_test_server(tmp_path, monkeypatch):
    # the thin client can talk to a live server; patch its transport with the
    # in-process test client
    from starlette.testclient import TestClient as StarletteClient
    import algebroid_forge.cli as cli_mod

    class FakeRemote:
        def __init__(self, base):
            self.client = StarletteClient(app)

        def post(self, path, payload):
            resp = self.client.post(path, json=payload)
            assert resp.status_code == 200
            return resp.json()

    monkeypatch.setattr(cli_mod, "_Remote", FakeRemote)
    code = cli_main(["check", write_model(tmp_path, cylinder_spec()),
                     "--server", "http://example.invalid"])
    assert code == 0
