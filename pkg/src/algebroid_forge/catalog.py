"""Built-in example models with expected verdicts (the golden suite).

Each entry records what every check should report, so a catalog run is a
regression suite over the engine: anchored bundles that separate the
compatibility conditions, hamiltonian and non-hamiltonian momentum
sections on tangent algebroids, Lie algebra bundles and actions with
isotropy, and one model with a non-closed 2-form for the gating logic.

A note on the heisenberg-action entry: with the bracket [Q, P] = I
realized by rho(Q) = -d/dp, rho(P) = d/dq on the symplectic plane, the
momentum map (q, p, 1) satisfies the momentum equation but not bracket
compatibility as this engine defines it: the compatibility residual is
-2 omega(rho Q, rho P), and the BRST extension oracle confirms the
failure. Flipping the value on the center to -1 yields the fully
compatible variant, kept as heisenberg-action-adjusted.
"""

from __future__ import annotations

from .models import ModelSpec

__all__ = ["catalog_names", "catalog_model", "CATALOG"]


def _spec(**kwargs) -> ModelSpec:
    return ModelSpec(**kwargs)


CATALOG: dict[str, ModelSpec] = {}


def _register(spec: ModelSpec) -> None:
    CATALOG[spec.name] = spec


_register(_spec(
    name="cylinder",
    chart={"coordinates": ["phi", "z"], "domain": [(-3.0, 3.0), (-2.0, 2.0)]},
    rank=1,
    anchor=[["1", "-z"]],
    omega={"0,1": "1"},
    connection={"0,0,0": "-1"},
    momentum=["z"],
    frames={"orthogonal": [["1", "-z"]]},
    locus_points=[[0.4, 0.0], [-1.1, 0.0]],
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "pass",
        "c4_frame": "pass", "h1": "pass", "h2": "pass", "h3": "pass",
        "torsion_criterion": "pass", "commirhod": "pass", "zero_locus": "pass",
        "weil_theorem": "pass", "cartan_table": "pass",
        "parallel_projection": "pass", "quotient": "skipped",
        "lemma916": "pass", "prop917": "pass",
    },
))

# Radial anchor on the plane: the orthogonal distribution is involutive away
# from the origin but the differential-ideal condition fails there.
_register(_spec(
    name="euler-plane",
    chart={"coordinates": ["x", "y"], "domain": [(0.25, 2.0), (0.25, 2.0)]},
    rank=1,
    anchor=[["x", "y"]],
    omega={"0,1": "1"},
    frames={"orthogonal": [["x", "y"]]},
    c3_points=[[0.0, 0.0], [1.0, 0.0]],
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "fail",
        "c4_frame": "pass", "h1": "fail", "h2": "skipped", "h3": "skipped",
        "torsion_criterion": "skipped", "commirhod": "pass",
        "zero_locus": "skipped", "weil_theorem": "skipped",
        "cartan_table": "pass", "parallel_projection": "pass",
        "quotient": "skipped", "lemma916": "pass", "prop917": "skipped",
    },
))

# Spiraling kernel on the plane: the differential ideal closes, witnessed by
# the stored connection 1-form, but no rescaling of the generator is closed.
_register(_spec(
    name="spiral-plane",
    chart={"coordinates": ["x", "y"], "domain": [(-1.0, 1.0), (-1.0, 1.0)]},
    rank=1,
    anchor=[["y - (x^2 + y^2)*x", "-x - (x^2 + y^2)*y"]],
    omega={"0,1": "1"},
    connection={"0,0,0": "-4*y", "0,1,0": "4*x"},
    frames={"orthogonal": [["(x^2 + y^2)*x - y", "x + (x^2 + y^2)*y"]]},
    c3_points=[[0.0, 0.0], [0.5, 0.25]],
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "pass",
        "c4_frame": "pass", "h1": "pass", "h2": "skipped", "h3": "skipped",
        "torsion_criterion": "skipped", "commirhod": "pass",
        "zero_locus": "skipped", "weil_theorem": "skipped",
        "cartan_table": "pass", "parallel_projection": "pass",
        "quotient": "skipped", "lemma916": "pass", "prop917": "skipped",
    },
))

# Standard contact distribution as the presymplectic orthogonal: involutivity
# fails with bracket witness -d/dy.
_register(_spec(
    name="contact-r3",
    chart={"coordinates": ["x", "y", "z"],
           "domain": [(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)]},
    rank=1,
    anchor=[["1", "z", "0"]],
    omega={"0,1": "1"},
    frames={"orthogonal": [["1", "z", "0"], ["0", "0", "1"]]},
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "fail",
        "c4_frame": "fail", "h1": "fail", "h2": "skipped", "h3": "skipped",
        "torsion_criterion": "skipped", "commirhod": "pass",
        "zero_locus": "skipped", "weil_theorem": "skipped",
        "cartan_table": "pass", "parallel_projection": "pass",
        "quotient": "skipped", "lemma916": "pass", "prop917": "skipped",
    },
))

# Lagrangian variant on R^4; the constant sections do not close under the
# bracket of their anchor images, so this is an anchored bundle only.
_register(_spec(
    name="contact-r4",
    chart={"coordinates": ["x", "y", "z", "w"],
           "domain": [(-2.0, 2.0)] * 4},
    rank=2,
    anchor=[["1", "z", "0", "0"], ["0", "0", "1", "0"]],
    omega={"0,1": "1", "2,3": "1"},
    frames={"orthogonal": [["1", "z", "0", "0"], ["0", "0", "1", "0"]]},
    expected={
        "closed_omega": "pass", "axioms": "fail", "c3_pointwise": "fail",
        "c4_frame": "fail", "h1": "fail", "h2": "skipped", "h3": "skipped",
        "torsion_criterion": "skipped", "commirhod": "skipped",
        "zero_locus": "skipped", "weil_theorem": "skipped",
        "cartan_table": "skipped", "parallel_projection": "pass",
        "quotient": "skipped", "lemma916": "skipped", "prop917": "skipped",
    },
))

# Heisenberg fibre with zero anchor: momentum sections are the horizontal
# dual sections, and bracket compatibility forces vanishing on the derived
# ideal, which theta^I does not satisfy.
_register(_spec(
    name="heisenberg-fibre",
    chart={"coordinates": ["q", "p"], "domain": [(-2.0, 2.0), (-2.0, 2.0)]},
    rank=3,
    anchor=[["0", "0"], ["0", "0"], ["0", "0"]],
    structure={"0,1,2": "1"},
    omega={"0,1": "1"},
    momentum=["0", "0", "1"],
    frames={"orthogonal": [["1", "0"], ["0", "1"]]},
    finite_lie_algebra={"dimension": 3, "structure": {"0,1,2": "1"}},
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "pass",
        "c4_frame": "pass", "h1": "pass", "h2": "pass", "h3": "fail",
        "torsion_criterion": "fail", "commirhod": "pass",
        "zero_locus": "skipped", "weil_theorem": "fail",
        "cartan_table": "pass", "parallel_projection": "pass",
        "quotient": "pass", "lemma916": "pass", "prop917": "skipped",
    },
))

_register(_spec(
    name="heisenberg-action",
    chart={"coordinates": ["q", "p"], "domain": [(-2.0, 2.0), (-2.0, 2.0)]},
    rank=3,
    anchor=[["0", "-1"], ["1", "0"], ["0", "0"]],
    structure={"0,1,2": "1"},
    omega={"0,1": "1"},
    momentum=["q", "p", "1"],
    finite_lie_algebra={"dimension": 3, "structure": {"0,1,2": "1"}},
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "pass",
        "c4_frame": "skipped", "h1": "pass", "h2": "pass", "h3": "fail",
        "torsion_criterion": "fail", "commirhod": "pass",
        "zero_locus": "skipped", "weil_theorem": "fail",
        "cartan_table": "pass", "parallel_projection": "pass",
        "quotient": "pass", "lemma916": "pass", "prop917": "skipped",
    },
))

_register(_spec(
    name="heisenberg-action-adjusted",
    chart={"coordinates": ["q", "p"], "domain": [(-2.0, 2.0), (-2.0, 2.0)]},
    rank=3,
    anchor=[["0", "-1"], ["1", "0"], ["0", "0"]],
    structure={"0,1,2": "1"},
    omega={"0,1": "1"},
    momentum=["q", "p", "-1"],
    finite_lie_algebra={"dimension": 3, "structure": {"0,1,2": "1"}},
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "pass",
        "c4_frame": "skipped", "h1": "pass", "h2": "pass", "h3": "pass",
        "torsion_criterion": "pass", "commirhod": "pass",
        "zero_locus": "skipped", "weil_theorem": "pass",
        "cartan_table": "pass", "parallel_projection": "pass",
        "quotient": "pass", "lemma916": "pass", "prop917": "pass",
    },
))

# Tangent algebroid of the symplectic plane with the area-scaling momentum
# candidate: the momentum equation holds for the trivial connection but the
# compatibility residual is exactly -omega.
_register(_spec(
    name="darboux-r2-noncompatible",
    chart={"coordinates": ["q", "p"], "domain": [(-2.0, 2.0), (-2.0, 2.0)]},
    rank=2,
    anchor=[["1", "0"], ["0", "1"]],
    omega={"0,1": "1"},
    momentum=["p", "-q"],
    locus_points=[[0.0, 0.0]],
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "pass",
        "c4_frame": "skipped", "h1": "pass", "h2": "pass", "h3": "fail",
        "torsion_criterion": "fail", "commirhod": "pass",
        "zero_locus": "fail", "weil_theorem": "fail",
        "cartan_table": "pass", "parallel_projection": "pass",
        "quotient": "skipped", "lemma916": "pass", "prop917": "skipped",
    },
))

_register(_spec(
    name="darboux-r2-compatible",
    chart={"coordinates": ["q", "p"], "domain": [(-2.0, 2.0), (-2.0, 2.0)]},
    rank=2,
    anchor=[["1", "0"], ["0", "1"]],
    omega={"0,1": "1"},
    momentum=["p", "1"],
    synthesis={"v_ref": ["0", "1"]},
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "pass",
        "c4_frame": "skipped", "h1": "pass", "h2": "pass", "h3": "pass",
        "torsion_criterion": "pass", "commirhod": "pass",
        "zero_locus": "skipped", "weil_theorem": "pass",
        "cartan_table": "pass", "parallel_projection": "pass",
        "quotient": "skipped", "lemma916": "pass", "prop917": "pass",
    },
))

_register(_spec(
    name="darboux-r4-compatible",
    chart={"coordinates": ["q1", "q2", "p1", "p2"],
           "domain": [(-2.0, 2.0)] * 4},
    rank=4,
    anchor=[["1", "0", "0", "0"], ["0", "1", "0", "0"],
            ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
    omega={"0,2": "1", "1,3": "1"},
    momentum=["p1", "p2", "1", "0"],
    synthesis={"v_ref": ["0", "0", "1", "0"]},
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "pass",
        "c4_frame": "skipped", "h1": "pass", "h2": "pass", "h3": "pass",
        "torsion_criterion": "pass", "commirhod": "pass",
        "zero_locus": "skipped", "weil_theorem": "pass",
        "cartan_table": "pass", "parallel_projection": "pass",
        "quotient": "skipped", "lemma916": "pass", "prop917": "pass",
    },
))

# Translation action of the line on the symplectic plane; its momentum zero
# locus is the lagrangian line p = 0.
_register(_spec(
    name="translation",
    chart={"coordinates": ["q", "p"], "domain": [(-2.0, 2.0), (-2.0, 2.0)]},
    rank=1,
    anchor=[["1", "0"]],
    omega={"0,1": "1"},
    momentum=["p"],
    frames={"orthogonal": [["1", "0"]]},
    locus_points=[[-1.5, 0.0], [-0.75, 0.0], [0.0, 0.0], [0.75, 0.0], [1.5, 0.0]],
    finite_lie_algebra={"dimension": 1},
    expected={
        "closed_omega": "pass", "axioms": "pass", "c3_pointwise": "pass",
        "c4_frame": "pass", "h1": "pass", "h2": "pass", "h3": "pass",
        "torsion_criterion": "pass", "commirhod": "pass", "zero_locus": "pass",
        "weil_theorem": "pass", "cartan_table": "pass",
        "parallel_projection": "pass", "quotient": "pass",
        "lemma916": "pass", "prop917": "pass",
    },
))

# Non-closed 2-form: the closedness gate fails and everything that needs a
# presymplectic structure is skipped; identities that hold for arbitrary
# 2-forms still run.
_register(_spec(
    name="nonclosed-omega",
    chart={"coordinates": ["x", "y", "z"],
           "domain": [(-1.0, 1.0)] * 3},
    rank=1,
    anchor=[["0", "0", "0"]],
    omega={"0,1": "z"},
    momentum=["0"],
    expected={
        "closed_omega": "fail", "axioms": "pass", "c3_pointwise": "skipped",
        "c4_frame": "skipped", "h1": "skipped", "h2": "skipped",
        "h3": "skipped", "torsion_criterion": "skipped", "commirhod": "pass",
        "zero_locus": "skipped", "weil_theorem": "skipped",
        "cartan_table": "pass", "parallel_projection": "pass",
        "quotient": "skipped", "lemma916": "pass", "prop917": "skipped",
    },
))


def catalog_names() -> list[str]:
    return list(CATALOG.keys())


def catalog_model(name: str) -> ModelSpec:
    if name not in CATALOG:
        raise KeyError(f"unknown catalog model {name!r}; "
                       f"known: {', '.join(catalog_names())}")
    return CATALOG[name].model_copy(deep=True)
