import cmath
import math

import pytest

import subord


def test_dominant_routes_agree():
    for gamma in (0.5, 1.0, 2.5, 1 + 1j, 3 - 2j):
        for z in (0.3, 0.5j, -0.4 + 0.2j):
            q, err = subord.dominant_quadrature(gamma, 1.0, -0.8, z)
            assert abs(q - subord.dominant_series(gamma, 1.0, -0.8, z)) < 1e-9
            assert err < 1e-8
    q0, _ = subord.dominant_quadrature(2.0, 1.0, -1.0, 0.0)
    assert q0 == 1.0
    c = subord.dominant_coefficients(2.0, 1.0, -1.0, 3)
    assert abs(c[1] - 4 / 3) < 1e-14 and abs(c[2] - 1.0) < 1e-14


def test_closed_form_gamma_one():
    # q = A/B + (1 - A/B) log(1 + B z)/(B z)
    A, B, z = 0.5, -0.5, 0.4 - 0.3j
    expected = A / B + (1 - A / B) * cmath.log(1 + B * z) / (B * z)
    assert abs(subord.dominant_quadrature(1.0, A, B, z)[0] - expected) < 1e-11


def test_mobius_image():
    d = subord.mobius_image(0.5, 0.0, 0.5)
    assert d["kind"] == "disk"
    assert d["center"] == [1.0, 0.0] and abs(d["radius"] - 0.25) < 1e-15
    h = subord.mobius_image(1.0, -1.0, 1.0)
    assert h["kind"] == "halfplane" and h["threshold"] == 0.0 and h["sense"] == ">"


def test_phi_and_j_for_z_over_one_minus_z():
    f = subord.AnalyticFunction(1, 1, [1.0] * 400)
    ev = subord.NbEvaluator(f, 1.0)
    z = 0.3 + 0.2j
    assert abs(ev.phi(z) - (1 - z)) < 1e-12
    assert abs(ev.j(z, 2.0) - (1 - 3 * z)) < 1e-12


def test_identity_and_membership():
    f = subord.AnalyticFunction(2, 1, [0.2 + 0.1j, -0.05])
    assert subord.identity_residual(f, 1.0 + 0.5j, 0.5, 0.5) < 1e-7
    lin = subord.AnalyticFunction(1, 1, [(-0.2) ** k for k in range(1, 60)])
    assert subord.membership(lin, 1.0, (1.0, 0.0))["status"] == "certified"
    assert subord.membership(lin, 1.0, (0.2, 0.0))["status"] == "refuted"
    assert subord.membership(lin, 0.0, 0.5)["status"] == "certified"


def test_extrema():
    e = subord.extrema_of_re(1.0, 1.0, 0.0)
    assert abs(e["inf_re"] - 0.5) < 1e-3 and abs(e["sup_re"] - 1.5) < 1e-3


def test_lemma1_identity_case():
    assert abs(subord.lemma1_transform(lambda t: 1.0, 2 + 1j, 3, 0.5j) - 1.0) < 1e-12


def test_errors():
    with pytest.raises(subord.DomainError):
        subord.dominant_quadrature(-1.0, 1.0, -1.0, 0.1)
    with pytest.raises(subord.SubordError):
        subord.AnalyticFunction(0, 1, [])
    with pytest.raises(subord.DomainError):
        subord.generate_corpus({"bogus": 1})


def test_corpus_and_restricted_run():
    corpus = subord.generate_corpus()
    assert corpus["generated"] == 26
    assert corpus["generated"] == corpus["checked"] + corpus["excluded"]
    cfg = {
        "corpus": {"sparse": 2, "inverse": 2, "stress": 0},
        "grid": {"radii": [0.3, 0.6, 0.9], "angles": 36},
        "lattice": {"mu": [0.0, 1.0], "exponents": [[1.0, 0.0]]},
        "theorems": ["identity", "def1"],
        "workers": 1,
    }
    report, code = subord.run_all(cfg)
    assert code == 0
    assert report["unexpected_refutations"] == []
    assert math.isfinite(report["metrics"]["identity_max_residual"])
