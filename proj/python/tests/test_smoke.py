import math

import pytest

import radsym


def power(k0, m, c0, n, nu):
    return radsym.Model.power(k0, m, c0, n, nu)


def test_classify_power_law():
    info = radsym.classify(power(1, 1, 1, 3, 1))
    assert info["ratio"] == "NonConstant"
    assert [g["label"] for g in info["generators"]] == ["Y1", "Y2", "Y3"]
    assert (info["A"], info["B"]) == ("1", "0")


def test_classify_constant_ratio_spherical():
    info = radsym.classify(radsym.Model.exponential(1, 2, 5, 2, 2))
    assert info["ratio"] == "ConstantRatio"
    assert info["beta"] == pytest.approx(5.0)
    assert len(info["generators"]) == 6


def test_exact_parameters_from_strings():
    model = power("1", "1", "1", "3", "3/2")
    assert model.nu == 1.5
    assert model.K(2.0) == pytest.approx(2.0)
    assert model.J_inverse(model.J(1.7)) == pytest.approx(1.7)


def test_spec_text():
    model = radsym.Model.from_spec("family = exp\nk0 = 1\nlam = 1\nc0 = 2\nmu = 1\nnu = 2\n")
    assert model.constant_ratio
    assert model.beta == pytest.approx(2.0)
    with pytest.raises(radsym.ModelError):
        radsym.Model.from_spec("family = power\nnu = 1\n")


def test_determining_equations_reject_translation():
    checks = radsym.check_determining(power(1, 1, 1, 3, 1))
    assert checks.pop("dz") is False
    assert all(checks.values())


def test_commutators_report_the_spherical_entry():
    table = radsym.commutators(power(1, 0, 1, 0, 2))
    assert table["brackets"][("Yh2", "Yh4")] == "1/2*Yh4"
    assert not table["matches_printed"]
    assert [m[:2] for m in table["mismatches"]] == [("Yh2", "Yh4")]
    assert radsym.commutators(power(1, 0, 1, 0, 1.5))["matches_printed"]


def test_flows():
    assert radsym.flow_closed("G2", (1, 1, 1), 0.5) == pytest.approx((1, 1.5, 1))
    closed = radsym.flow_closed("L1", (1.2, 0.8, 1.5), 0.3)
    numeric = radsym.flow_numeric("L1", (1.2, 0.8, 1.5), 0.3)
    assert closed == pytest.approx(numeric, rel=1e-8)
    with pytest.raises(radsym.ValidityError, match="valid lambda window"):
        radsym.flow_closed("L1", (1, 1, 1), 1.5)
    printed = radsym.flow_closed("G4", (2, 1, 1), 0.1, variant="printed")
    assert printed[0] != pytest.approx(radsym.flow_numeric("G4", (2, 1, 1), 0.1)[0], rel=1e-3)


def test_solution_and_residual():
    model = power(1, 1, 1, 1, 2)
    s = radsym.build_solution("eq137", model, {"C0": 1.0})
    assert s.form == "v-form"
    assert model.J(s(1.0, 1.0)) == pytest.approx(math.exp(-0.25))
    report = radsym.residual(s, model)
    assert report["pass"] and report["method"] == "symbolic"
    bad = radsym.residual(radsym.perturbed(s), model)
    assert not bad["pass"]
    with pytest.raises(radsym.CatalogError):
        radsym.build_solution("eq999", model)


def test_catalog_lists_ids():
    ids = [entry[0] for entry in radsym.catalog()]
    assert "eq137" in ids and "eq177" in ids


def test_convergence_study():
    model = power(1, 1, 1, 1, 2)
    ref = radsym.build_solution("eq137", model)
    study = radsym.convergence_study(model, ref, (0.5, 2.5, 1.0, 1.25), [(16, 16), (32, 64)])
    assert study["monotone"]
    assert 1.7 < study["observed_order"] < 2.3
