import math

import pytest

import sblfem


def test_catalog_names():
    assert set(sblfem.catalog_1d_names()) == {"POLY", "LAYERED", "VARCOEF"}


def test_run_case_1d_poly_is_exact():
    row = sblfem.run_case_1d("POLY", 0.5, 4)
    assert row.energy < 1e-10
    assert row.dofs > 0
    assert row.as_dict()["problem"] == "POLY"


def test_solve_1d_samples_clamped_solution():
    x = [0.0, 0.25, 0.5, 1.0]
    u = sblfem.solve_1d("POLY", 0.5, 4, x=x)
    assert u[0] == pytest.approx(0.0, abs=1e-14)
    assert u[2] == pytest.approx(0.0625, rel=1e-10)


def test_run_case_2d_bessel():
    row = sblfem.run_case_2d("BESSEL", eps=1e-2, p=3)
    assert row.error == ""
    assert 0.0 < row.energy < 0.1


def test_study_fit_and_csv():
    out = sblfem.run_study(1, "LAYERED", [1e-2, 1e-6], 3, 8)
    assert len(out["rows"]) == 12
    assert out["csv"].startswith("problem,eps,p,kappa,")
    assert out["fit"]["envelope"]["balanced"]["beta"] > 0.0


def test_meshes():
    m1 = sblfem.dump_mesh_1d(1.0, 4, 1e-3)
    assert m1["nodes"][1] == pytest.approx(4e-3)
    m2 = sblfem.dump_mesh_2d(1.0, 4, 1e-3)
    assert m2["needles"] is True
    assert len(m2["elements"]) == 28


def test_quadrature_and_bessel():
    x, w = sblfem.gauss_rule(5)
    assert sum(w) == pytest.approx(2.0)
    assert sblfem.scaled_bessel_i(0, 0.0) == pytest.approx(1.0)
    assert sblfem.bessel_exact_u(1e-2, 1.0, 1.0, 1.0, 1.0) == pytest.approx(0.0, abs=1e-14)


def test_fit_exponential():
    p = list(range(3, 10))
    err = [2.0 * math.exp(-0.5 * k) for k in p]
    f = sblfem.fit_exponential(p, err)
    assert f["beta"] == pytest.approx(0.5)


def test_verify_suite():
    (res,) = sblfem.verify("QUADRATURE")
    assert res["passed"] is True


def test_invalid_input_raises():
    with pytest.raises(ValueError):
        sblfem.run_case_1d("NOPE", 0.1, 4)
