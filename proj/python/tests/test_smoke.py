import math

import pytest

import ldpkit


def test_gaussian_rate_both_routes():
    model = ldpkit.parse_model("gaussian:mu=0,sigma=1")
    kernel = ldpkit.Kernel("affine:0,1")
    conj = ldpkit.i_f_conjugate(model, kernel, [1.0])
    expl = ldpkit.i_f_explicit(model, kernel, [1.0])
    assert conj["value"] == pytest.approx(1.5, rel=1e-10)
    assert expl["value"] == pytest.approx(1.5, rel=1e-10)
    assert conj["branch"] == "interior"
    assert conj["lambda_star"][0] == pytest.approx(3.0, rel=1e-8)


def test_singular_branch_and_infinity():
    sb = ldpkit.parse_model("synthetic-boundary")
    r = ldpkit.i_f_explicit(sb, ldpkit.Kernel("affine:0,1"), [1.0])
    assert r["value"] == pytest.approx(0.9, abs=1e-8)
    assert r["branch"] == "singular_plus"
    cexp = ldpkit.parse_model("cexp")
    assert math.isinf(ldpkit.i_f_conjugate(cexp, ldpkit.Kernel("const:1"), [-1.5])["value"])


def test_minimizer_and_path_functionals():
    model = ldpkit.parse_model("gaussian:mu=0,sigma=1")
    kernel = ldpkit.Kernel("affine:0,1")
    h = ldpkit.minimizer(model, kernel, [1.0], cells=512)
    assert ldpkit.pair(kernel, h)[0] == pytest.approx(1.0, abs=1e-10)
    assert ldpkit.i_d(h, model) == pytest.approx(1.5, abs=1e-5)
    assert ldpkit.Path.parse(h.to_json()) == h


def test_metrics():
    zero = ldpkit.Path.scalar([0.0, 1.0], [0.0])
    ind = ldpkit.Path.scalar([0.0, 1.0], [0.0], [(0.5, 1.0)])
    assert ldpkit.rho_star(zero, ind) == pytest.approx(1.5)
    assert ldpkit.rho_2(zero, ind) == pytest.approx(1.0, abs=1e-9)
    assert ldpkit.var(ind) == 1.0


def test_monte_carlo_against_exact_tail():
    model = ldpkit.parse_model("rademacher")
    kernel = ldpkit.Kernel("const:1")
    est = ldpkit.estimate_tail(model, kernel, 100, 0.5, samples=20000, seed=3)
    exact = ldpkit.exact_tail(model, kernel, 100, 0.5)
    assert abs(est["log_prob"] - exact) <= 3 * est["std_error"]


def test_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        ldpkit.parse_model("nosuch")
    with pytest.raises(ValueError):
        ldpkit.Kernel("const:0")
