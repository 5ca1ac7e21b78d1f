import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from extrinsic_dirac import bounds as B
from extrinsic_dirac.errors import ConfigError, GeometryError
from extrinsic_dirac.geometry import catalog, euclidean, hyperbolic, sphere_space
from extrinsic_dirac.spectra import ANTIPERIODIC, Spectrum, dirac_spectrum, model_dirac_spectrum, model_laplace_spectrum

from oracles import ELLIPSE_C, ELLIPSOID, H3_R1_C


def summary(name, **params):
    return B.summary_from_geometry(catalog(name, **params))


@pytest.fixture(scope="module")
def s2():
    return summary("sphere")


@pytest.fixture(scope="module")
def circle():
    return summary("circle")


def test_counts():
    assert B.nu_mu(euclidean(3), 2, 1, 0.0) == (2, 2)
    assert B.nu_mu(euclidean(2), 1, 1, 0.0) == (2, 1)
    assert B.nu_mu(hyperbolic(3), 2, 1, 0.5j) == (2, 2)
    assert B.nu_mu(sphere_space(3), 2, 1, 0.5) == (2, 2)


def test_summary_invariant_rejects_inconsistent_input():
    with pytest.raises(GeometryError):
        B.SurfaceSummary(n=2, m=1, vol=1.0, willmore=5.0, H_inf=1.0)
    with pytest.raises(ConfigError):
        B.SurfaceSummary(n=2, m=1, vol=1.0, willmore=0.5, H_inf=1.0, ambient="torus")


def test_real_bound_sphere_and_circle(s2, circle):
    assert B.bound_real(2, 0.0, s2).bound == pytest.approx(1.0, abs=1e-10)
    assert B.bound_real(1, 0.0, circle).bound == pytest.approx(0.25, abs=1e-12)


def test_real_bound_equatorial_sphere():
    spec = B.bound_real(2, 0.5, summary("equatorial-sphere"))
    assert spec.bound == pytest.approx(1.0, abs=1e-10)
    assert spec.theorem == "real-killing"


@pytest.mark.parametrize("a", sorted(ELLIPSOID))
def test_real_bound_ellipsoid_against_quadrature(a):
    assert B.bound_real(2, 0.0, summary("ellipsoid-of-revolution", a=a, c=1.0)).bound == pytest.approx(
        ELLIPSOID[a]["C"], rel=1e-9)


def test_imaginary_bound_geodesic_sphere():
    s = summary("geodesic-sphere-hyperbolic", r=1.0)
    spec = B.bound_imag(2, 0.5j, s)
    assert spec.bound == pytest.approx(H3_R1_C, abs=1e-9)
    assert spec.mode == B.LAMBDA_ABS


def test_imaginary_bound_without_mean_curvature():
    s = B.SurfaceSummary(n=2, m=1, vol=1.0, willmore=0.0, H_inf=0.0, ambient="hyperbolic")
    assert B.bound_imag(2, 0.5j, s).bound == pytest.approx(1.0)


def test_radius_variant_limits_and_comparisons():
    s = B.SurfaceSummary(n=2, m=1, vol=2.0, willmore=2.0 * 1.7**2, H_inf=1.7, ambient="hyperbolic", rad=0.0)
    assert B.bound_imag_radius(2, 0.5j, s).bound == pytest.approx(B.bound_imag(2, 0.5j, s).bound)
    half = summary("geodesic-sphere-hyperbolic", r=0.5)
    both = (B.bound_imag(2, 0.5j, half).bound, B.bound_imag_radius(2, 0.5j, half).bound)
    assert all(math.isfinite(x) for x in both)
    two = summary("geodesic-sphere-hyperbolic", r=2.0)
    assert B.bound_imag_radius(2, 0.5j, two).bound > B.bound_imag(2, 0.5j, two).bound


def test_wrong_alpha_type_is_rejected(s2):
    with pytest.raises(ConfigError):
        B.bound_real(2, 0.5j, s2)


def test_check_sphere_equality(s2):
    spec = B.bound_real(2, 0.0, s2)
    rep = B.check_spectrum(model_dirac_spectrum("round-sphere", 2.0, n=2, rho=1.0), spec)
    assert rep.verdict == "pass-with-equality"
    assert len(rep.eigenvalues) == 2


def test_check_ellipse_strict():
    imm = catalog("ellipse", a=2.0, b=1.0)
    spec = B.bound_real(1, 0.0, B.summary_from_geometry(imm))
    assert spec.bound == pytest.approx(ELLIPSE_C, rel=1e-10)
    assert B.check_spectrum(dirac_spectrum(imm, 2.0), spec).verdict == "pass"


def test_check_synthetic_violation(circle):
    spec = B.bound_real(1, 0.0, circle)
    assert B.check_spectrum(Spectrum.from_values([0.8, -0.8], "dirac", 1.0, "synthetic"), spec).verdict == "fail"


def test_check_window_too_small_is_inapplicable(s2):
    spec = B.bound_real(2, 0.0, s2)
    rep = B.check_spectrum(Spectrum.from_values([], "dirac", 0.5, "synthetic"), spec)
    assert rep.verdict == "inapplicable"


def test_check_report_json_schema(s2):
    rep = B.check_spectrum(model_dirac_spectrum("round-sphere", 2.0, n=2, rho=1.0), B.bound_real(2, 0.0, s2))
    d = rep.to_dict()
    for key in ("theorem", "ambient", "n", "m", "alpha", "mu", "nu", "bound", "mode", "eigenvalues", "margins",
                "verdict", "tolerance", "spectrum_window"):
        assert key in d
    assert rep.to_csv().count("\n") == 1 + len(list(rep.csv_rows()))


def four_by_four():
    e = np.eye(4)
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    H1 = np.column_stack([e[1] + e[2], e[0] + e[3]])
    H2 = np.column_stack([e[1] - e[2], -e[0] + e[3]])
    return A, H1, H2


def test_pairing_example_equalities_and_extra_pair():
    A, H1, H2 = four_by_four()
    rep = B.pairing_verify(A, H1, H2, 2.5, extra_pairs=[(2, 4)])
    assert rep["hypotheses_hold"]
    assert [p["average"] for p in rep["pairs"]] == pytest.approx([2.5, 2.5])
    assert all(p["equality"] for p in rep["pairs"])
    assert rep["extra"][0]["average"] == pytest.approx(3.0)
    assert not rep["extra"][0]["holds"]


def test_pairing_hypothesis_failure_is_reported_not_raised():
    A, H1, _ = four_by_four()
    rep = B.pairing_verify(A, H1, H1, 2.5)
    assert not rep["hypotheses_hold"]
    assert rep["hypothesis_failures"]


def test_pairing_randomized_suite():
    rng = np.random.default_rng(2024)
    violations = 0
    for _ in range(200):
        dim = int(rng.integers(4, 12))
        nu = int(rng.integers(1, dim // 2 + 1))
        rep = B.pairing_verify(*B.random_pairing_instance(rng, dim, nu))
        assert rep["hypotheses_hold"]
        violations += rep["conclusion_violations"]
    assert violations == 0


@given(st.integers(0, 2**31), st.integers(2, 5))
def test_pairing_property(seed, nu):
    rng = np.random.default_rng(seed)
    rep = B.pairing_verify(*B.random_pairing_instance(rng, 2 * nu + 2, nu))
    assert rep["conclusion_violations"] == 0


def test_hypersurface_pairing_sphere():
    spec = model_dirac_spectrum("round-sphere", 2.0, n=2, rho=1.0)
    rep = B.pairing_bound_hypersurface(spec, 1.0, 2)
    assert rep["verdict"] == "pass"
    assert [p["average"] for p in rep["pairs"]] == pytest.approx([1.0, 1.0])


def test_hypersurface_pairing_flat_subtorus():
    imm = catalog("flat-subtorus")
    spec = dirac_spectrum(imm, 8.0)
    rep = B.pairing_bound_hypersurface(spec, 0.0, 2, bounding=imm.bounding)
    assert rep["kernel_multiplicity"] == 2
    assert rep["verdict"] == "hypothesis-violated demonstration"


def circle_higher(k):
    s = B.SurfaceSummary(n=1, m=1, vol=2 * math.pi, willmore=2 * math.pi, H_inf=1.0)
    lap = model_laplace_spectrum("circle", 40.0, L=2 * math.pi)
    dirac = model_dirac_spectrum("circle", 10.0, L=2 * math.pi, label=ANTIPERIODIC)
    return B.higher_bound(1, 0.0, s, lap, k, dirac=dirac, mu=1)


def test_higher_bound_circle_rows():
    r0, r1, r2 = circle_higher(0), circle_higher(1), circle_higher(2)
    assert (r0["C_k"], r0["lambda_sq"], r0["holds"], r0["status"]) == (0.25, 0.25, True, "asserted")
    assert (r1["C_k"], r1["lambda_sq"], r1["holds"]) == (1.25, 0.25, True)
    assert (r2["C_k"], r2["lambda_sq"], r2["holds"], r2["status"]) == (1.25, 2.25, False, "reported-only")


def test_comparison_on_unit_sphere(s2):
    rows = {r["name"]: r for r in B.comparison_bounds(s2)}
    assert rows["extrinsic (ours)"]["value"] == pytest.approx(1.0, abs=1e-10)
    assert rows["Baum"]["value"] == pytest.approx(1.0, abs=1e-10)
    assert rows["Bunke"]["value"] == pytest.approx(4.0, abs=1e-10)


def test_anghel_gaps_on_circle(circle):
    spec = model_dirac_spectrum("circle", 12.0, L=2 * math.pi, label=ANTIPERIODIC)
    rows = {r["name"]: r for r in B.comparison_bounds(circle, spec)}
    gaps = rows["Anghel (gaps)"]["gaps"]
    assert [g["m"] for g in gaps] == list(range(1, 11))
    assert all(g["holds"] for g in gaps)


def test_comparison_unavailable_outside_euclidean():
    rows = {r["name"]: r for r in B.comparison_bounds(summary("equatorial-sphere"))}
    assert not rows["Baum"]["available"] and not rows["Bunke"]["available"]


def test_lower_bounds(s2, circle):
    low = B.lower_bounds(s2, upper=1.0)
    assert low["Friedrich"]["value"] == pytest.approx(1.0, abs=1e-8)
    assert low["genus-0 area"]["value"] == pytest.approx(1.0, abs=1e-10)
    assert low["sandwich"]["consistent"]
    assert not B.lower_bounds(circle)["Friedrich"]["applicable"]


def test_willmore_rows(s2):
    row = B.willmore_inequalities(s2)[0]
    assert row["lhs"] == pytest.approx(4 * math.pi, abs=1e-8)
    assert abs(row["margin"]) < 1e-8
    ell = B.willmore_inequalities(summary("ellipsoid-of-revolution", a=2.0, c=1.0))[0]
    assert ell["margin"] > 1.0


@pytest.mark.parametrize("r", [0.01, 0.05, 0.5, 2.0])
def test_geodesic_sphere_ratio_closed_form(r):
    from oracles import H3_RATIO

    ratio = (1 / math.sinh(r)) / (1 + 1 / math.tanh(r))
    assert ratio == pytest.approx(math.exp(-r), rel=1e-13)
    if r in H3_RATIO:
        assert ratio == pytest.approx(H3_RATIO[r], rel=1e-13)
