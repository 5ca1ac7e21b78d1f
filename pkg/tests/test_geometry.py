import math

import numpy as np
import pytest

from extrinsic_dirac.errors import DegeneratePointError, GeometryError
from extrinsic_dirac.geometry import (
    CATALOG_NAMES,
    build_grid,
    catalog,
    extrinsic_radius,
    fundamental_forms,
    integrate,
    volume,
    willmore,
)

from oracles import ELLIPSE_L, ELLIPSOID, H3_R1_COTH, torus_outer_H, torus_willmore


def test_unit_sphere_mean_curvature_points_inward():
    imm = catalog("sphere")
    for u in ([0.3, 0.1], [1.2, 4.0], [2.9, 2.0]):
        s = fundamental_forms(imm, np.array(u))
        inward = -s.point[0]
        assert float(np.dot(s.H[0], inward)) == pytest.approx(1.0, abs=1e-10)


def test_circle_radius_two_curvature():
    s = fundamental_forms(catalog("circle", r=2.0), np.array([0.7]))
    assert s.H_norm[0] == pytest.approx(0.5, abs=1e-12)


def test_torus_outer_equator_mean_curvature():
    s = fundamental_forms(catalog("torus-of-revolution", R=2.0, r=1.0), np.array([0.0, 0.0]))
    assert s.H_norm[0] == pytest.approx(torus_outer_H(2.0, 1.0), abs=1e-10)
    assert s.H_norm[0] == pytest.approx(2 / 3, abs=1e-10)


def test_sphere_volume_and_willmore():
    imm = catalog("sphere")
    g = build_grid(imm, (64, 128))
    assert volume(imm, g) == pytest.approx(4 * math.pi, abs=1e-8)
    assert willmore(imm, g) == pytest.approx(4 * math.pi, abs=1e-8)


def test_torus_willmore_at_optimal_aspect():
    imm = catalog("torus-of-revolution", R=math.sqrt(2), r=1.0)
    assert willmore(imm, build_grid(imm)) == pytest.approx(2 * math.pi**2, abs=1e-8)


@pytest.mark.parametrize("R,r", [(2.0, 1.0), (3.0, 0.5), (1.2, 1.0)])
def test_torus_willmore_matches_closed_form(R, r):
    imm = catalog("torus-of-revolution", R=R, r=r)
    assert willmore(imm, build_grid(imm)) == pytest.approx(torus_willmore(R, r), rel=1e-9)


@pytest.mark.parametrize("a", sorted(ELLIPSOID))
def test_ellipsoid_area_and_willmore_against_quadrature(a):
    imm = catalog("ellipsoid-of-revolution", a=a, c=1.0)
    g = build_grid(imm)
    assert volume(imm, g) == pytest.approx(ELLIPSOID[a]["area"], rel=1e-9)
    assert willmore(imm, g) == pytest.approx(ELLIPSOID[a]["willmore"], rel=1e-9)


def test_ellipse_perimeter():
    imm = catalog("ellipse", a=2.0, b=1.0)
    assert volume(imm, build_grid(imm)) == pytest.approx(ELLIPSE_L, rel=1e-10)


def test_integrate_constant_matches_volume():
    imm = catalog("ellipsoid-of-revolution", a=1.2, c=1.0)
    g = build_grid(imm)
    assert integrate(imm, g, np.full(g.size, 2.0)) == pytest.approx(2 * volume(imm, g))


def test_scaling_covariance_of_volume_and_willmore():
    imm = catalog("ellipsoid-of-revolution", a=1.5, c=1.0)
    big = imm.scaled(3.0)
    g, gb = build_grid(imm), build_grid(big)
    assert volume(big, gb) == pytest.approx(9 * volume(imm, g), rel=1e-12)
    assert willmore(big, gb) == pytest.approx(willmore(imm, g), rel=1e-12)


def test_sphere_and_circle_extrinsic_radius():
    assert extrinsic_radius(catalog("sphere")) == pytest.approx(1.0, abs=1e-6)
    assert extrinsic_radius(catalog("circle", r=1.7)) == pytest.approx(1.7, abs=1e-6)


def test_hyperbolic_geodesic_sphere_radius():
    assert extrinsic_radius(catalog("geodesic-sphere-hyperbolic", r=0.7)) == pytest.approx(0.7, abs=1e-4)


def test_small_sphere_in_sphere_radius():
    assert extrinsic_radius(catalog("small-sphere-in-sphere", a=math.pi / 3)) == pytest.approx(math.pi / 3, abs=1e-4)


def test_catalog_circle_length_and_curvature():
    imm = catalog("circle", r=1.0)
    g = build_grid(imm)
    assert volume(imm, g) == pytest.approx(2 * math.pi, abs=1e-12)
    assert np.allclose(g.sample.H_norm, 1.0, atol=1e-12)


def test_equatorial_sphere_is_totally_geodesic():
    imm = catalog("equatorial-sphere", n=2)
    g = build_grid(imm)
    assert np.max(g.sample.H_norm) < 1e-10
    assert volume(imm, g) == pytest.approx(4 * math.pi, abs=1e-8)


def test_hyperbolic_geodesic_sphere_mean_curvature():
    imm = catalog("geodesic-sphere-hyperbolic", r=1.0)
    g = build_grid(imm)
    assert np.allclose(g.sample.H_norm, H3_R1_COTH, atol=1e-9)


def test_unknown_entry_and_bad_parameters():
    with pytest.raises(GeometryError):
        catalog("klein-bottle")
    with pytest.raises(GeometryError):
        catalog("circle", radius=1)
    with pytest.raises(GeometryError):
        catalog("torus-of-revolution", R=1.0, r=2.0)


def test_degenerate_point_is_reported():
    imm = catalog("sphere")
    with pytest.raises(DegeneratePointError):
        fundamental_forms(imm, np.array([0.0, 0.3]))


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_every_catalog_entry_has_finite_geometry(name):
    imm = catalog(name)
    g = build_grid(imm)
    assert volume(imm, g) > 0
    assert np.isfinite(willmore(imm, g))
