"""Grids, regions, exact perimeters, and the interface-length estimator."""

import math

import numpy as np
import pytest

import perimeter_phase as pp
from perimeter_phase.errors import DomainError, UnsupportedRegionError
from perimeter_phase.geometry import region_cell_fraction


def test_interval_domain_layout():
    dom = pp.Domain.interval(-1.0, 1.0, 8)
    assert dom.dim == 1
    assert dom.h == pytest.approx(0.25)
    assert dom.node_shape == (9,)
    assert dom.nodes_x[0] == -1.0 and dom.nodes_x[-1] == 1.0
    assert np.sum(dom.cell_weights) == pytest.approx(2.0, rel=1e-14)
    assert np.sum(dom.node_weights) == pytest.approx(2.0, rel=1e-14)
    assert dom.boundary_mask[0] and dom.boundary_mask[-1]
    assert not np.any(dom.boundary_mask[1:-1])


def test_box_domain_layout():
    dom = pp.Domain.box(-1.0, 1.0, 16)
    assert dom.dim == 2
    assert dom.node_shape == (17, 17)
    assert np.sum(dom.cell_weights) == pytest.approx(4.0, rel=1e-14)
    assert dom.boundary_mask[0, :].all() and dom.boundary_mask[:, -1].all()
    assert not dom.boundary_mask[1:-1, 1:-1].any()
    # meshgrid uses ij indexing: first axis is x
    assert dom.nodes_x[0, 0] == -1.0 and dom.nodes_x[-1, 0] == 1.0
    assert dom.nodes_y[0, 0] == -1.0 and dom.nodes_y[0, -1] == 1.0


def test_ball_domain_layout():
    dom = pp.Domain.ball(1.0, 64)
    assert dom.kind == "ball"
    assert dom.lo == -1.0 and dom.hi == 1.0
    # cell weights approximate the disc area to first order
    assert np.sum(dom.cell_weights) == pytest.approx(math.pi, abs=5e-4)
    # boundary nodes are those outside or on the sphere
    r = np.hypot(dom.nodes_x, dom.nodes_y)
    assert np.array_equal(dom.boundary_mask, r >= 1.0 - 1e-15)


def test_domain_rejects_bad_input():
    with pytest.raises(DomainError):
        pp.Domain.interval(1.0, -1.0, 8)
    with pytest.raises(DomainError):
        pp.Domain.interval(-1.0, 1.0, 0)
    with pytest.raises(DomainError):
        pp.Domain.ball(-2.0, 8)


def test_domain_dict_roundtrip():
    for dom in (
        pp.Domain.interval(-2.0, 3.0, 32),
        pp.Domain.box(0.0, 1.0, 8),
        pp.Domain.ball(1.5, 16, center=(0.5, -0.25)),
    ):
        clone = pp.Domain.from_dict(dom.to_dict())
        assert clone.kind == dom.kind
        assert clone.n == dom.n
        assert clone.h == dom.h
        assert np.array_equal(clone.nodes_x, dom.nodes_x)


def test_domain_signed_distance():
    dom = pp.Domain.interval(-1.0, 1.0, 8)
    assert dom.signed_distance(0.0) == pytest.approx(1.0)
    assert dom.signed_distance(0.75) == pytest.approx(0.25)
    box = pp.Domain.box(-1.0, 1.0, 8)
    assert box.signed_distance(0.0, 0.0) == pytest.approx(1.0)
    assert box.signed_distance(0.9, -0.2) == pytest.approx(0.1)
    ball = pp.Domain.ball(1.0, 8)
    assert ball.signed_distance(0.0, 0.0) == pytest.approx(1.0)
    assert ball.signed_distance(0.6, 0.8) == pytest.approx(0.0, abs=1e-15)


def sample_points(rng, count):
    return rng.uniform(-2.0, 2.0, size=(count, 2))


@pytest.mark.parametrize(
    "region",
    [
        pp.Disc((0.2, -0.1), 0.7),
        pp.HalfPlane((0.6, 0.8), 0.1),
        pp.Complement(pp.Disc((0.0, 0.0), 0.5)),
        pp.Union((pp.Disc((-0.4, 0.0), 0.3), pp.Disc((0.4, 0.0), 0.3))),
        pp.Intersection((pp.Disc((0.0, 0.0), 0.8), pp.HalfPlane((1.0, 0.0), 0.0))),
    ],
)
def test_region_signed_distance_is_1_lipschitz(region):
    rng = np.random.default_rng(17)
    p = sample_points(rng, 300)
    q = sample_points(rng, 300)
    sp = region.signed_distance(p[:, 0], p[:, 1])
    sq = region.signed_distance(q[:, 0], q[:, 1])
    dist = np.hypot(p[:, 0] - q[:, 0], p[:, 1] - q[:, 1])
    assert np.all(np.abs(sp - sq) <= dist + 1e-12)


def test_interval_union_signed_distance():
    reg = pp.IntervalUnion(((-0.5, 0.0), (0.25, np.inf)))
    assert reg.signed_distance(-0.25) == pytest.approx(0.25)
    assert reg.signed_distance(0.125) == pytest.approx(-0.125)
    # distance to the finite endpoint, even on the unbounded side
    assert reg.signed_distance(100.0) == pytest.approx(99.75)
    assert reg.signed_distance(-100.0) == pytest.approx(-99.5)
    with pytest.raises(DomainError):
        pp.IntervalUnion(((0.0, 1.0), (0.5, 2.0)))  # overlapping
    with pytest.raises(DomainError):
        pp.IntervalUnion(((1.0, 0.0),))  # reversed


def test_half_plane_normalizes():
    hp = pp.HalfPlane((3.0, 4.0), 1.0)
    assert math.hypot(*hp.normal) == pytest.approx(1.0, rel=1e-15)
    # signed distance is a true distance after normalization
    assert hp.signed_distance(1.0, 1.0) == pytest.approx(
        (3.0 * 1.0 + 4.0 * 1.0) / 5.0 - 1.0 / 5.0
    )


def test_boolean_regions():
    disc = pp.Disc((0.0, 0.0), 0.5)
    comp = pp.Complement(disc)
    assert comp.signed_distance(0.0, 0.0) == pytest.approx(-0.5)
    full = pp.FullSpace()
    empty = pp.EmptySpace()
    assert full.signed_distance(3.0, 4.0) == math.inf
    assert empty.signed_distance(3.0, 4.0) == -math.inf
    union = pp.Union((disc, pp.Disc((2.0, 0.0), 0.5)))
    assert union.signed_distance(2.0, 0.0) == pytest.approx(0.5)
    inter = pp.Intersection((disc, pp.HalfPlane((1.0, 0.0), 0.0)))
    assert inter.signed_distance(-0.25, 0.0) == pytest.approx(-0.25)


def test_region_dict_roundtrip():
    regions = [
        pp.IntervalUnion(((-0.5, 0.5),)),
        pp.IntervalUnion(((0.0, np.inf),)),
        pp.Disc((0.25, -0.5), 0.75),
        pp.HalfPlane((0.0, 1.0), -0.2),
        pp.Complement(pp.Disc((0.0, 0.0), 0.3)),
        pp.Union((pp.Disc((0.0, 0.0), 0.3), pp.HalfPlane((1.0, 0.0), 0.5))),
        pp.Intersection((pp.Disc((0.0, 0.0), 0.9), pp.Disc((0.2, 0.0), 0.9))),
        pp.FullSpace(),
        pp.EmptySpace(),
    ]
    rng = np.random.default_rng(23)
    pts = rng.uniform(-1.5, 1.5, size=(100, 2))
    for region in regions:
        clone = pp.region_from_dict(region.to_dict())
        if isinstance(region, pp.IntervalUnion):
            a = region.signed_distance(pts[:, 0])
            b = clone.signed_distance(pts[:, 0])
        else:
            a = region.signed_distance(pts[:, 0], pts[:, 1])
            b = clone.signed_distance(pts[:, 0], pts[:, 1])
        assert np.array_equal(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def test_rasterize_counts():
    dom = pp.Domain.box(-1.0, 1.0, 64)
    mask = pp.rasterize(pp.Disc((0.0, 0.0), 0.5), dom)
    frac = np.sum(mask) / mask.size
    assert frac == pytest.approx(math.pi * 0.25 / 4.0, rel=0.05)


def test_exact_perimeter_1d():
    dom = pp.Domain.interval(-1.0, 1.0, 64)
    assert pp.exact_perimeter(pp.IntervalUnion(((-0.5, 0.5),)), dom) == 2.0
    # endpoint on or outside the boundary does not count
    assert pp.exact_perimeter(pp.IntervalUnion(((-1.0, 0.5),)), dom) == 1.0
    assert pp.exact_perimeter(pp.IntervalUnion(((0.0, np.inf),)), dom) == 1.0
    assert pp.exact_perimeter(pp.IntervalUnion(((-np.inf, np.inf),)), dom) == 0.0
    assert (
        pp.exact_perimeter(pp.IntervalUnion(((-0.75, -0.25), (0.25, 0.75))), dom)
        == 4.0
    )


def circle_arc_oracle(center, r, inside, samples=2_000_000):
    """Arc length of the circle portion where inside(x, y) holds."""
    theta = (np.arange(samples) + 0.5) * (2.0 * math.pi / samples)
    x = center[0] + r * np.cos(theta)
    y = center[1] + r * np.sin(theta)
    return 2.0 * math.pi * r * np.mean(inside(x, y))


def test_disc_perimeter_in_ball_oracle():
    dom = pp.Domain.ball(1.0, 16)

    def inside(x, y):
        return np.hypot(x, y) < 1.0

    # concentric
    assert pp.exact_perimeter(pp.Disc((0.0, 0.0), 0.5), dom) == pytest.approx(
        math.pi, rel=1e-14
    )
    # off-center, boundary crossing the domain sphere
    for center, r in (((0.6, 0.0), 0.5), ((0.3, 0.4), 0.6), ((0.9, 0.0), 0.35)):
        exact = pp.exact_perimeter(pp.Disc(center, r), dom)
        oracle = circle_arc_oracle(center, r, inside)
        assert exact == pytest.approx(oracle, abs=3e-5)
    # fully inside and fully outside
    assert pp.exact_perimeter(pp.Disc((0.0, 0.0), 0.2), dom) == pytest.approx(
        0.4 * math.pi
    )
    assert pp.exact_perimeter(pp.Disc((5.0, 0.0), 0.5), dom) == 0.0
    # domain ball strictly inside the disc: no boundary inside
    assert pp.exact_perimeter(pp.Disc((0.0, 0.0), 3.0), dom) == 0.0


def test_disc_perimeter_in_box():
    dom = pp.Domain.box(-1.0, 1.0, 16)
    assert pp.exact_perimeter(pp.Disc((0.1, -0.2), 0.5), dom) == pytest.approx(
        math.pi, rel=1e-14
    )
    assert pp.exact_perimeter(pp.Disc((8.0, 0.0), 0.5), dom) == 0.0
    assert pp.exact_perimeter(pp.Disc((0.0, 0.0), 5.0), dom) == 0.0
    with pytest.raises(UnsupportedRegionError):
        pp.exact_perimeter(pp.Disc((0.9, 0.0), 0.5), dom)


def segment_length_oracle(normal, offset, inside, span=10.0, samples=2_000_000):
    """Length of the line normal . x = offset where inside holds."""
    nx, ny = normal
    norm = math.hypot(nx, ny)
    nx, ny = nx / norm, ny / norm
    base = (offset / norm * nx, offset / norm * ny)
    t = (np.arange(samples) + 0.5) / samples * 2.0 * span - span
    x = base[0] - ny * t
    y = base[1] + nx * t
    return 2.0 * span * np.mean(inside(x, y))


def test_half_plane_perimeter_in_ball():
    dom = pp.Domain.ball(1.0, 16)
    # through the center: a full diameter
    assert pp.exact_perimeter(pp.HalfPlane((1.0, 0.0), 0.0), dom) == pytest.approx(2.0)
    # chord at distance d: length 2 sqrt(1 - d^2)
    assert pp.exact_perimeter(pp.HalfPlane((1.0, 0.0), 0.6), dom) == pytest.approx(
        2.0 * math.sqrt(1.0 - 0.36), rel=1e-14
    )
    assert pp.exact_perimeter(pp.HalfPlane((0.0, 1.0), 1.5), dom) == 0.0


def test_half_plane_perimeter_in_box():
    dom = pp.Domain.box(-1.0, 1.0, 16)

    def inside(x, y):
        return (np.abs(x) < 1.0) & (np.abs(y) < 1.0)

    for normal, offset in (
        ((1.0, 0.0), 0.25),
        ((0.6, 0.8), 0.1),
        ((1.0, 1.0), 0.0),
        ((-0.3, 0.95), -0.4),
    ):
        exact = pp.exact_perimeter(pp.HalfPlane(normal, offset), dom)
        oracle = segment_length_oracle(normal, offset, inside)
        assert exact == pytest.approx(oracle, abs=3e-5)
    assert pp.exact_perimeter(pp.HalfPlane((1.0, 0.0), 9.0), dom) == 0.0


def test_exact_perimeter_unsupported_compositions():
    dom = pp.Domain.box(-1.0, 1.0, 16)
    with pytest.raises(UnsupportedRegionError):
        pp.exact_perimeter(
            pp.Union((pp.Disc((0.0, 0.0), 0.3), pp.Disc((0.5, 0.0), 0.3))), dom
        )
    with pytest.raises(UnsupportedRegionError):
        pp.exact_perimeter(
            pp.Intersection((pp.Disc((0.0, 0.0), 0.5), pp.HalfPlane((1.0, 0.0), 0.0))),
            dom,
        )


def test_complement_perimeter_matches():
    dom = pp.Domain.box(-1.0, 1.0, 16)
    disc = pp.Disc((0.1, 0.1), 0.4)
    assert pp.exact_perimeter(pp.Complement(disc), dom) == pp.exact_perimeter(
        disc, dom
    )


def test_interface_length_1d():
    dom = pp.Domain.interval(-1.0, 1.0, 256)
    v = np.sin(3.0 * np.pi * dom.nodes_x)
    assert pp.interface_length(v, dom) == 5.0
    assert pp.interface_length(np.ones(dom.node_shape), dom) == 0.0
    assert pp.interface_length(v >= 0.0, dom) == 5.0


def test_interface_length_disc_converges_second_order():
    disc = pp.Disc((0.0, 0.0), 0.5)
    errors = []
    for n, tol in ((256, 2e-5), (512, 5e-6), (1024, 1.5e-6)):
        dom = pp.Domain.box(-1.0, 1.0, n)
        sd = disc.signed_distance(*dom.node_points())
        length = pp.interface_length(sd, dom)
        rel = abs(length - math.pi) / math.pi
        assert rel <= tol
        errors.append(rel)
    assert errors[0] / errors[1] >= 3.0
    assert errors[1] / errors[2] >= 3.0


def test_interface_length_half_plane_exact():
    hp = pp.HalfPlane((0.6, 0.8), 0.1)
    dom = pp.Domain.box(-1.0, 1.0, 256)
    sd = hp.signed_distance(*dom.node_points())
    assert pp.interface_length(sd, dom) == pytest.approx(
        pp.exact_perimeter(hp, dom), rel=1e-12
    )


def test_interface_length_boolean_overestimates():
    # midpoint crossings turn smooth circles into staircases; the known
    # systematic overestimate is a few percent
    disc = pp.Disc((0.0, 0.0), 0.5)
    dom = pp.Domain.box(-1.0, 1.0, 1024)
    sd = disc.signed_distance(*dom.node_points())
    length = pp.interface_length(sd >= 0.0, dom)
    rel = (length - math.pi) / math.pi
    assert 0.04 <= rel <= 0.07


def test_interface_length_ball_domain():
    disc = pp.Disc((0.0, 0.0), 0.5)
    dom = pp.Domain.ball(1.0, 512)
    sd = disc.signed_distance(*dom.node_points())
    length = pp.interface_length(sd, dom)
    assert abs(length - math.pi) / math.pi <= 5e-6


def test_region_cell_fraction_grid_aligned():
    dom = pp.Domain.box(-1.0, 1.0, 8)
    frac = region_cell_fraction(pp.HalfPlane((1.0, 0.0), 0.0), dom)
    # the boundary lies on a grid line, so fractions are exactly 0 or 1
    assert set(np.unique(frac)) == {0.0, 1.0}
    assert np.sum(frac) * dom.h * dom.h == pytest.approx(2.0, rel=1e-14)


def test_region_cell_fraction_area():
    dom = pp.Domain.box(-1.0, 1.0, 256)
    frac = region_cell_fraction(pp.Disc((0.0, 0.0), 0.5), dom)
    area = float(np.sum(frac)) * dom.h * dom.h
    assert area == pytest.approx(math.pi * 0.25, rel=2e-4)
