import json

import numpy as np
import pytest

from holovol.domains import (
    AffineBallImage,
    HalfspaceConvex,
    L1Ball,
    MembershipOracle,
    Polydisc,
    SiegelHalfSpace,
    cayley,
    cayley_inverse,
    cayley_jacobian_det,
    circumscribed_radius,
    contains,
    diameter,
    domain_from_json,
    domain_to_json,
    exact_volume_element,
    sample_interior,
    symmetrized_bidisc,
    unit_ball,
    validate_oracle,
)
from holovol.errors import ConfigInvalid, NoOracle, PointOutsideDomain, UnboundedDomain
from holovol.linalg import random_unitary, uniform_ball


def square_domain():
    normals = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=np.complex128)
    return HalfspaceConvex(n=2, normals=normals, offsets=np.ones(4))


def ellipsoid_21():
    return AffineBallImage(2, matrix=np.diag([2.0, 1.0]).astype(np.complex128),
                           center=np.zeros(2, dtype=np.complex128))


# ---------------------------------------------------------------------------
# symmetrized bidisc membership vs. brute-force root criterion
# ---------------------------------------------------------------------------


def bidisc_membership_by_roots(s: complex, p: complex) -> bool:
    # (s, p) = (z + w, z w) with z, w in the unit disc iff both roots of
    # t^2 - s t + p lie strictly inside the disc
    roots = np.roots([1.0, -s, p])
    return bool(np.all(np.abs(roots) < 1.0))


def test_bidisc_predicate_matches_root_criterion():
    G = symmetrized_bidisc()
    rng = np.random.default_rng(42)
    # points synthesized from disc pairs are inside; generic points compared 1:1
    z = 0.98 * np.sqrt(rng.uniform(0, 1, 400)) * np.exp(2j * np.pi * rng.uniform(0, 1, 400))
    w = 0.98 * np.sqrt(rng.uniform(0, 1, 400)) * np.exp(2j * np.pi * rng.uniform(0, 1, 400))
    pts = np.stack([z + w, z * w], axis=1)
    assert np.all(G.contains_many(pts))

    # random probe points, some in, some out; avoid the measure-zero boundary
    s = rng.normal(size=600) + 1j * rng.normal(size=600)
    p = 0.8 * (rng.normal(size=600) + 1j * rng.normal(size=600)) / np.sqrt(2)
    probes = np.stack([s, p], axis=1)
    pred = G.contains_many(probes)
    brute = np.array([bidisc_membership_by_roots(a, b) for a, b in probes])
    # guard against accidental boundary grazing
    margin = np.abs(np.abs(probes[:, 0] - np.conj(probes[:, 0]) * probes[:, 1])
                    - (1.0 - np.abs(probes[:, 1]) ** 2))
    keep = margin > 1e-9
    assert keep.sum() > 500
    assert np.array_equal(pred[keep], brute[keep])


def test_bidisc_is_inside_enclosing_polydisc():
    G = symmetrized_bidisc()
    c, r = G.enclosing_polydisc
    rng = np.random.default_rng(3)
    pts = sample_interior(G, 500, rng)
    assert np.all(np.abs(pts - c[None, :]) < r[None, :] + 1e-12)


# ---------------------------------------------------------------------------
# Cayley map
# ---------------------------------------------------------------------------


def test_cayley_maps_ball_into_siegel():
    rng = np.random.default_rng(7)
    S = SiegelHalfSpace(n=3)
    w = uniform_ball(3, 10_000, rng)
    z = cayley(w)
    assert np.all(S.contains_many(z))


def test_cayley_round_trip():
    rng = np.random.default_rng(11)
    w = uniform_ball(2, 200, rng)
    back = cayley_inverse(cayley(w))
    assert np.max(np.abs(back - w)) < 1e-12


def test_cayley_jacobian_matches_finite_differences():
    rng = np.random.default_rng(13)
    n = 2
    w0 = np.array([0.2 + 0.1j, -0.3 + 0.05j])
    h = 1e-6
    J = np.empty((n, n), dtype=np.complex128)
    for k in range(n):
        e = np.zeros(n, dtype=np.complex128)
        e[k] = h
        J[:, k] = (cayley((w0 + e)[None, :])[0] - cayley((w0 - e)[None, :])[0]) / (2 * h)
    det_fd = np.linalg.det(J)
    det = cayley_jacobian_det(w0[None, :], n)[0]
    assert abs(det - det_fd) / abs(det_fd) < 1e-6


# ---------------------------------------------------------------------------
# diameters and circumscribed radii
# ---------------------------------------------------------------------------


def test_diameters_closed_forms():
    assert diameter(unit_ball(2)) == pytest.approx(2.0, rel=1e-12)
    P = Polydisc(2, center=np.zeros(2, dtype=np.complex128), radii=np.array([1.0, 1.0]))
    assert diameter(P) == pytest.approx(2 * np.sqrt(2), rel=1e-12)
    assert diameter(L1Ball(n=2, scale=1.0)) == pytest.approx(2.0, rel=1e-12)
    # image of the ball under diag(2, 1): longest axis has length 4
    assert diameter(ellipsoid_21()) == pytest.approx(4.0, rel=1e-12)
    assert diameter(SiegelHalfSpace(n=2)) == np.inf


def test_circumscribed_radius_bounds_all_samples():
    rng = np.random.default_rng(5)
    for dom in (unit_ball(2), ellipsoid_21(),
                Polydisc(2, center=np.zeros(2, dtype=np.complex128),
                         radii=np.array([1.0, 0.5])),
                L1Ball(n=2, scale=1.0), symmetrized_bidisc()):
        z = np.zeros(2, dtype=np.complex128)
        R = circumscribed_radius(dom, z)
        pts = sample_interior(dom, 400, rng)
        assert np.max(np.linalg.norm(pts - z[None, :], axis=1)) <= R + 1e-9
    assert circumscribed_radius(square_domain(),
                                np.zeros(2, dtype=np.complex128)) == np.inf


# ---------------------------------------------------------------------------
# exact oracles and the transformation rule
# ---------------------------------------------------------------------------


def test_validate_oracle_accepts_ball_and_ellipsoid():
    validate_oracle(unit_ball(2).exact_oracle, points=50, seed=0)
    validate_oracle(ellipsoid_21().exact_oracle, points=50, seed=1)


def test_volume_element_unitary_prerotation_invariance():
    # composing the forward map with a unitary rotation of the ball fixing the
    # preimage must not change the volume element
    rng = np.random.default_rng(17)
    M = np.array([[2.0, 0.3 + 0.1j], [0.0, 1.0]], dtype=np.complex128)
    c = np.array([0.1, -0.2j])
    dom = AffineBallImage(2, matrix=M, center=c)
    z = dom.center  # preimage 0, fixed by every unitary
    v0 = exact_volume_element(dom, z)
    for _ in range(10):
        U = random_unitary(2, rng)
        rotated = AffineBallImage(2, matrix=M @ U, center=c)
        v1 = exact_volume_element(rotated, z)
        assert abs(v1 - v0) / v0 < 1e-9


def test_ball_volume_element_closed_form():
    rng = np.random.default_rng(19)
    B = unit_ball(3)
    w = uniform_ball(3, 100, rng)
    for z in w[:20]:
        v = exact_volume_element(B, z)
        expected = (1 - np.linalg.norm(z) ** 2) ** (-4)
        assert abs(v - expected) / expected < 1e-10


def test_volume_element_monotone_under_ball_nesting():
    # smaller domain has the larger volume element
    small = AffineBallImage(2, matrix=0.5 * np.eye(2, dtype=np.complex128),
                            center=np.zeros(2, dtype=np.complex128))
    big = unit_ball(2)
    z = np.array([0.1 + 0.05j, -0.2j])
    assert exact_volume_element(small, z) > exact_volume_element(big, z)


def test_volume_element_radius_scaling_at_center():
    for r in (0.25, 0.5, 2.0):
        dom = AffineBallImage(2, matrix=r * np.eye(2, dtype=np.complex128),
                              center=np.zeros(2, dtype=np.complex128))
        v = exact_volume_element(dom, np.zeros(2, dtype=np.complex128))
        assert v == pytest.approx(r ** (-4), rel=1e-12)


def test_volume_element_outside_point_raises():
    with pytest.raises(PointOutsideDomain):
        exact_volume_element(unit_ball(2), np.array([2.0 + 0j, 0j]))


def test_no_oracle_on_membership_oracle():
    with pytest.raises(NoOracle):
        exact_volume_element(symmetrized_bidisc(), np.zeros(2, dtype=np.complex128))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def test_sample_interior_stays_inside():
    rng = np.random.default_rng(23)
    for dom in (unit_ball(2), ellipsoid_21(),
                Polydisc(3, center=np.zeros(3, dtype=np.complex128),
                         radii=np.array([1.0, 0.5, 2.0])),
                L1Ball(n=2, scale=1.5),
                SiegelHalfSpace(n=2), symmetrized_bidisc()):
        pts = sample_interior(dom, 300, rng)
        assert pts.shape == (300, dom.n)
        assert np.all(dom.contains_many(pts))
    sq = square_domain()  # unbounded: needs an explicit window
    box = np.array([[-1.0, 1.0]] * 4)
    pts = sample_interior(sq, 300, rng, box=box)
    assert np.all(sq.contains_many(pts))


def test_sample_interior_unbounded_needs_box():
    strip_like = HalfspaceConvex(2, normals=np.array([[1, 0]], dtype=np.complex128),
                                 offsets=np.array([1.0]))
    rng = np.random.default_rng(29)
    with pytest.raises(UnboundedDomain):
        sample_interior(strip_like, 10, rng)
    box = np.array([[-1.0, 0.5], [-1, 1], [-1, 1], [-1, 1]])
    pts = sample_interior(strip_like, 50, rng, box=box)
    assert np.all(strip_like.contains_many(pts))


def test_sampling_is_seed_deterministic():
    dom = unit_ball(2)
    a = sample_interior(dom, 64, np.random.default_rng(99))
    b = sample_interior(dom, 64, np.random.default_rng(99))
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# membership edge cases
# ---------------------------------------------------------------------------


def test_contains_is_strict():
    B = unit_ball(2)
    assert not contains(B, np.array([1.0 + 0j, 0j]))
    assert contains(B, np.array([0.999 + 0j, 0j]))
    P = Polydisc(2, center=np.zeros(2, dtype=np.complex128), radii=np.array([1.0, 1.0]))
    assert not contains(P, np.array([1.0 + 0j, 0j]))
    L = L1Ball(n=2, scale=1.0)
    assert not contains(L, np.array([0.5 + 0j, 0.5 + 0j]))
    assert contains(L, np.array([0.5 + 0j, 0.49 + 0j]))


def test_halfspace_boundedness():
    assert not square_domain().bounded  # imaginary directions are free
    normals = []
    for k in range(2):
        for a in (1, -1, 1j, -1j):
            row = [0, 0]
            row[k] = a
            normals.append(row)
    diamond = HalfspaceConvex(2, normals=np.array(normals, dtype=np.complex128),
                              offsets=np.ones(8))
    assert diamond.bounded


# ---------------------------------------------------------------------------
# JSON round trips
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("dom", [
    square_domain(),
    ellipsoid_21(),
    Polydisc(2, center=np.array([0.1 + 0.2j, 0j]), radii=np.array([1.0, 0.5])),
    L1Ball(n=3, scale=2.0),
    SiegelHalfSpace(n=2),
    symmetrized_bidisc(),
], ids=["halfspace", "ball_image", "polydisc", "l1ball", "siegel", "oracle"])
def test_domain_json_round_trip(dom):
    blob = json.dumps(domain_to_json(dom))
    back = domain_from_json(json.loads(blob))
    assert type(back) is type(dom)
    assert back.n == dom.n
    assert back.convexity_class == dom.convexity_class
    rng = np.random.default_rng(31)
    pts = sample_interior(dom, 100, rng) if dom.bounded or isinstance(
        dom, SiegelHalfSpace) else sample_interior(
        dom, 100, rng, box=np.array([[-1.0, 1.0]] * (2 * dom.n)))
    assert np.array_equal(dom.contains_many(pts), back.contains_many(pts))


def test_domain_from_json_rejects_garbage():
    with pytest.raises(ConfigInvalid):
        domain_from_json({"n": 2})
    with pytest.raises(ConfigInvalid):
        domain_from_json({"variant": "nonsense", "n": 2})
    with pytest.raises(ConfigInvalid):
        domain_from_json({"variant": "halfspace", "n": 2})
    with pytest.raises(ConfigInvalid):
        domain_from_json({"variant": "oracle", "n": 2, "predicate": "unknown_thing"})


def test_degenerate_inputs_rejected():
    with pytest.raises(ConfigInvalid):
        HalfspaceConvex(2, normals=np.array([[0, 0]], dtype=np.complex128),
                        offsets=np.array([1.0]))
    with pytest.raises(ConfigInvalid):
        Polydisc(2, center=np.zeros(2, dtype=np.complex128), radii=np.array([1.0, -1.0]))
    with pytest.raises(ConfigInvalid):
        L1Ball(n=2, scale=0.0)
    with pytest.raises(Exception):
        AffineBallImage(2, matrix=np.zeros((2, 2), dtype=np.complex128),
                        center=np.zeros(2, dtype=np.complex128))
