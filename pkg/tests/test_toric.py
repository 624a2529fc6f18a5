import json
from fractions import Fraction
from itertools import permutations

import pytest

from toricfano.fan import Fan, ValidationError, fan_from_json, fan_to_json, validate
from toricfano.library import (
    bl_pt_p4,
    f2xp2,
    hirzebruch_fan,
    p1xp3,
    p2xp2,
    p4,
    projective_space_fan,
)
from toricfano.variety import ToricVariety


def test_p4_fan_validates():
    report = validate(projective_space_fan(4))
    assert report.ok
    assert [c.name for c in report.checks] == [
        "structure",
        "primitivity",
        "smoothness",
        "face_compatibility",
        "completeness",
    ]


def test_weighted_projective_space_fails_smoothness():
    rays = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [-1, -1, -1, -2]]
    cones = [[j for j in range(5) if j != i] for i in range(5)]
    report = validate(Fan.make(4, rays, cones))
    assert not report.ok
    bad = next(c for c in report.checks if c.name == "smoothness")
    assert not bad.passed
    assert "|det| = 2" in bad.detail


def test_incomplete_fan_fails():
    f = projective_space_fan(4)
    report = validate(Fan.make(4, [list(r) for r in f.rays], f.max_cones[1:]))
    assert not report.ok
    assert not next(c for c in report.checks if c.name == "completeness").passed


def test_nonprimitive_ray_fails():
    rays = [[2, 0], [0, 1], [-2, -1]]
    cones = [[0, 1], [1, 2], [0, 2]]
    report = validate(Fan.make(2, rays, cones))
    assert not next(c for c in report.checks if c.name == "primitivity").passed


def test_overlapping_cones_fail_face_compatibility():
    # Two maximal cones overlapping in a 2-dim region of the plane.
    rays = [[1, 0], [0, 1], [1, 1], [-1, -1], [-1, 0], [0, -1]]
    cones = [[0, 1], [0, 2], [1, 4], [4, 3], [3, 5], [5, 0]]
    report = validate(Fan.make(2, rays, cones))
    assert not report.ok


def test_fan_json_round_trip():
    f = projective_space_fan(4)
    text = fan_to_json(f)
    again = fan_from_json(text)
    assert again == f
    assert fan_to_json(again) == text


def test_fan_json_rejections():
    with pytest.raises(ValidationError):
        fan_from_json("not json")
    with pytest.raises(ValidationError):
        fan_from_json(json.dumps({"dim": 2, "rays": [[1, 0]]}))
    with pytest.raises(ValidationError):
        fan_from_json(
            json.dumps({"dim": 2, "rays": [[1, 0], [0, 1]], "max_cones": [[0, 5]]})
        )
    with pytest.raises(ValidationError):
        fan_from_json(
            json.dumps({"dim": 2, "rays": [[1, 0, 0]], "max_cones": [[0]]})
        )


def test_class_group_p4():
    X = p4()
    assert X.rho == 1
    rho, kbasis, pairing = X.class_group()
    assert rho == 1
    assert kbasis == ((1, 1, 1, 1, 1),)
    assert pairing == [[1]]


def test_class_group_products_and_blowup():
    assert p1xp3().rho == 2
    assert bl_pt_p4().rho == 2


def test_anticanonical_p4_is_5H():
    X = p4()
    H = X.ray_divisor_class(0)
    assert X.anticanonical_class.coords == tuple(5 * h for h in H.coords)


def test_anticanonical_p1xp3():
    X = p1xp3()
    fiber = X.ray_divisor_class(0)   # {pt} x P3
    hyper = X.ray_divisor_class(2)   # P1 x hyperplane
    mk = X.anticanonical_class
    assert mk.coords == (2 * fiber + 4 * hyper).coords


def test_anticanonical_blowup_formula():
    X = bl_pt_p4()
    H = X.ray_divisor_class(4)      # pullback hyperplane (the -sum ray)
    E = X.ray_divisor_class(5)      # exceptional ray, appended last
    expected = 5 * H + (-3) * E
    assert X.anticanonical_class.coords == expected.coords


def test_intersection_h4_p4():
    X = p4()
    H = X.ray_divisor_class(0)
    assert X.intersection_number(H, H, H, H) == 1


def test_intersection_minus_k_4():
    X = p1xp3()
    mk = X.anticanonical_class
    assert X.intersection_number(mk, mk, mk, mk) == 512
    Y = bl_pt_p4()
    mkY = Y.anticanonical_class
    assert Y.intersection_number(mkY, mkY, mkY, mkY) == 544
    assert p4().intersection_number(*[p4().anticanonical_class] * 4) == 625
    assert p2xp2().intersection_number(*[p2xp2().anticanonical_class] * 4) == 486


def test_intersection_symmetry_and_linearity():
    X = bl_pt_p4()
    a = X.ray_divisor_class(0)
    b = X.ray_divisor_class(4)
    c = X.ray_divisor_class(5)
    d = X.anticanonical_class
    base = X.intersection_number(a, b, c, d)
    for perm in permutations([a, b, c, d]):
        assert X.intersection_number(*perm) == base
    lhs = X.intersection_number(a + b, b, c, d)
    assert lhs == base + X.intersection_number(b, b, c, d)
    assert X.intersection_number(3 * a, b, c, d) == 3 * base


def test_point_class_of_maximal_cone():
    X = p1xp3()
    cone = X.fan.max_cones[0]
    classes = [X.ray_divisor_class(i) for i in cone]
    assert X.intersection_number(*classes) == 1


def test_c2_pairing():
    assert p4().c2_pairing(p4().anticanonical_class) == 250
    assert p1xp3().c2_pairing(p1xp3().anticanonical_class) == 224
    assert bl_pt_p4().c2_pairing(bl_pt_p4().anticanonical_class) == 232


def test_chi_from_fan():
    assert p4().ledger_state().chi_minusK == 126
    assert p1xp3().ledger_state().chi_minusK == 105
    assert p2xp2().ledger_state().chi_minusK == 100
    assert bl_pt_p4().ledger_state().chi_minusK == 111


def test_is_fano():
    assert p4().is_fano
    assert p1xp3().is_fano
    assert bl_pt_p4().is_fano
    assert not f2xp2().is_fano


def test_f2xp2_zero_degree_wall():
    X = f2xp2()
    assert min(w.degK for w in X.walls) == 0


def test_walls_p4():
    X = p4()
    ws = X.walls
    assert len(ws) == 10
    classes = {w.curve_class.coords for w in ws}
    assert len(classes) == 1
    assert all(w.degK == 5 for w in ws)


def test_walls_p1xp3_two_classes():
    X = p1xp3()
    classes = {w.curve_class.coords for w in X.walls}
    assert len(classes) == 2


def test_wall_relation_holds_exactly():
    for X in (p4(), p1xp3(), bl_pt_p4()):
        for w in X.walls:
            combo = [
                sum(w.relation[i] * X.fan.rays[i][t] for i in range(X.n_rays))
                for t in range(X.dim)
            ]
            assert all(x == 0 for x in combo)
            assert w.relation[w.left] == 1 and w.relation[w.right] == 1
            assert w.degK == sum(w.relation)


def test_wall_curve_pairing_matches_relation():
    X = bl_pt_p4()
    for w in X.walls:
        for i in range(X.n_rays):
            assert X.pair(X.ray_divisor_class(i), w.curve_class) == w.relation[i]


def test_max_cone_count_equals_fixed_points():
    # chi_top of a smooth complete toric 4-fold is the number of maximal
    # cones; cross-check against the Euler number from the products.
    assert len(p4().fan.max_cones) == 5
    assert len(p1xp3().fan.max_cones) == 2 * 4
    assert len(p2xp2().fan.max_cones) == 9


def test_hirzebruch_fan_negative_section():
    X = ToricVariety(hirzebruch_fan(2), name="F2")
    w = next(w for w in X.walls if w.relation[2] != 0 and len(w.shared) == 1 and w.shared[0] == 2)
    assert w.relation[2] == -2


def test_validation_cached_and_hash():
    f = projective_space_fan(4)
    assert validate(f) is validate(f)
    assert f.content_hash() == projective_space_fan(4).content_hash()


def test_require_smooth_gates():
    rays = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [-1, -1, -1, -2]]
    cones = [[j for j in range(5) if j != i] for i in range(5)]
    X = ToricVariety(Fan.make(4, rays, cones), allow_singular=True)
    assert not X.is_smooth
    with pytest.raises(ValidationError):
        X.intersection_number(*[None] * 4)


def test_fraction_exactness():
    X = p4()
    H = X.ray_divisor_class(0)
    half = Fraction(1, 2) * H
    assert X.intersection_number(half, half, half, half) == Fraction(1, 16)


def test_fan_labels_round_trip():
    f = Fan.make(
        4,
        [list(r) for r in projective_space_fan(4).rays],
        projective_space_fan(4).max_cones,
        labels={4: "H"},
    )
    text = fan_to_json(f)
    again = fan_from_json(text)
    assert again.ray_label(4) == "H"
    assert again.ray_label(0) == "u0"
    assert fan_to_json(again) == text


def test_fan_json_rejects_boolean_entries():
    with pytest.raises(ValidationError):
        fan_from_json(json.dumps({"dim": True, "rays": [[1]], "max_cones": [[0]]}))
    with pytest.raises(ValidationError):
        fan_from_json(
            json.dumps({"dim": 1, "rays": [[True], [-1]], "max_cones": [[0], [1]]})
        )
