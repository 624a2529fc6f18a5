"""Cross-cutting randomized and oracle-backed property tests."""

import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricfano.cones import RationalCone
from toricfano.fan import Fan
from toricfano.library import bl_pt_p4, builtin, p4
from toricfano.mori import cone_suite, mori_chambers
from toricfano.surgery import blowup, contract, extremal_rays, flip, ne_cone
from toricfano.variety import ToricVariety

CORPUS = ["P4", "P1xP3", "P2xP2", "F2xP2", "Bl_pt_P4", "D3", "B511", "Y_tower", "R3"]


# -- intersection numbers against the multinomial oracle ----------------


def product_oracle(dims, coeff_vectors):
    """Top intersection of divisors sum_i a_i H_i on a product of
    projective spaces, by multinomial expansion: the only surviving
    monomial is prod H_i^{dims[i]}."""
    total = sum(dims)
    acc = {(0,) * len(dims): Fraction(1)}
    for a in coeff_vectors:
        nxt = {}
        for expo, c in acc.items():
            for i, ai in enumerate(a):
                if ai == 0:
                    continue
                e = list(expo)
                e[i] += 1
                if e[i] > dims[i]:
                    continue
                key = tuple(e)
                nxt[key] = nxt.get(key, Fraction(0)) + c * ai
        acc = nxt
    assert total == len(coeff_vectors)
    return acc.get(tuple(dims), Fraction(0))


def _product_factors(name):
    return {
        "P4": ([4], [[0]]),
        "P1xP3": ([1, 3], None),
        "P2xP2": ([2, 2], None),
    }[name]


def _hyperplane_classes(X, name):
    if name == "P4":
        return [X.ray_divisor_class(0)]
    if name == "P1xP3":
        return [X.ray_divisor_class(0), X.ray_divisor_class(2)]
    if name == "P2xP2":
        return [X.ray_divisor_class(0), X.ray_divisor_class(3)]
    raise KeyError(name)


@pytest.mark.parametrize("name", ["P4", "P1xP3", "P2xP2"])
def test_intersection_against_multinomial_oracle(name):
    X = builtin(name)
    dims, _ = _product_factors(name)
    hs = _hyperplane_classes(X, name)
    rng = random.Random(f"oracle-{name}")
    for _ in range(20):
        coeffs = [
            [rng.randint(-3, 3) for _ in dims] for _ in range(4)
        ]
        divisors = []
        for a in coeffs:
            d = a[0] * hs[0]
            for ai, h in zip(a[1:], hs[1:]):
                d = d + ai * h
            divisors.append(d)
        expected = product_oracle(dims, coeffs)
        assert X.intersection_number(*divisors) == expected


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.lists(st.integers(min_value=-2, max_value=2), min_size=2, max_size=2),
        min_size=4,
        max_size=4,
    )
)
def test_intersection_multilinear_random(quads):
    X = bl_pt_p4()
    H = X.ray_divisor_class(4)
    E = X.ray_divisor_class(5)
    divisors = [a * H + b * E for a, b in quads]
    v = X.intersection_number(*divisors)
    swapped = [divisors[1], divisors[0], divisors[3], divisors[2]]
    assert X.intersection_number(*swapped) == v
    doubled = [2 * divisors[0]] + divisors[1:]
    assert X.intersection_number(*doubled) == 2 * v


# -- blow-up / contract round trips on random centers -------------------


@pytest.mark.parametrize("name", ["P4", "P1xP3", "P2xP2", "Bl_pt_P4"])
def test_blowup_contract_round_trip_random_centers(name):
    X = builtin(name)
    rng = random.Random(f"roundtrip-{name}")
    faces = sorted(
        {
            tuple(sorted(sub))
            for c in X.fan.max_cones
            for k in (2, 3, 4)
            for sub in combinations(c, k)
        }
    )
    for center in rng.sample(faces, min(10, len(faces))):
        Y = blowup(X, center)
        assert Y.report.ok
        back = contract(Y, Y.n_rays - 1)
        assert back.fan.canonical_key() == X.fan.canonical_key()


def test_blowup_ledger_cross_check_curve_centers():
    # Invariant-curve centers: the fan recomputation must match the
    # genus-0 curve blow-up deltas with -K.C read off the wall degree.
    X = p4()
    wall_by_shared = {w.shared: w for w in X.walls}
    for center in [(0, 1, 2), (1, 2, 3), (0, 2, 4)]:
        w = wall_by_shared[center]
        d = w.degK + 2
        before, after = X.ledger_state(), blowup(X, center).ledger_state()
        assert before.chi_minusK - after.chi_minusK == 3 * d
        assert before.degK4 - after.degK4 == 16 * d
        assert before.c2K2 - after.c2K2 == 4 * d


# -- flips ---------------------------------------------------------------


def _flippable_classes(X):
    return [
        c for c, d in extremal_rays(X) if d.kind == "small" and d.flippable
    ]


def test_flip_involution_across_chamber_graph():
    X = builtin("R3")
    graph = mori_chambers(X)
    count = 0
    for fan in graph.fans:
        node = ToricVariety(fan)
        for c in _flippable_classes(node):
            flipped, circuits = flip(node, c)
            back, _ = flip(flipped, [-x for x in c.coords])
            assert back.fan.canonical_key() == node.fan.canonical_key()
            count += 1
    assert count >= 10


def test_flip_circuits_disjoint_on_fano():
    for name in ("D3", "R3"):
        X = builtin(name)
        for c in _flippable_classes(X):
            _, circuits = flip(X, c)
            for a, b in combinations(circuits, 2):
                assert not set(a.support) & set(b.support)


def test_flip_chi_conservation_everywhere():
    X = builtin("R3")
    graph = mori_chambers(X)
    for fan in graph.fans:
        node = ToricVariety(fan)
        before = node.ledger_state()
        for c in _flippable_classes(node):
            flipped, circuits = flip(node, c)
            after = flipped.ledger_state()
            s = len(circuits)
            assert after.chi_minusK == before.chi_minusK
            assert abs(after.degK4 - before.degK4) == s
            assert after.rho == before.rho


# -- chamber decomposition against the weight-perturbation oracle --------


def _chambers_by_weight_walk(X, max_nodes=64):
    """Independent enumeration of the movable-cone chambers: walk facets
    by perturbing a facet point beyond the wall and reading off the
    regular triangulation the perturbed weight selects."""
    classes = [X.ray_divisor_class(i).coords for i in range(X.n_rays)]
    mov = cone_suite(X).mov

    def triangulation(w):
        cones = set()
        for sigma in combinations(range(X.n_rays), X.dim):
            complement = [classes[j] for j in range(X.n_rays) if j not in sigma]
            cone = RationalCone.from_generators(complement, X.rho)
            if cone.contains(w):
                cones.add(tuple(sigma))
        return cones

    def fan_for_weight(w):
        cones = [
            c
            for c in triangulation(w)
            if RationalCone.from_generators([X.fan.rays[i] for i in c], X.dim).dim
            == X.dim
        ]
        try:
            return ToricVariety(Fan.make(X.dim, [list(r) for r in X.fan.rays], cones))
        except Exception:
            return None

    start_nef = ne_cone(X).dual()
    seen = {X.fan.canonical_key(): (X, start_nef)}
    queue = [(X, start_nef)]
    while queue:
        node, nef = queue.pop()
        w_in = nef.interior_point()
        for facet in nef.faces_of_dim(X.rho - 1):
            p = facet.interior_point()
            if not mov.contains_in_relative_interior(p):
                continue
            for k in range(1, 13):
                scale = 2**k
                w_out = tuple((scale + 1) * a - b for a, b in zip(p, w_in))
                if not mov.contains(w_out) or nef.contains(w_out):
                    continue
                neighbor = fan_for_weight(w_out)
                if neighbor is None:
                    continue
                nnef = ne_cone(neighbor).dual()
                if not nnef.contains(p):
                    continue
                key = neighbor.fan.canonical_key()
                if key not in seen:
                    if len(seen) >= max_nodes:
                        raise RuntimeError("oracle walk exceeded node cap")
                    seen[key] = (neighbor, nnef)
                    queue.append((neighbor, nnef))
                break
    return seen


@pytest.mark.parametrize("name", ["Bl_pt_P4", "D3", "R3"])
def test_chamber_count_matches_weight_oracle(name):
    X = builtin(name)
    ours = mori_chambers(X)
    oracle = _chambers_by_weight_walk(X)
    assert ours.count == len(oracle)
    assert {f.canonical_key() for f in ours.fans} == set(oracle)


# -- cone suite on the whole corpus --------------------------------------


@pytest.mark.parametrize("name", CORPUS)
def test_cone_suite_identities_corpus(name):
    X = builtin(name)
    suite = cone_suite(X)
    assert suite.nef.dual() == suite.ne
    assert suite.eff.dual() == suite.mov_curves
    assert suite.mov.contains_cone(suite.nef)
    assert suite.eff.contains_cone(suite.mov)
    assert suite.nef.dim == X.rho


@pytest.mark.parametrize("name", CORPUS)
def test_walls_relations2_corpus(name):
    X = builtin(name)
    for w in X.walls:
        assert sum(w.relation) == w.degK
        combo = [
            sum(w.relation[i] * X.fan.rays[i][t] for i in range(X.n_rays))
            for t in range(X.dim)
        ]
        assert all(x == 0 for x in combo)


@pytest.mark.parametrize("name", CORPUS)
def test_point_count_on_unimodular_quadruples(name):
    X = builtin(name)
    cone = X.fan.max_cones[0]
    classes = [X.ray_divisor_class(i) for i in cone]
    assert X.intersection_number(*classes) == 1


def test_random_blowup_chains_stay_consistent():
    # Random towers of invariant blow-ups: every intermediate fan must
    # validate, the class-group rank must track the ray count, the
    # Riemann-Roch identity must hold for the fan-derived ledger, and
    # the cone chain must survive.
    rng = random.Random("blowup-chains")
    for start_name in ("P4", "P1xP3"):
        for _ in range(6):
            X = builtin(start_name)
            for depth in range(3):
                faces = sorted(
                    {
                        tuple(sorted(sub))
                        for cone in X.fan.max_cones
                        for k in (2, 3, 4)
                        for sub in combinations(cone, k)
                    }
                )
                X = blowup(X, rng.choice(faces))
                assert X.report.ok
                assert X.rho == X.n_rays - 4
                s = X.ledger_state()
                assert 12 * (s.chi_minusK - s.chi_O) == 2 * s.degK4 + s.c2K2
            suite = cone_suite(X)
            assert suite.nef.dual() == suite.ne
            assert suite.eff.contains_cone(suite.mov)
            assert suite.mov.contains_cone(suite.nef)


# -- Euler characteristics against lattice-point enumeration -------------


def _lattice_points_of_nef(X, coeffs):
    """Count lattice points of {m : <m, u_i> >= -a_i}; for a nef divisor
    on a smooth complete toric variety this is chi(D), by vanishing."""
    from toricfano.lattice import solve_rational

    verts = []
    for cone in X.fan.max_cones:
        sol = solve_rational(
            [list(X.fan.rays[i]) for i in cone], [-coeffs[i] for i in cone]
        )
        assert sol is not None
        verts.append(sol)
    lo = [min(v[t] for v in verts) for t in range(X.dim)]
    hi = [max(v[t] for v in verts) for t in range(X.dim)]
    import math

    ranges = [range(math.ceil(l), math.floor(h) + 1) for l, h in zip(lo, hi)]
    count = 0
    from itertools import product as iproduct

    for m in iproduct(*ranges):
        if all(
            sum(m[t] * X.fan.rays[i][t] for t in range(X.dim)) >= -coeffs[i]
            for i in range(X.n_rays)
        ):
            count += 1
    return count


def _chi_by_riemann_roch(X, coeffs):
    from toricfano.ledger import chi_general

    D = X.divisor_class(coeffs)
    K = -1 * X.anticanonical_class
    D4 = X.intersection_number(D, D, D, D)
    KD3 = X.intersection_number(K, D, D, D)
    K2D2 = X.intersection_number(K, K, D, D)
    D2c2 = X.c2_pairing(D)
    DKc2 = X.c2_product(D, K)
    return chi_general(D4, KD3, K2D2 + D2c2, DKc2, chi_O=1)


def _is_nef(X, coeffs):
    D = X.divisor_class(coeffs)
    return all(X.pair(D, w.curve_class) >= 0 for w in X.walls)


@pytest.mark.parametrize(
    "name", ["P4", "P1xP3", "P2xP2", "F2xP2", "Bl_pt_P4", "D3", "B511", "Y_tower", "R3"]
)
def test_chi_of_nef_divisors_counts_lattice_points(name):
    # Riemann-Roch from the intersection engine versus raw enumeration.
    X = builtin(name)
    rng = random.Random(f"chi-points-{name}")
    candidates = [tuple([1] * X.n_rays)]
    for _ in range(12):
        candidates.append(tuple(rng.randint(0, 2) for _ in range(X.n_rays)))
    tested = 0
    for coeffs in candidates:
        if not _is_nef(X, coeffs):
            continue
        chi = _chi_by_riemann_roch(X, coeffs)
        assert chi.denominator == 1
        assert int(chi) == _lattice_points_of_nef(X, coeffs)
        tested += 1
    assert tested >= 2
