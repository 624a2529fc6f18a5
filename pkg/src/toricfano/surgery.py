"""Fan surgeries: torus-equivariant blow-ups, divisorial contractions,
and flips of small extremal rays, plus the classification of extremal
contractions from wall relations.

Reading a wall relation (normalized to +1 on the two completing rays):
rays with negative coefficient span the cone whose orbit closure is the
locus of the contraction, rays with positive coefficient control the
fibers.  An extremal ray is of fiber type when no coefficient is
negative, divisorial when the negative support is a single ray, small
when it has two or more rays.  A divisorial ray is a smooth blow-down
exactly when the relation says the contracted ray is the unit sum of
its positive support and removing it re-fans the star into a smooth
fan; the flippable small pattern is a five-ray circuit with unit
coefficients split 3 against 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Union

from .cones import RationalCone
from .fan import Fan, ValidationError
from .lattice import integer_kernel, primitive_vector, solve_integer, solve_rational, transpose
from .variety import CurveClass, ToricVariety, Wall

IntVec = tuple[int, ...]


class SurgeryError(ValueError):
    pass


def _require_4fold(X: ToricVariety) -> None:
    if X.dim != 4:
        raise SurgeryError("birational surgery is implemented for 4-folds")


# -- blow-up ----------------------------------------------------------


def blowup(
    X: ToricVariety, center: Sequence[int], name: Optional[str] = None
) -> ToricVariety:
    """Star subdivision at the primitive sum of the center cone's rays.

    The center must be a cone of the fan of dimension 2..dim (invariant
    surface, curve, or point on a 4-fold).
    """
    fan = X.fan
    center = tuple(sorted(center))
    if len(center) < 2 or len(center) > fan.dim:
        raise SurgeryError(
            f"center must have 2..{fan.dim} rays, got {len(center)}"
        )
    if not fan.has_cone(center):
        raise SurgeryError(f"center {list(center)} is not a cone of the fan")
    new_ray = primitive_vector(
        [sum(fan.rays[i][t] for i in center) for t in range(fan.dim)]
    )
    if new_ray in fan.rays:
        raise SurgeryError(f"exceptional ray {list(new_ray)} already in the fan")
    new_index = fan.n_rays
    cones = []
    for c in fan.max_cones:
        if set(center) <= set(c):
            for drop in center:
                cones.append(tuple(sorted(set(c) - {drop} | {new_index})))
        else:
            cones.append(c)
    new_fan = Fan.make(fan.dim, list(fan.rays) + [list(new_ray)], cones)
    return ToricVariety(new_fan, name=name or (X.name or "X") + "+blowup")


# -- contraction ------------------------------------------------------


def _center_candidates(X: ToricVariety, ray_index: int) -> list[tuple[int, ...]]:
    """Candidate centers for the inverse star subdivision at a ray.

    Smooth blow-downs have the contracted ray equal to the unit sum of
    the center rays; failing that, the positive support of the ray's
    divisorial wall relations is the center (possibly singular target).
    """
    fan = X.fan
    link = sorted(
        {i for c in fan.max_cones if ray_index in c for i in c} - {ray_index}
    )
    target = fan.rays[ray_index]
    out = []
    for size in range(2, fan.dim + 1):
        for subset in combinations(link, size):
            if all(
                sum(fan.rays[i][t] for i in subset) == target[t]
                for t in range(fan.dim)
            ):
                out.append(subset)
    for support in sorted(
        {
            w.positive_rays
            for w in X.walls
            if w.relation[ray_index] < 0 and w.negative_rays == (ray_index,)
        }
    ):
        if support not in out:
            out.append(support)
    return out


def _refanned_star(fan: Fan, ray_index: int, center: tuple[int, ...]) -> Fan:
    new_cones = set()
    for c in fan.max_cones:
        if ray_index not in c:
            continue
        missing = set(center) - set(c)
        if len(missing) != 1:
            raise SurgeryError(
                f"star cone {list(c)} is not part of a star subdivision over {list(center)}"
            )
        new_cones.add(tuple(sorted(set(c) - {ray_index} | missing)))
    keep = [c for c in fan.max_cones if ray_index not in c]
    reindex = {old: old - (old > ray_index) for old in range(fan.n_rays)}
    rays = [list(r) for i, r in enumerate(fan.rays) if i != ray_index]
    cones = [[reindex[i] for i in c] for c in list(keep) + sorted(new_cones)]
    return Fan.make(fan.dim, rays, cones)


def contract(
    X: ToricVariety,
    ray_index: int,
    *,
    center: Optional[Sequence[int]] = None,
    allow_singular: bool = False,
    name: Optional[str] = None,
) -> ToricVariety:
    """Inverse star subdivision: remove the ray, re-fan its star over the
    contraction center.

    When the same divisor carries several divisorial extremal rays, the
    center decides which contraction is performed; by default the
    candidates found on the ray are tried smallest first.  When the
    result fails smoothness the contraction leaves the smooth toric
    category; it is refused unless ``allow_singular``, in which case the
    (still complete and compatible) fan is returned flagged.
    """
    fan = X.fan
    if not 0 <= ray_index < fan.n_rays:
        raise SurgeryError(f"no ray {ray_index}")
    if center is not None:
        candidates = [tuple(sorted(center))]
    else:
        candidates = _center_candidates(X, ray_index)
    if not candidates:
        raise SurgeryError(
            f"ray {ray_index} is not the exceptional ray of a divisorial contraction"
        )
    flagged: Optional[ToricVariety] = None
    structural: Optional[SurgeryError] = None
    for center in candidates:
        try:
            new_fan = _refanned_star(fan, ray_index, center)
        except SurgeryError as e:
            structural = e
            continue
        try:
            return ToricVariety(new_fan, name=name or (X.name or "X") + "-contract")
        except ValidationError:
            pass
        if flagged is None:
            try:
                flagged = ToricVariety(
                    new_fan,
                    allow_singular=True,
                    name=name or (X.name or "X") + "-contract(singular)",
                )
            except ValidationError as e:
                structural = SurgeryError(str(e))
    if flagged is not None:
        if not allow_singular:
            raise SurgeryError(
                f"contracting ray {ray_index} leaves the smooth toric category"
            )
        return flagged
    raise structural or SurgeryError(f"ray {ray_index} is not contractible")


# -- flips ------------------------------------------------------------


@dataclass(frozen=True)
class FlipCircuit:
    support: tuple[int, ...]
    positive: tuple[int, ...]
    negative: tuple[int, ...]

    @property
    def planes_to_lines(self) -> bool:
        """True when the current side carries the 2-dimensional locus."""
        return len(self.positive) == 3


def _proportional_positive(a: Sequence[int], b: Sequence[int]) -> bool:
    if all(x == 0 for x in a) or all(x == 0 for x in b):
        return False
    return primitive_vector(a) == primitive_vector(b)


def flip_circuits(X: ToricVariety, curve: Union[CurveClass, Sequence[int]]) -> list[FlipCircuit]:
    """Group the walls on a small extremal class into bistellar circuits,
    checking the five-ray unit-coefficient pattern."""
    _require_4fold(X)
    coords = curve.coords if isinstance(curve, CurveClass) else tuple(curve)
    on_ray = [w for w in X.walls if _proportional_positive(w.curve_class.coords, coords)]
    if not on_ray:
        raise SurgeryError(f"no wall curve on the ray of {coords}")
    by_support: dict[tuple[int, ...], list[Wall]] = {}
    for w in on_ray:
        by_support.setdefault(w.circuit_support, []).append(w)
    circuits = []
    for support, ws in sorted(by_support.items()):
        rel = ws[0].relation
        if any(w.relation != rel for w in ws):
            raise SurgeryError(f"inconsistent relations on circuit {list(support)}")
        pos = tuple(i for i in support if rel[i] > 0)
        neg = tuple(i for i in support if rel[i] < 0)
        if sorted(abs(rel[i]) for i in support) != [1, 1, 1, 1, 1] or {
            len(pos),
            len(neg),
        } != {2, 3}:
            raise SurgeryError(
                f"circuit {list(support)} with relation {list(rel)} is not the "
                "flippable five-ray unit pattern"
            )
        if len(ws) != (3 if len(pos) == 3 else 1):
            raise SurgeryError(
                f"circuit {list(support)} has {len(ws)} walls on the ray, "
                "inconsistent with its orientation"
            )
        circuits.append(FlipCircuit(support, pos, neg))
    for a, b in combinations(circuits, 2):
        if set(a.support) & set(b.support):
            raise SurgeryError("flip circuits are not disjoint")
    return circuits


def flip(
    X: ToricVariety,
    curve: Union[CurveClass, Sequence[int]],
    name: Optional[str] = None,
) -> tuple[ToricVariety, list[FlipCircuit]]:
    """Bistellar exchange on every circuit of a small extremal class."""
    circuits = flip_circuits(X, curve)
    cones = set(X.fan.max_cones)
    for circ in circuits:
        old = {
            tuple(sorted(set(circ.support) - {p})) for p in circ.positive
        }
        new = {
            tuple(sorted(set(circ.support) - {m})) for m in circ.negative
        }
        if not old <= cones:
            missing = sorted(old - cones)
            raise SurgeryError(
                f"fan does not contain the cones {missing} of circuit {list(circ.support)}"
            )
        cones = (cones - old) | new
    new_fan = Fan.make(X.dim, [list(r) for r in X.fan.rays], sorted(cones))
    return (
        ToricVariety(new_fan, name=name or (X.name or "X") + "+flip"),
        circuits,
    )


# -- extremal rays and contraction types -------------------------------


@dataclass(frozen=True)
class ContractionDescriptor:
    kind: str  # fiber_type | divisorial | small
    type_label: Optional[str]
    exc_rays: tuple[int, ...]
    image_dim: int
    center: Optional[tuple[int, ...]] = None
    flippable: bool = False
    relation_sample: IntVec = ()

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "type_label": self.type_label,
            "exc_rays": list(self.exc_rays),
            "image_dim": self.image_dim,
            "center": list(self.center) if self.center else None,
            "flippable": self.flippable,
        }


def ne_cone(X: ToricVariety) -> RationalCone:
    """Cone of effective curves, generated by the wall classes."""
    return RationalCone.from_generators(
        [w.curve_class.coords for w in X.walls], X.rho
    )


def divisor_link_fan(X: ToricVariety, ray_index: int) -> Fan:
    """The fan of the invariant divisor D_r: the star of the ray
    projected along it."""
    fan = X.fan
    u = fan.rays[ray_index]
    w = solve_integer([list(u)], [1])
    assert w is not None
    basis = integer_kernel(transpose([list(w)]))
    assert len(basis) == fan.dim - 1

    def project(x: Sequence[int]) -> IntVec:
        shift = [x[t] - sum(w[s] * x[s] for s in range(fan.dim)) * u[t] for t in range(fan.dim)]
        coords = solve_rational(transpose([list(b) for b in basis]), shift)
        assert coords is not None and all(f.denominator == 1 for f in coords)
        return tuple(int(f) for f in coords)

    link_rays: list[IntVec] = []
    index_map: dict[int, int] = {}
    cones = []
    for c in fan.max_cones:
        if ray_index not in c:
            continue
        quotient_cone = []
        for i in c:
            if i == ray_index:
                continue
            if i not in index_map:
                index_map[i] = len(link_rays)
                link_rays.append(primitive_vector(project(fan.rays[i])))
            quotient_cone.append(index_map[i])
        cones.append(sorted(quotient_cone))
    return Fan.make(fan.dim - 1, [list(r) for r in link_rays], cones)


def looks_like_quadric_cone(fan3: Fan) -> bool:
    """Shape test for (a simplicial subdivision of) the projective cone
    over a smooth 2-dimensional quadric: exactly five rays, four of
    which, say a, b, c, d, satisfy a + b = c + d and support the
    doubled vertex chart, all other cones unimodular.

    No smooth 4-fold fan produces this link (orbit closures of smooth
    toric varieties are smooth), so on validated input the test is a
    certificate that can only fail; it is exercised directly in tests.
    """
    if fan3.dim != 3 or fan3.n_rays != 5:
        return False
    for quad in combinations(range(5), 4):
        rays = [fan3.rays[i] for i in quad]
        for pairing in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)):
            a, b, c, d = (rays[k] for k in pairing)
            if all(a[t] + b[t] == c[t] + d[t] for t in range(3)):
                return True
    return False


def _analyze_walls_on_ray(X: ToricVariety, walls_on_ray: list[Wall]) -> ContractionDescriptor:
    rel_sample = walls_on_ray[0].relation
    negatives = [w.negative_rays for w in walls_on_ray]
    positives = [w.positive_rays for w in walls_on_ray]
    if all(len(n) == 0 for n in negatives):
        fiber_dim = min(len(p) for p in positives) - 1
        return ContractionDescriptor(
            kind="fiber_type",
            type_label=None,
            exc_rays=(),
            image_dim=X.dim - fiber_dim,
            relation_sample=rel_sample,
        )
    if all(len(n) == 1 for n in negatives):
        rs = {n[0] for n in negatives}
        if len(rs) != 1:
            raise SurgeryError(
                "divisorial extremal ray with inconsistent exceptional rays "
                f"{sorted(rs)}"
            )
        r = rs.pop()
        relations = {w.relation for w in walls_on_ray}
        smooth_pattern = (
            len(relations) == 1
            and all(c in (-1, 0, 1) for c in rel_sample)
        )
        if smooth_pattern:
            center = walls_on_ray[0].positive_rays
            try:
                contract(X, r, center=center)
                m = X.dim - len(center)
                return ContractionDescriptor(
                    kind="divisorial",
                    type_label=f"(3,{m})^sm",
                    exc_rays=(r,),
                    image_dim=m,
                    center=center,
                    relation_sample=rel_sample,
                )
            except SurgeryError:
                pass
        image_dim = X.dim - min(len(p) for p in positives)
        if image_dim == 2:
            label = "(3,2)"
        elif image_dim == 0:
            label = (
                "(3,0)^Q"
                if looks_like_quadric_cone(divisor_link_fan(X, r))
                else "(3,0)_other"
            )
        else:
            label = None
        return ContractionDescriptor(
            kind="divisorial",
            type_label=label,
            exc_rays=(r,),
            image_dim=image_dim,
            relation_sample=rel_sample,
        )
    if all(len(n) >= 2 for n in negatives):
        exc = tuple(sorted({i for n in negatives for i in n}))
        flippable = True
        for w in walls_on_ray:
            pos, neg = w.positive_rays, w.negative_rays
            if (
                sorted(abs(c) for c in w.relation if c) != [1, 1, 1, 1, 1]
                or {len(pos), len(neg)} != {2, 3}
            ):
                flippable = False
        return ContractionDescriptor(
            kind="small",
            type_label=None,
            exc_rays=exc,
            image_dim=0,
            flippable=flippable,
            relation_sample=rel_sample,
        )
    raise SurgeryError(
        "extremal ray mixes divisorial and small wall patterns; "
        f"sample relation {list(rel_sample)}"
    )


def extremal_rays(X: ToricVariety) -> list[tuple[CurveClass, ContractionDescriptor]]:
    """Extremal rays of the cone of curves with their contraction data."""
    _require_4fold(X)
    ne = ne_cone(X)
    if ne.dim < X.rho:
        raise SurgeryError("cone of curves is not full-dimensional")
    nef = ne.dual()
    if nef.dim < X.rho:
        raise SurgeryError("fan is not projective: nef cone has empty interior")
    out = []
    for g in ne.generators:
        ws = [w for w in X.walls if _proportional_positive(w.curve_class.coords, g)]
        if not ws:
            raise SurgeryError(f"extremal class {g} carries no wall")
        out.append((CurveClass(g), _analyze_walls_on_ray(X, ws)))
    return out


def anticanonical_wall_degrees(X: ToricVariety) -> dict[Wall, int]:
    return {w: w.degK for w in X.walls}
