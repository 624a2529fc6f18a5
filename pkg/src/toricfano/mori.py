"""Global cone analysis: Nef/Mov/Eff and their curve-side duals, fixed
prime divisors and their types, divisor-directed MMP runs, the
Lefschetz defect, Picard-bound consistency assertions, and the chamber
decomposition of the movable cone.

Divisor-directed MMP.  Steps are flips of negative small extremal rays
and negative divisorial contractions, until the transform of the
divisor is nef or a negative fiber-type ray appears.  The default
policy picks the most negative ray (ties by smallest wall index), which
makes traces reproducible; the exhaustive mode enumerates every choice
sequence and is how ambiguity of the terminal contraction type is
detected on low Picard numbers.

Chambers.  Full-dimensional chambers of the movable cone are the nef
cones of the small modifications of X; enumeration walks the interior
facets by flips, and each discovered model is independently
reconstructed from a chamber-interior weight through the regular
triangulation it selects (the Gale-dual membership test), which guards
the surgery route with the secondary-fan route.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence, Union

from .cones import RationalCone
from .fan import Fan
from .lattice import det_int, dot, rational_rank
from .ledger import LedgerState
from .surgery import (
    ContractionDescriptor,
    SurgeryError,
    contract,
    extremal_rays,
    flip,
    ne_cone,
)
from .variety import CurveClass, DivisorClass, ToricVariety

IntVec = tuple[int, ...]


class MoriError(ValueError):
    pass


class InternalCheckError(MoriError):
    """A cross-check that can only fail on an engine bug failed."""


# -- cone suite -------------------------------------------------------


@dataclass(frozen=True)
class ConeSuite:
    nef: RationalCone
    mov: RationalCone
    eff: RationalCone
    ne: RationalCone
    mov_curves: RationalCone

    def as_dict(self) -> dict:
        def cone_dict(c: RationalCone) -> dict:
            return {
                "generators": [list(g) for g in c.generators],
                "facet_normals": [list(n) for n in c.facet_normals],
            }

        return {
            "nef": cone_dict(self.nef),
            "mov": cone_dict(self.mov),
            "eff": cone_dict(self.eff),
            "ne": cone_dict(self.ne),
            "mov_curves": cone_dict(self.mov_curves),
        }


def cone_suite(X: ToricVariety) -> ConeSuite:
    """All five cones, with the duality and chain identities checked."""
    ne = ne_cone(X)
    nef = ne.dual()
    if nef.dim < X.rho:
        raise MoriError("fan is not projective: nef cone has empty interior")
    classes = [X.ray_divisor_class(i).coords for i in range(X.n_rays)]
    eff = RationalCone.from_generators(classes, X.rho)
    mov = eff
    for i in range(X.n_rays):
        others = [c for j, c in enumerate(classes) if j != i]
        mov = mov.intersect(RationalCone.from_generators(others, X.rho))
    mov_curves = eff.dual()
    if nef.dual() != ne:
        raise InternalCheckError("duality failure: dual(Nef) != NE")
    if eff.dual() != mov_curves:
        raise InternalCheckError("duality failure: dual(Eff) != mov")
    if not mov.contains_cone(nef) or not eff.contains_cone(mov):
        raise InternalCheckError("cone chain Nef <= Mov <= Eff violated")
    return ConeSuite(nef=nef, mov=mov, eff=eff, ne=ne, mov_curves=mov_curves)


# -- MMP for a divisor -------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    move: str  # "flip" | "contraction"
    curve_class: CurveClass
    descriptor: ContractionDescriptor
    fan_before: Fan
    fan_after: Fan
    ledger_before: Optional[LedgerState]
    ledger_after: Optional[LedgerState]
    divisor_before: IntVec
    divisor_after: IntVec
    circuit_count: int = 0


@dataclass(frozen=True)
class BirationalTrace:
    start: Fan
    divisor: IntVec
    steps: tuple[TraceStep, ...]
    outcome: str  # "nef" | "contracted" | "fiber_type"
    final: Fan

    @property
    def terminal_descriptor(self) -> Optional[ContractionDescriptor]:
        return self.steps[-1].descriptor if self.steps else None

    @property
    def flip_count(self) -> int:
        return sum(1 for s in self.steps if s.move == "flip")


def _divisor_vector(X: ToricVariety, divisor: Union[int, Sequence]) -> tuple:
    if isinstance(divisor, int):
        vec = [0] * X.n_rays
        vec[divisor] = 1
        return tuple(vec)
    if isinstance(divisor, DivisorClass):
        return tuple(X.lift(divisor))
    vec = tuple(divisor)
    if len(vec) != X.n_rays:
        raise MoriError("divisor coefficient vector has wrong length")
    return vec


def _safe_ledger(X: ToricVariety) -> Optional[LedgerState]:
    if not X.is_smooth:
        return None
    return X.ledger_state()


def _negative_candidates(X: ToricVariety, vec) -> list[tuple]:
    """D-negative extremal rays sorted by the default policy: most
    negative pairing first, ties by smallest wall index."""
    coords = X.divisor_class(vec).coords
    wall_index = {w: i for i, w in enumerate(X.walls)}
    out = []
    for c, desc in extremal_rays(X):
        pairing = dot(coords, c.coords)
        if pairing < 0:
            first_wall = min(
                wall_index[w]
                for w in X.walls
                if _same_ray(w.curve_class.coords, c.coords)
            )
            out.append((pairing, first_wall, c, desc))
    out.sort(key=lambda t: (t[0], t[1]))
    return out


def _same_ray(a: Sequence[int], b: Sequence[int]) -> bool:
    from .lattice import primitive_vector

    if all(x == 0 for x in a) or all(x == 0 for x in b):
        return False
    return primitive_vector(a) == primitive_vector(b)


def _apply_step(
    X: ToricVariety, vec, c: CurveClass, desc: ContractionDescriptor
) -> tuple[TraceStep, Optional[ToricVariety], Optional[tuple]]:
    """Execute one MMP step; returns (step, next variety, next divisor)."""
    lb = _safe_ledger(X)
    if desc.kind == "small":
        if not desc.flippable:
            raise MoriError(
                f"negative small ray with non-flippable circuit {list(desc.relation_sample)}"
            )
        X2, circuits = flip(X, c)
        step = TraceStep(
            move="flip",
            curve_class=c,
            descriptor=desc,
            fan_before=X.fan,
            fan_after=X2.fan,
            ledger_before=lb,
            ledger_after=_safe_ledger(X2),
            divisor_before=tuple(vec),
            divisor_after=tuple(vec),
            circuit_count=len(circuits),
        )
        return step, X2, tuple(vec)
    if desc.kind == "divisorial":
        r = desc.exc_rays[0]
        X2 = contract(X, r, center=desc.center, allow_singular=True)
        vec2 = tuple(x for i, x in enumerate(vec) if i != r)
        step = TraceStep(
            move="contraction",
            curve_class=c,
            descriptor=desc,
            fan_before=X.fan,
            fan_after=X2.fan,
            ledger_before=lb,
            ledger_after=_safe_ledger(X2),
            divisor_before=tuple(vec),
            divisor_after=vec2,
        )
        return step, X2, vec2
    raise MoriError("fiber-type ray cannot be executed as a birational step")


def mmp_for_divisor(
    X: ToricVariety, divisor: Union[int, Sequence], *, max_steps: int = 64
) -> BirationalTrace:
    """Run the divisor-directed MMP with the default tie-break policy."""
    vec = _divisor_vector(X, divisor)
    start = X.fan
    steps: list[TraceStep] = []
    current, cvec = X, vec
    for _ in range(max_steps):
        if not current.is_smooth:
            break
        if all(x == 0 for x in cvec):
            return BirationalTrace(start, vec, tuple(steps), "contracted", current.fan)
        candidates = _negative_candidates(current, cvec)
        if not candidates:
            return BirationalTrace(start, vec, tuple(steps), "nef", current.fan)
        fiber = next((t for t in candidates if t[3].kind == "fiber_type"), None)
        if fiber is not None:
            return BirationalTrace(start, vec, tuple(steps), "fiber_type", current.fan)
        _, _, c, desc = candidates[0]
        step, current, cvec = _apply_step(current, cvec, c, desc)
        steps.append(step)
    else:
        raise MoriError(
            f"MMP did not terminate in {max_steps} steps; this signals a surgery bug"
        )
    # Landed on a flagged singular model: terminal contraction recorded.
    return BirationalTrace(start, vec, tuple(steps), "contracted", steps[-1].fan_after)


def mmp_all_for_divisor(
    X: ToricVariety, divisor: Union[int, Sequence], *, max_steps: int = 64
) -> list[BirationalTrace]:
    """Exhaustive MMP enumeration over every negative-ray choice order."""
    vec = _divisor_vector(X, divisor)
    start = X.fan
    out: list[BirationalTrace] = []

    def walk(current: ToricVariety, cvec, steps: tuple, depth: int):
        if depth > max_steps:
            raise MoriError("exhaustive MMP exceeded the step cap")
        if not current.is_smooth or all(x == 0 for x in cvec):
            out.append(BirationalTrace(start, vec, steps, "contracted", current.fan))
            return
        candidates = _negative_candidates(current, cvec)
        if not candidates:
            out.append(BirationalTrace(start, vec, steps, "nef", current.fan))
            return
        fiber = next((t for t in candidates if t[3].kind == "fiber_type"), None)
        if fiber is not None:
            out.append(BirationalTrace(start, vec, steps, "fiber_type", current.fan))
            return
        for _, _, c, desc in candidates:
            step, nxt, nvec = _apply_step(current, cvec, c, desc)
            walk(nxt, nvec, steps + (step,), depth + 1)

    walk(X, vec, (), 0)
    # Deduplicate by terminal data.
    seen = {}
    for tr in out:
        desc = tr.terminal_descriptor
        key = (
            tr.outcome,
            desc.type_label if desc else None,
            tr.final.canonical_key(),
        )
        seen.setdefault(key, tr)
    return list(seen.values())


# -- fixed prime divisors ----------------------------------------------


@dataclass(frozen=True)
class FixedDivisorReport:
    ray_index: int
    divisor_class: DivisorClass
    type_label: Optional[str] = None
    outcomes: tuple[str, ...] = ()
    mmp_trace: Optional[BirationalTrace] = None
    C_D: Optional[CurveClass] = None
    pairing_D_CD: Optional[int] = None
    degK_CD: Optional[int] = None

    def as_dict(self) -> dict:
        return {
            "ray_index": self.ray_index,
            "class": [str(c) for c in self.divisor_class.coords],
            "type_label": self.type_label,
            "outcomes": list(self.outcomes),
            "pairing_D_CD": self.pairing_D_CD,
            "degK_CD": self.degK_CD,
        }


def fixed_prime_divisors(X: ToricVariety) -> list[FixedDivisorReport]:
    """Invariant prime divisors whose class spans a one-dimensional face
    of the effective cone not contained in the movable cone."""
    suite = cone_suite(X)
    reports = []
    for g in suite.eff.generators:
        if suite.mov.contains(g):
            continue
        matches = [
            i
            for i in range(X.n_rays)
            if _same_ray(X.ray_divisor_class(i).coords, g)
        ]
        if len(matches) != 1:
            raise InternalCheckError(
                f"effective face {g} carried by {len(matches)} invariant divisors"
            )
        i = matches[0]
        reports.append(
            FixedDivisorReport(ray_index=i, divisor_class=X.ray_divisor_class(i))
        )
    return sorted(reports, key=lambda r: r.ray_index)


def classify_fixed_divisor(
    X: ToricVariety, report: FixedDivisorReport, *, max_steps: int = 64
) -> FixedDivisorReport:
    """Assign the contraction type of a fixed prime divisor.

    The default-policy MMP supplies the distinguished curve moving in
    the divisor (the wall curve of the terminal contraction, whose
    class is unchanged by the preceding flips); exhaustive enumeration
    decides uniqueness, and differing outcomes on low Picard number are
    reported as ambiguous.
    """
    r = report.ray_index
    default = mmp_for_divisor(X, r, max_steps=max_steps)
    if default.outcome != "contracted" or not default.steps:
        raise MoriError(f"divisor of ray {r} is not fixed: MMP ended {default.outcome}")
    traces = mmp_all_for_divisor(X, r, max_steps=max_steps)
    labels = sorted(
        {
            (t.terminal_descriptor.type_label or "undetermined")
            for t in traces
            if t.outcome == "contracted" and t.terminal_descriptor is not None
        }
    )
    if len(labels) == 1:
        label = labels[0]
    else:
        label = "ambiguous(" + ", ".join(labels) + ")"
    if X.rho >= 6 and len(labels) > 1:
        raise InternalCheckError(
            f"rho = {X.rho} >= 6 but the MMP outcome is not unique: {labels}"
        )
    terminal = default.steps[-1]
    c_d = terminal.curve_class
    pairing = dot(X.ray_divisor_class(r).coords, c_d.coords)
    degk = dot(X.anticanonical_class.coords, c_d.coords)
    return FixedDivisorReport(
        ray_index=r,
        divisor_class=report.divisor_class,
        type_label=label,
        outcomes=tuple(labels),
        mmp_trace=default,
        C_D=c_d,
        pairing_D_CD=pairing,
        degK_CD=degk,
    )


def classified_fixed_divisors(X: ToricVariety, **kw) -> list[FixedDivisorReport]:
    return [classify_fixed_divisor(X, rep, **kw) for rep in fixed_prime_divisors(X)]


# -- Lefschetz defect --------------------------------------------------


def lefschetz_defect(X: ToricVariety) -> tuple[int, int]:
    """(delta, witness ray index).

    delta is the maximum over invariant prime divisors D of the
    codimension of the span of the wall-curve classes inside D; for
    toric varieties the maximum over invariant divisors computes the
    defect over all prime divisors.
    """
    delta, witness = -1, -1
    for i in range(X.n_rays):
        classes = [
            list(w.curve_class.coords) for w in X.walls if i in w.shared
        ]
        codim = X.rho - rational_rank(classes)
        if codim > delta:
            delta, witness = codim, i
    return delta, witness


def lefschetz_witnesses(X: ToricVariety) -> list[int]:
    delta, _ = lefschetz_defect(X)
    out = []
    for i in range(X.n_rays):
        classes = [list(w.curve_class.coords) for w in X.walls if i in w.shared]
        if X.rho - rational_rank(classes) == delta:
            out.append(i)
    return out


# -- bound assertions --------------------------------------------------


def verify_bounds(X: ToricVariety) -> list[tuple[str, bool]]:
    """Consistency assertions for the Picard-number bounds; a violation
    signals an engine bug, never new mathematics."""
    delta, _ = lefschetz_defect(X)
    rho = X.rho
    has_fiber = any(d.kind == "fiber_type" for _, d in extremal_rays(X))
    claims = [
        ("delta = 3 implies rho <= 6", delta != 3 or rho <= 6),
        ("delta = 2 implies rho <= 12", delta != 2 or rho <= 12),
        (
            "elementary fiber-type contraction implies rho <= 11",
            not has_fiber or rho <= 11,
        ),
    ]
    return claims


# -- Mori chamber decomposition ----------------------------------------


@dataclass
class ChamberFan:
    mov: RationalCone
    chambers: list[RationalCone]
    fans: list[Fan]
    adjacency: list[tuple[int, int, IntVec]]
    excluded: list[str] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.chambers)

    def as_dict(self) -> dict:
        return {
            "chamber_count": self.count,
            "nodes": [f.content_hash() for f in self.fans],
            "edges": [
                {"from": self.fans[i].content_hash(), "to": self.fans[j].content_hash(),
                 "flipped_class": list(c)}
                for i, j, c in self.adjacency
            ],
            "excluded": self.excluded,
        }


def _triangulation_from_weight(X: ToricVariety, w: Sequence[int]) -> frozenset:
    """The regular triangulation selected by a weight in the movable
    cone: a maximal cone survives exactly when the weight lies in the
    cone spanned by the classes of the complementary rays."""
    classes = [X.ray_divisor_class(i).coords for i in range(X.n_rays)]
    cones = set()
    for sigma in combinations(range(X.n_rays), X.dim):
        if det_int([list(X.fan.rays[i]) for i in sigma]) == 0:
            continue
        complement = [classes[j] for j in range(X.n_rays) if j not in sigma]
        if RationalCone.from_generators(complement, X.rho).contains(w):
            cones.add(tuple(sigma))
    return frozenset(cones)


def mori_chambers(X: ToricVariety, *, max_chambers: int = 512) -> ChamberFan:
    """Chambers of the movable cone with their small modifications.

    Walks interior facets by flips; every discovered model is
    cross-checked by reconstructing its triangulation from a
    chamber-interior weight.  Non-flippable interior walls are reported
    and excluded (they lead to models outside the simplicial category).
    """
    suite = cone_suite(X)
    start_key = X.fan.canonical_key()
    nodes: dict[tuple, ToricVariety] = {start_key: X}
    chambers: dict[tuple, RationalCone] = {}
    adjacency: list[tuple[int, int, IntVec]] = []
    excluded: list[str] = []
    order: list[tuple] = [start_key]
    frontier = [X]
    while frontier:
        nxt = []
        for node in frontier:
            key = node.fan.canonical_key()
            nef = ne_cone(node).dual()
            chambers[key] = nef
            weight = nef.interior_point()
            reconstructed = _triangulation_from_weight(node, weight)
            if reconstructed != frozenset(node.fan.max_cones):
                raise InternalCheckError(
                    "weight-selected triangulation disagrees with the fan of its chamber"
                )
            for c, desc in extremal_rays(node):
                if desc.kind != "small":
                    continue
                if not desc.flippable:
                    excluded.append(
                        f"non-flippable small ray {list(c.coords)} on {node.fan.content_hash()}"
                    )
                    continue
                try:
                    flipped, _ = flip(node, c)
                except SurgeryError as e:
                    excluded.append(str(e))
                    continue
                fkey = flipped.fan.canonical_key()
                if fkey not in nodes:
                    if len(nodes) >= max_chambers:
                        raise MoriError("chamber enumeration exceeded the cap")
                    nodes[fkey] = flipped
                    order.append(fkey)
                    nxt.append(flipped)
                i, j = order.index(key), order.index(fkey)
                if (j, i) not in {(a, b) for a, b, _ in adjacency}:
                    adjacency.append((i, j, c.coords))
        frontier = nxt
    fans = [nodes[k].fan for k in order]
    chamber_list = [chambers[k] for k in order]
    for a, b in combinations(range(len(chamber_list)), 2):
        inter = chamber_list[a].intersect(chamber_list[b])
        if inter.dim >= X.rho:
            raise InternalCheckError("chamber interiors overlap")
    for ch in chamber_list:
        if not suite.mov.contains_cone(ch):
            raise InternalCheckError("chamber escapes the movable cone")
    if not excluded:
        # Coverage: with disjoint interiors, the union is all of Mov iff
        # no chamber has a free interior facet.
        for ch in chamber_list:
            for facet in ch.faces_of_dim(X.rho - 1):
                p = facet.interior_point()
                if not suite.mov.contains_in_relative_interior(p):
                    continue
                if not any(
                    other is not ch and other.contains(p) for other in chamber_list
                ):
                    raise InternalCheckError(
                        "movable cone not covered: facet point "
                        f"{list(p)} belongs to a single chamber"
                    )
    else:
        excluded.append("coverage of the movable cone not verified (walls excluded)")
    return ChamberFan(
        mov=suite.mov,
        chambers=chamber_list,
        fans=fans,
        adjacency=adjacency,
        excluded=excluded,
    )
