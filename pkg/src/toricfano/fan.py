"""Simplicial fans: the combinatorial skeleton of a toric variety.

A ``Fan`` is a list of primitive ray generators plus maximal cones given
as index sets.  Validation checks, in order: structural sanity,
primitivity of the rays, unimodularity of every maximal cone
(smoothness), pairwise intersection in common faces, and completeness
(every facet of a maximal cone is shared by exactly one other maximal
cone, and the facet-adjacency graph is connected).

The JSON wire format is
``{"dim": n, "rays": [[int,...],...], "max_cones": [[indices],...]}``
with 0-based indices and an optional ``"labels"`` object mapping ray
indices to names.  Emission is canonical: cone index lists sorted,
cones sorted lexicographically, keys sorted.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Optional, Sequence

from .lattice import det_int, primitive_vector, solve_rational, vector_gcd

IntVec = tuple[int, ...]


class ValidationError(ValueError):
    """Raised when an operation requires a fan invariant that fails."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def raise_if_failed(self) -> None:
        if not self.ok:
            msgs = "; ".join(f"{c.name}: {c.detail}" for c in self.failures())
            raise ValidationError(msgs)

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }


@dataclass(frozen=True)
class Fan:
    dim: int
    rays: tuple[IntVec, ...]
    max_cones: tuple[tuple[int, ...], ...]
    labels: Optional[tuple[Optional[str], ...]] = field(default=None, compare=False)

    @staticmethod
    def make(
        dim: int,
        rays: Sequence[Sequence[int]],
        max_cones: Sequence[Sequence[int]],
        labels: Optional[dict[int, str]] = None,
    ) -> "Fan":
        rays_t = tuple(tuple(int(x) for x in r) for r in rays)
        cones_t = tuple(sorted(tuple(sorted(int(i) for i in c)) for c in max_cones))
        labels_t = None
        if labels:
            labels_t = tuple(labels.get(i) for i in range(len(rays_t)))
        return Fan(dim, rays_t, cones_t, labels_t)

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    def ray_label(self, i: int) -> str:
        if self.labels and self.labels[i]:
            return self.labels[i]
        return f"u{i}"

    def cone_rays(self, cone: Sequence[int]) -> list[IntVec]:
        return [self.rays[i] for i in cone]

    def has_cone(self, indices: Sequence[int]) -> bool:
        want = set(indices)
        return any(want <= set(c) for c in self.max_cones)

    def facets(self) -> dict[tuple[int, ...], list[tuple[int, ...]]]:
        """Map facet index-set -> list of maximal cones containing it."""
        out: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
        for c in self.max_cones:
            for drop in c:
                facet = tuple(i for i in c if i != drop)
                out.setdefault(facet, []).append(c)
        return out

    def canonical_key(self) -> tuple:
        return (self.dim, self.rays, self.max_cones)

    def content_hash(self) -> str:
        return hashlib.sha256(fan_to_json(self).encode()).hexdigest()[:16]

    def __repr__(self) -> str:  # pragma: no cover
        return f"Fan(dim={self.dim}, rays={self.n_rays}, max_cones={len(self.max_cones)})"


def fan_to_json(fan: Fan, provenance: Optional[str] = None) -> str:
    obj: dict = {
        "dim": fan.dim,
        "rays": [list(r) for r in fan.rays],
        "max_cones": [sorted(c) for c in sorted(fan.max_cones)],
    }
    if fan.labels and any(fan.labels):
        obj["labels"] = {
            str(i): lab for i, lab in enumerate(fan.labels) if lab is not None
        }
    if provenance:
        obj["provenance"] = provenance
    return json.dumps(obj, sort_keys=True)


def fan_from_json(text: str) -> Fan:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"invalid JSON: {e}") from None
    for key in ("dim", "rays", "max_cones"):
        if key not in obj:
            raise ValidationError(f"missing required field {key!r}")
    dim = obj["dim"]
    rays = obj["rays"]
    cones = obj["max_cones"]

    def _is_int(x) -> bool:
        return isinstance(x, int) and not isinstance(x, bool)

    if not _is_int(dim) or dim < 1:
        raise ValidationError("field 'dim' must be a positive integer")
    if not isinstance(rays, list) or not rays:
        raise ValidationError("field 'rays' must be a nonempty list")
    for i, r in enumerate(rays):
        if not isinstance(r, list) or len(r) != dim or not all(_is_int(x) for x in r):
            raise ValidationError(f"ray {i} must be a list of {dim} integers")
    if not isinstance(cones, list) or not cones:
        raise ValidationError("field 'max_cones' must be a nonempty list")
    for k, c in enumerate(cones):
        if not isinstance(c, list) or not all(_is_int(i) for i in c):
            raise ValidationError(f"max cone {k} must be a list of ray indices")
        if any(i < 0 or i >= len(rays) for i in c):
            raise ValidationError(f"max cone {k} has a ray index out of range")
    labels = None
    if "labels" in obj and obj["labels"]:
        labels = {}
        for key, val in obj["labels"].items():
            try:
                idx = int(key)
            except ValueError:
                raise ValidationError(f"label key {key!r} is not a ray index") from None
            if idx < 0 or idx >= len(rays):
                raise ValidationError(f"label key {key!r} out of range")
            labels[idx] = str(val)
    return Fan.make(dim, rays, cones, labels)


def _structural_check(fan: Fan) -> Optional[str]:
    if fan.dim < 1:
        return "dimension must be positive"
    if not fan.rays:
        return "no rays"
    if any(len(r) != fan.dim for r in fan.rays):
        return "ray of wrong dimension"
    if any(all(x == 0 for x in r) for r in fan.rays):
        return "zero ray"
    if len(set(fan.rays)) != len(fan.rays):
        dup = next(r for r in fan.rays if fan.rays.count(r) > 1)
        return f"duplicate ray {list(dup)}"
    if not fan.max_cones:
        return "no maximal cones"
    for c in fan.max_cones:
        if len(c) != fan.dim:
            return f"cone {list(c)} is not {fan.dim}-dimensional (not simplicial full-dim)"
        if len(set(c)) != len(c):
            return f"cone {list(c)} has repeated rays"
        if any(i < 0 or i >= fan.n_rays for i in c):
            return f"cone {list(c)} has an out-of-range index"
    if len(set(fan.max_cones)) != len(fan.max_cones):
        return "duplicate maximal cone"
    used = {i for c in fan.max_cones for i in c}
    if used != set(range(fan.n_rays)):
        missing = sorted(set(range(fan.n_rays)) - used)
        return f"rays {missing} not used by any maximal cone"
    return None


def _cone_inward_normals(fan: Fan, cone: Sequence[int]) -> list[IntVec]:
    """Rows g_i with g_i . u_j = delta_ij over the cone's rays.

    Integer because maximal cones are unimodular; the i-th row is the
    inward normal of the facet obtained by dropping ray i.
    """
    mat = [list(fan.rays[i]) for i in cone]
    rows = []
    for k in range(len(cone)):
        rhs = [1 if t == k else 0 for t in range(len(cone))]
        sol = solve_rational(mat, rhs)
        assert sol is not None
        rows.append(primitive_vector(sol))
    return rows


def _pair_intersects_in_common_face(
    fan: Fan, c1: tuple[int, ...], c2: tuple[int, ...], normals: dict
) -> bool:
    shared = sorted(set(c1) & set(c2))
    for cone, other in ((c1, c2), (c2, c1)):
        rows = normals[cone]
        idx = {r: k for k, r in enumerate(cone)}
        h = [0] * fan.dim
        for r in cone:
            if r not in shared:
                row = rows[idx[r]]
                h = [a + b for a, b in zip(h, row)]
        # h >= 0 on `cone`, tight exactly on the shared rays there.
        if all(
            sum(h[t] * fan.rays[j][t] for t in range(fan.dim)) < 0
            for j in other
            if j not in shared
        ):
            return True
    # Fall back to an exact double-description intersection.
    from .cones import RationalCone

    inter = RationalCone.from_inequalities(
        list(normals[c1]) + list(normals[c2]), fan.dim
    )
    expected = RationalCone.from_generators(
        [fan.rays[i] for i in shared], fan.dim
    )
    return inter == expected


@lru_cache(maxsize=None)
def validate(fan: Fan) -> ValidationReport:
    """Full validation: structure, primitivity, smoothness,
    face-compatibility, completeness."""
    checks: list[CheckResult] = []

    structural = _structural_check(fan)
    checks.append(
        CheckResult("structure", structural is None, structural or "")
    )
    if structural is not None:
        return ValidationReport(tuple(checks))

    bad_prim = [
        i for i, r in enumerate(fan.rays) if vector_gcd(r) != 1
    ]
    checks.append(
        CheckResult(
            "primitivity",
            not bad_prim,
            "" if not bad_prim else f"ray {bad_prim[0]} = {list(fan.rays[bad_prim[0]])} is not primitive",
        )
    )

    non_unimodular = []
    for c in fan.max_cones:
        d = det_int([list(fan.rays[i]) for i in c])
        if abs(d) != 1:
            non_unimodular.append((c, d))
    checks.append(
        CheckResult(
            "smoothness",
            not non_unimodular,
            ""
            if not non_unimodular
            else f"cone {list(non_unimodular[0][0])} has |det| = {abs(non_unimodular[0][1])}",
        )
    )
    if non_unimodular or bad_prim:
        simplicial_ok = all(
            det_int([list(fan.rays[i]) for i in c]) != 0 for c in fan.max_cones
        )
        if not simplicial_ok:
            checks.append(
                CheckResult("face_compatibility", False, "a maximal cone is degenerate")
            )
            return ValidationReport(tuple(checks))

    normals = {c: _cone_inward_normals(fan, c) for c in fan.max_cones}

    bad_pair = None
    for c1, c2 in combinations(fan.max_cones, 2):
        if not _pair_intersects_in_common_face(fan, c1, c2, normals):
            bad_pair = (c1, c2)
            break
    checks.append(
        CheckResult(
            "face_compatibility",
            bad_pair is None,
            ""
            if bad_pair is None
            else f"cones {list(bad_pair[0])} and {list(bad_pair[1])} do not meet in a common face",
        )
    )
    if bad_pair is not None:
        return ValidationReport(tuple(checks))

    facet_map = fan.facets()
    bad_facet = next(
        ((f, len(cs)) for f, cs in facet_map.items() if len(cs) != 2), None
    )
    connected = True
    if bad_facet is None and fan.max_cones:
        adj: dict[tuple[int, ...], set[tuple[int, ...]]] = {
            c: set() for c in fan.max_cones
        }
        for cs in facet_map.values():
            adj[cs[0]].add(cs[1])
            adj[cs[1]].add(cs[0])
        seen = {fan.max_cones[0]}
        stack = [fan.max_cones[0]]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        connected = len(seen) == len(fan.max_cones)
    checks.append(
        CheckResult(
            "completeness",
            bad_facet is None and connected,
            ""
            if bad_facet is None and connected
            else (
                f"facet {list(bad_facet[0])} lies in {bad_facet[1]} maximal cones"
                if bad_facet is not None
                else "facet-adjacency graph is disconnected"
            ),
        )
    )
    return ValidationReport(tuple(checks))


def validated(fan: Fan, *, allow_singular: bool = False) -> ValidationReport:
    """Validate and raise unless the fan passes (smoothness optionally waived)."""
    report = validate(fan)
    if report.ok:
        return report
    if allow_singular and all(
        c.passed for c in report.checks if c.name != "smoothness"
    ):
        return report
    report.raise_if_failed()
    return report
