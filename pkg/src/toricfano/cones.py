"""Exact convex polyhedral cones with dual descriptions.

A cone is stored with both its extreme-ray generators and its inward
facet normals, each scaled to primitive integer vectors and sorted, so
cone equality is plain tuple comparison.  The facet-normal list is
itself the canonical generator list of the dual cone, which makes
``dual`` an O(1) swap of the two descriptions.

Non-pointed cones are supported: the lineality space appears among the
generators as +/- pairs (canonically, the HNF basis of the lineality
lattice), and the pointed part is recorded by the extreme rays of the
cone intersected with the orthogonal complement of the lineality.

The V <-> H conversion is Motzkin-style double description with the
algebraic (rank-based) adjacency test; exact over Z throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .lattice import (
    dot,
    integer_kernel,
    primitive_vector,
    rational_rank,
    solve_rational,
    transpose,
)

IntVec = tuple[int, ...]


def _unit_vectors(dim: int) -> list[IntVec]:
    return [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]


def _dedupe_primitive(vectors: Iterable[Sequence[int]]) -> list[IntVec]:
    out: list[IntVec] = []
    seen: set[IntVec] = set()
    for v in vectors:
        if all(x == 0 for x in v):
            continue
        p = primitive_vector(v)
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def _pointed_extreme_rays(constraints: list[IntVec], dim: int) -> list[IntVec]:
    """Extreme rays of {y : a.y >= 0 for a in constraints}, assuming the
    constraint matrix has full rank ``dim`` (no lineality).

    Classic double description: start from a simplicial subcone cut out
    by ``dim`` independent constraints, then slice in the remaining
    halfspaces, combining adjacent rays across each new hyperplane.
    """
    if dim == 0:
        return []
    # Greedy choice of dim independent rows for the initial simplex.
    base: list[int] = []
    for idx in range(len(constraints)):
        if rational_rank([constraints[i] for i in base] + [constraints[idx]]) > len(base):
            base.append(idx)
            if len(base) == dim:
                break
    if len(base) < dim:
        raise ValueError("constraint matrix does not have full rank")
    rays: list[IntVec] = []
    bmat = [constraints[i] for i in base]
    for k in range(dim):
        rhs = [1 if i == k else 0 for i in range(dim)]
        col = solve_rational(bmat, rhs)
        assert col is not None
        rays.append(primitive_vector(col))
    processed = list(base)

    def tight_rows(ray: IntVec) -> list[int]:
        return [j for j in processed if dot(constraints[j], ray) == 0]

    for idx in range(len(constraints)):
        if idx in base:
            continue
        a = constraints[idx]
        vals = {r: dot(a, r) for r in rays}
        pos = [r for r in rays if vals[r] > 0]
        zero = [r for r in rays if vals[r] == 0]
        neg = [r for r in rays if vals[r] < 0]
        processed.append(idx)
        if not neg:
            continue
        new_rays = pos + zero
        if pos:
            tight = {r: set(tight_rows(r)) for r in rays}
            for rp in pos:
                for rn in neg:
                    common = tight[rp] & tight[rn]
                    others = [
                        r
                        for r in rays
                        if r is not rp and r is not rn and common <= tight[r]
                    ]
                    if others:
                        continue
                    rank = rational_rank([constraints[j] for j in common]) if common else 0
                    if rank != dim - 2:
                        continue
                    combo = tuple(
                        vals[rp] * rn[k] - vals[rn] * rp[k] for k in range(dim)
                    )
                    new_rays.append(primitive_vector(combo))
        rays = _dedupe_primitive(new_rays)
    return rays


def dual_extreme_rays(vectors: Sequence[Sequence[int]], ambient_dim: int) -> list[IntVec]:
    """Canonical generators of {y : v.y >= 0 for all v in vectors}.

    The lineality part comes out as +/- pairs of the HNF kernel basis;
    the pointed part as extreme rays inside the orthogonal complement
    of the lineality.  Sorted, primitive, deterministic.
    """
    cons = _dedupe_primitive(vectors)
    if not cons:
        units = _unit_vectors(ambient_dim)
        return sorted(units + [tuple(-x for x in u) for u in units])
    lineality = integer_kernel(transpose([list(c) for c in cons]))
    if lineality:
        complement = integer_kernel(transpose([list(l) for l in lineality]))
    else:
        complement = _unit_vectors(ambient_dim)
    out: list[IntVec] = []
    for l in lineality:
        out.append(tuple(l))
        out.append(tuple(-x for x in l))
    d = len(complement)
    if d:
        reduced = [tuple(dot(c, w) for w in complement) for c in cons]
        reduced = [r for r in reduced if any(r)]
        for t in _pointed_extreme_rays(_dedupe_primitive(reduced), d):
            ray = tuple(
                sum(t[k] * complement[k][j] for k in range(d))
                for j in range(ambient_dim)
            )
            out.append(primitive_vector(ray))
    return sorted(set(out))


@dataclass(frozen=True)
class RationalCone:
    """Closed convex polyhedral cone with canonical dual descriptions."""

    ambient_dim: int
    generators: tuple[IntVec, ...]
    facet_normals: tuple[IntVec, ...]

    @staticmethod
    def from_generators(
        vectors: Sequence[Sequence], ambient_dim: Optional[int] = None
    ) -> "RationalCone":
        vecs = [primitive_vector(v) for v in vectors if any(x != 0 for x in v)]
        if ambient_dim is None:
            if not vecs:
                raise ValueError("ambient dimension required for the zero cone")
            ambient_dim = len(vecs[0])
        if any(len(v) != ambient_dim for v in vecs):
            raise ValueError("mixed vector dimensions")
        normals = dual_extreme_rays(vecs, ambient_dim)
        gens = dual_extreme_rays(normals, ambient_dim)
        return RationalCone(ambient_dim, tuple(gens), tuple(normals))

    @staticmethod
    def from_inequalities(
        normals: Sequence[Sequence], ambient_dim: Optional[int] = None
    ) -> "RationalCone":
        vecs = [primitive_vector(v) for v in normals if any(x != 0 for x in v)]
        if ambient_dim is None:
            if not vecs:
                raise ValueError("ambient dimension required for the full cone")
            ambient_dim = len(vecs[0])
        gens = dual_extreme_rays(vecs, ambient_dim)
        norms = dual_extreme_rays(gens, ambient_dim)
        return RationalCone(ambient_dim, tuple(gens), tuple(norms))

    @staticmethod
    def full_space(ambient_dim: int) -> "RationalCone":
        return RationalCone.from_generators(
            _unit_vectors(ambient_dim)
            + [tuple(-x for x in u) for u in _unit_vectors(ambient_dim)],
            ambient_dim,
        )

    @staticmethod
    def zero(ambient_dim: int) -> "RationalCone":
        return RationalCone.from_generators([], ambient_dim)

    def dual(self) -> "RationalCone":
        return RationalCone(self.ambient_dim, self.facet_normals, self.generators)

    @cached_property
    def dim(self) -> int:
        return rational_rank([list(g) for g in self.generators])

    @cached_property
    def lineality_dim(self) -> int:
        gens = set(self.generators)
        negs = [g for g in gens if tuple(-x for x in g) in gens]
        if not negs:
            return 0
        return rational_rank([list(g) for g in negs])

    @property
    def is_pointed(self) -> bool:
        return self.lineality_dim == 0

    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient_dim

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise ValueError("dimension mismatch")
        return all(dot(n, v) >= 0 for n in self.facet_normals)

    def contains_in_relative_interior(self, v: Sequence) -> bool:
        if not self.contains(v):
            return False
        for n in self.facet_normals:
            if dot(n, v) == 0 and any(dot(n, g) != 0 for g in self.generators):
                return False
        return True

    def contains_cone(self, other: "RationalCone") -> bool:
        return all(self.contains(g) for g in other.generators)

    def interior_point(self) -> IntVec:
        """A point in the relative interior (the sum of the generators)."""
        if not self.generators:
            return tuple([0] * self.ambient_dim)
        return tuple(sum(g[j] for g in self.generators) for j in range(self.ambient_dim))

    def intersect(self, other: "RationalCone") -> "RationalCone":
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("dimension mismatch")
        return RationalCone.from_inequalities(
            list(self.facet_normals) + list(other.facet_normals), self.ambient_dim
        )

    def _face_from_tight_normals(self, tight: Sequence[IntVec]) -> "RationalCone":
        gens = [
            g for g in self.generators if all(dot(n, g) == 0 for n in tight)
        ]
        return RationalCone.from_generators(gens, self.ambient_dim)

    def minimal_face_containing(self, sub: "RationalCone") -> "RationalCone":
        if not self.contains_cone(sub):
            raise ValueError("sub-cone is not contained in this cone")
        tight = [
            n
            for n in self.facet_normals
            if all(dot(n, g) == 0 for g in sub.generators)
        ]
        return self._face_from_tight_normals(tight)

    def all_faces(self) -> list["RationalCone"]:
        """Every face, found by closing under single-normal slices."""
        seen: dict[tuple[IntVec, ...], RationalCone] = {self.generators: self}
        frontier = [self]
        while frontier:
            nxt: list[RationalCone] = []
            for face in frontier:
                for n in self.facet_normals:
                    gens = tuple(
                        g for g in face.generators if dot(n, g) == 0
                    )
                    if gens in seen:
                        continue
                    sub = RationalCone.from_generators(gens, self.ambient_dim)
                    if sub.generators not in seen:
                        seen[sub.generators] = sub
                        nxt.append(sub)
                    seen[gens] = seen[sub.generators]
            frontier = nxt
        uniq = {c.generators: c for c in seen.values()}
        return list(uniq.values())

    def faces_of_dim(self, d: int) -> list["RationalCone"]:
        if d < 0 or d > self.dim:
            raise ValueError(f"no faces of dimension {d} in a {self.dim}-dim cone")
        faces = [f for f in self.all_faces() if f.dim == d]
        return sorted(faces, key=lambda c: c.generators)

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"RationalCone(dim {self.dim} in R^{self.ambient_dim}, "
            f"{len(self.generators)} gens, {len(self.facet_normals)} normals)"
        )
