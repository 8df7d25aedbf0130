"""Scenario representation and extended-menu construction.

A scenario bundles the allocation polytope with its facet list, the type
cone with its polar, the finite menu, and an optional principal objective.
The extended menu conv(items) + polar cone is the payoff-equivalent closure
of the menu; its vertices, bounded edges, and per-vertex allocation-facet
incidences drive every downstream decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math

from . import geometry as geo
from .geometry import (
    Hyperplane,
    Polyhedron,
    as_vec,
    dot,
    frac,
    is_zero,
    primitive,
    rank,
    zero_vec,
)


class ScenarioError(ValueError):
    """Scenario validation failure with a human-readable diagnostic."""


def render_linear(normal, offset, relation="<=") -> str:
    """Pretty-print n.x <relation> c with coordinates named a1..ad."""
    terms = []
    for i, c in enumerate(normal):
        if c == 0:
            continue
        name = f"a{i + 1}"
        if c == 1:
            terms.append(f"+ {name}" if terms else name)
        elif c == -1:
            terms.append(f"- {name}" if terms else f"-{name}")
        else:
            sign = "- " if c < 0 else ("+ " if terms else "")
            terms.append(f"{sign}{abs(c)}*{name}")
    lhs = " ".join(terms) if terms else "0"
    return f"{lhs} {relation} {offset}"


# ---------------------------------------------------------------------------
# allocation space


@dataclass(frozen=True)
class AllocationSpace:
    """Bounded full-dimensional polytope A with its facet list and veto."""

    poly: Polyhedron
    facets: tuple
    veto: tuple | None

    @property
    def dim(self) -> int:
        return self.poly.ambient_dim

    def facet_set(self, x) -> frozenset:
        """Indices of facets of A containing the point x."""
        return frozenset(i for i, h in enumerate(self.facets) if h.tight_at(x))

    def contains(self, x) -> bool:
        return all(h.contains(x) for h in self.facets)


def allocation_space_from_points(points, veto=None) -> AllocationSpace:
    """Allocation space as the convex hull of the given points."""
    poly = geo.polyhedron_from_generators(points)
    return _finish_space(poly, veto)


def allocation_space_from_halfspaces(halfspaces, veto=None, check_irredundant=True) -> AllocationSpace:
    """Allocation space from explicit halfspaces; irredundancy enforced via LP."""
    hs = [h if isinstance(h, Hyperplane) else Hyperplane.make(*h) for h in halfspaces]
    if check_irredundant:
        for i, h in enumerate(hs):
            others = hs[:i] + hs[i + 1:]
            if not others:
                continue
            res = geo.lp_solve(others, h.normal, "max")
            if res.status == "optimal" and res.value <= h.offset:
                raise ScenarioError(
                    f"redundant facet: {render_linear(h.normal, h.offset)}"
                )
    poly = geo.polyhedron_from_halfspaces(hs)
    if poly.is_empty:
        raise ScenarioError("allocation space is empty")
    return _finish_space(poly, veto)


def _finish_space(poly: Polyhedron, veto) -> AllocationSpace:
    d = poly.ambient_dim
    if poly.rays:
        raise ScenarioError("allocation space must be bounded")
    if poly.dim != d:
        raise ScenarioError(
            f"allocation space is not full-dimensional (dim {poly.dim} in ambient {d})"
        )
    if veto is not None:
        veto = as_vec(veto)
        if veto not in poly.points:
            raise ScenarioError(f"veto allocation {veto} is not a vertex of A")
    return AllocationSpace(poly=poly, facets=poly.halfspaces, veto=veto)


# ---------------------------------------------------------------------------
# type cone


@dataclass(frozen=True)
class TypeCone:
    """Type cone given by generating rays, with its polar precomputed."""

    rays: tuple
    polar_rays: tuple
    unrestricted: bool

    @property
    def dim(self) -> int:
        return len(self.rays[0])

    def contains(self, theta) -> bool:
        """theta in cone(rays), tested against the polar description."""
        return all(geo._idot(theta, r) <= 0 for r in self.polar_rays)


def polar_cone(rays):
    """Generators of {y : y . theta <= 0 for all theta in cone(rays)}.

    The double polar is verified to reproduce the input cone.
    """
    rays = [as_vec(r) for r in rays]
    if not rays:
        raise geo.GeometryError("polar_cone needs at least one ray")
    d = len(rays[0])
    for r in rays:
        if is_zero(r):
            raise geo.GeometryError("zero ray in cone input")
    lines, polar = geo.cone_generators(rays, d)
    if lines:
        raise ScenarioError("type cone is not full-dimensional (polar has lineality)")
    # cross-validation: polar rays against cone rays, and double polar
    for p in polar:
        for r in rays:
            if geo.dot(as_vec(p), r) > 0:
                raise geo.GeometryError("polar ray fails nonpositivity (internal)")
    if polar:
        lines2, rays2 = geo.cone_generators(polar, d)
        for r2 in rays2:
            if any(geo._idot(r2, p) > 0 for p in polar):
                raise geo.GeometryError("double polar escaped the cone (internal)")
        if not rays2 and not lines2:
            raise geo.GeometryError("double polar collapsed (internal)")
    return tuple(polar)


def make_type_cone(rays) -> TypeCone:
    rays = tuple(primitive(as_vec(r)) for r in rays)
    d = len(rays[0])
    if rank(rays) != d:
        raise ScenarioError("type cone is not full-dimensional")
    polar = polar_cone(rays)
    return TypeCone(rays=rays, polar_rays=polar, unrestricted=not polar)


def unrestricted_cone(d: int) -> TypeCone:
    rays = []
    for i in range(d):
        e = [0] * d
        e[i] = 1
        rays.append(tuple(e))
        rays.append(tuple(-x for x in e))
    return make_type_cone(rays)


# ---------------------------------------------------------------------------
# menus


@dataclass(frozen=True)
class Menu:
    items: tuple

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class AbsorbedItem:
    """A menu item payoff-dominated by the rest of the menu.

    The certificate expresses the item as a convex combination of surviving
    vertices plus a nonnegative combination of polar-cone rays.
    """

    item: tuple
    vertex_weights: tuple  # (vertex_index, Fraction) pairs
    polar_weights: tuple  # (polar_ray_index, Fraction) pairs


@dataclass(frozen=True)
class ExtendedMenu:
    """conv(items) + polar cone, with vertices, bounded edges and incidences."""

    poly: Polyhedron
    vertices: tuple
    edges: tuple  # pairs of indices into vertices, bounded 1-faces only
    facet_incidence: tuple  # per vertex: frozenset of A-facet indices
    binding: frozenset  # union of facet incidences = F(x)
    absorbed: tuple

    @property
    def dim(self) -> int:
        return self.poly.ambient_dim

    def menu_size(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class Scenario:
    space: AllocationSpace
    cone: TypeCone
    menu: Menu
    objective: object | None
    label: str

    @property
    def dim(self) -> int:
        return self.space.dim


@dataclass(frozen=True)
class ConstantObjective:
    v: tuple

    def value_at(self, theta):
        return self.v


@dataclass(frozen=True)
class TabulatedObjective:
    table: tuple  # ((theta, v), ...)

    def value_at(self, theta):
        theta = as_vec(theta)
        for t, v in self.table:
            if t == theta:
                return v
        raise ScenarioError(f"objective is not defined at type {theta}")


def validate_scenario(space, cone, menu_items, objective=None, label="") -> Scenario:
    """Check every scenario invariant and return the immutable Scenario.

    Diagnostics are specific: dimension mismatches, lower-dimensional A,
    non-full-dimensional cone, menu items outside A (naming the violated
    facet), duplicate items, and a veto missing from the menu.
    """
    if not isinstance(space, AllocationSpace):
        raise ScenarioError("space must be an AllocationSpace")
    if not isinstance(cone, TypeCone):
        raise ScenarioError("cone must be a TypeCone")
    d = space.dim
    if cone.dim != d:
        raise ScenarioError(f"cone dimension {cone.dim} != allocation dimension {d}")
    items = []
    seen = set()
    for raw in menu_items:
        p = as_vec(raw)
        if len(p) != d:
            raise ScenarioError(f"menu item {p} has dimension {len(p)}, expected {d}")
        if p in seen:
            raise ScenarioError(f"duplicate menu item {p}")
        seen.add(p)
        for h in space.facets:
            if not h.contains(p):
                raise ScenarioError(
                    f"item {tuple(map(str, p))} violates facet "
                    f"{render_linear(h.normal, h.offset)}"
                )
        items.append(p)
    if not items:
        raise ScenarioError("menu must contain at least one item")
    if space.veto is not None and space.veto not in items:
        raise ScenarioError(f"IR requires the veto allocation {space.veto} in the menu")
    if isinstance(objective, ConstantObjective) and len(objective.v) != d:
        raise ScenarioError("objective dimension mismatch")
    return Scenario(
        space=space,
        cone=cone,
        menu=Menu(items=tuple(items)),
        objective=objective,
        label=label,
    )


# ---------------------------------------------------------------------------
# extended menu construction


def extend_menu(menu: Menu, cone: TypeCone, space: AllocationSpace) -> ExtendedMenu:
    """Build M = conv(items) + polar cone with vertices, edges, incidences.

    Items absorbed into the extension (payoff-irrelevant) are reported with a
    dominating-combination certificate.
    """
    poly = geo.polyhedron_from_generators(menu.items, cone.polar_rays)
    vertices = poly.points
    vertex_index = {v: i for i, v in enumerate(vertices)}
    absorbed = []
    for item in menu.items:
        if item not in vertex_index:
            absorbed.append(_absorption_certificate(item, vertices, poly.rays))
    edges = []
    for f in geo.faces(poly, 1):
        if f.bounded:
            i, j = f.generator_indices
            edges.append((i, j))
            if j >= len(vertices):
                raise geo.GeometryError("bounded edge touched a ray (internal)")
    edges.sort()
    incid = tuple(space.facet_set(v) for v in vertices)
    binding = frozenset().union(*incid) if incid else frozenset()
    return ExtendedMenu(
        poly=poly,
        vertices=vertices,
        edges=tuple(edges),
        facet_incidence=incid,
        binding=binding,
        absorbed=tuple(absorbed),
    )


def _absorption_certificate(item, vertices, polar_rays) -> AbsorbedItem:
    """Solve item = sum lam_i v_i + sum mu_j r_j, lam in simplex, mu >= 0."""
    d = len(item)
    nv, nr = len(vertices), len(polar_rays)
    n = nv + nr
    halfspaces = []
    for c in range(d):  # equality rows as opposite halfspace pairs
        row = [vertices[i][c] for i in range(nv)] + [frac(r[c]) for r in polar_rays]
        if all(x == 0 for x in row):
            if item[c] != 0:
                raise geo.GeometryError(
                    f"absorbed item {item} off the menu's coordinate span (internal)"
                )
            continue
        halfspaces.append(Hyperplane.make(row, item[c]))
        halfspaces.append(Hyperplane.make([-x for x in row], -item[c]))
    ones = [Fraction(1)] * nv + [Fraction(0)] * nr
    halfspaces.append(Hyperplane.make(ones, 1))
    halfspaces.append(Hyperplane.make([-x for x in ones], -1))
    for j in range(n):
        e = [Fraction(0)] * n
        e[j] = Fraction(-1)
        halfspaces.append(Hyperplane.make(e, 0))
    res = geo.lp_solve(halfspaces, zero_vec(n), "feasibility")
    if res.status != "optimal":
        raise geo.GeometryError(f"absorbed item {item} has no certificate (internal)")
    lam = [(i, res.x[i]) for i in range(nv) if res.x[i] != 0]
    mu = [(j, res.x[nv + j]) for j in range(nr) if res.x[nv + j] != 0]
    return AbsorbedItem(item=item, vertex_weights=tuple(lam), polar_weights=tuple(mu))


@lru_cache(maxsize=4096)
def extended_menu(scenario: Scenario) -> ExtendedMenu:
    """Cached extend_menu for a validated scenario."""
    return extend_menu(scenario.menu, scenario.cone, scenario.space)


# ---------------------------------------------------------------------------
# agent behaviour


def agent_choice(menu: Menu, theta, tiebreak="lexicographic"):
    """The lexicographically smallest utility maximizer over the menu items."""
    theta = as_vec(theta)
    if is_zero(theta):
        raise ScenarioError("agent_choice: type must be nonzero")
    if tiebreak != "lexicographic":
        raise ScenarioError(f"unknown tiebreak rule {tiebreak!r}")
    best_val = None
    best = None
    for item in menu.items:
        v = dot(item, theta)
        if best_val is None or v > best_val or (v == best_val and item < best):
            best_val = v
            best = item
    return best


def support_value(em: ExtendedMenu, theta):
    """sup of theta . y over the extended menu: exact max over vertices when
    theta lies in the type cone, +inf otherwise."""
    theta = as_vec(theta)
    for r in em.poly.rays:
        if geo.dot(as_vec(r), theta) > 0:
            return math.inf
    return max(dot(v, theta) for v in em.vertices)
