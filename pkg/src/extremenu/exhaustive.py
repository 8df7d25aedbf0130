"""Exhaustiveness: whether a menu can be scaled/translated to touch more facets.

Two independent encodings are provided. The direct test checks the spanning
and empty-intersection conditions on the binding facet set; the cross-check
builds the homothety polytope in (scale, translation) space and asks whether
the identity homothety is one of its vertices. They must always agree.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import geometry as geo
from .geometry import Fraction, as_vec, dot, nullspace_basis, rank, solve_affine
from .model import AllocationSpace, ExtendedMenu


@dataclass(frozen=True)
class ExhaustivenessReport:
    exhaustive: bool
    case: str  # "singleton-at-vertex" | "spanning-and-empty-intersection" | "failure"
    witness_translation: tuple | None = None  # t: slack direction, both +-t feasible
    witness_center: tuple | None = None  # z: common point of all binding facets
    binding: tuple = ()


def is_exhaustive(em: ExtendedMenu, space: AllocationSpace) -> ExhaustivenessReport:
    """Decide exhaustiveness; failures ship a verifiable witness.

    Singleton menus are exhaustive iff their single vertex is a vertex of A.
    Otherwise the binding facet normals must span the ambient space and the
    binding facet hyperplanes must have empty common intersection.
    """
    binding = tuple(sorted(em.binding))
    d = space.dim
    if len(em.vertices) == 1:
        v = em.vertices[0]
        tight = [space.facets[i].normal for i in space.facet_set(v)]
        if rank(tight) == d:
            return ExhaustivenessReport(True, "singleton-at-vertex", binding=binding)
        t = _translation_witness(tight, d)
        _check_translation(t, em, space)
        return ExhaustivenessReport(False, "failure", witness_translation=t, binding=binding)

    normals = [space.facets[i].normal for i in binding]
    offsets = [space.facets[i].offset for i in binding]
    if rank(normals) < d:
        t = _translation_witness(normals, d)
        _check_translation(t, em, space)
        return ExhaustivenessReport(False, "failure", witness_translation=t, binding=binding)
    z = solve_affine(normals, offsets)
    if z is not None:
        for i in binding:
            if not space.facets[i].tight_at(z):
                raise geo.GeometryError("dilation center fails a binding facet (internal)")
        return ExhaustivenessReport(False, "failure", witness_center=z, binding=binding)
    return ExhaustivenessReport(True, "spanning-and-empty-intersection", binding=binding)


def _translation_witness(normals, d):
    basis = nullspace_basis(normals) if normals else [as_vec([1] + [0] * (d - 1))]
    if not basis:
        raise geo.GeometryError("no translation witness despite rank deficiency (internal)")
    return basis[0]


def _check_translation(t, em, space):
    """Both ext M + eps t and ext M - eps t must stay in A for small eps > 0."""
    for i in em.binding:
        if dot(as_vec(space.facets[i].normal), t) != 0:
            raise geo.GeometryError("translation witness not orthogonal to binding facet")
    eps = _feasible_step(t, em, space)
    if eps <= 0:
        raise geo.GeometryError("translation witness admits no feasible step (internal)")


def _feasible_step(t, em, space) -> Fraction:
    """Largest eps with ext M +- eps t inside A, halved once; 1 if unconstrained."""
    eps = Fraction(1)
    for v in em.vertices:
        for h in space.facets:
            drift = dot(as_vec(h.normal), t)
            if drift == 0:
                continue
            slack = h.offset - h.value(v)
            if slack == 0:
                return Fraction(0)
            eps = min(eps, slack / abs(drift))
    return eps / 2


def facet_conditions_hold(facet_indices, space: AllocationSpace) -> bool:
    """Spanning + empty-intersection test on an explicit facet index set."""
    normals = [space.facets[i].normal for i in facet_indices]
    offsets = [space.facets[i].offset for i in facet_indices]
    return rank(normals) == space.dim and solve_affine(normals, offsets) is None


def minimal_exhaustive_subset(vertices, space: AllocationSpace, must_include=None):
    """Greedy exhaustive subset of at most d+1 points (2 if the veto is included).

    Chooses points whose touched-facet normals reach full rank, then one more
    point on a facet avoiding the common intersection point. The output is
    certified exhaustive before returning.
    """
    vertices = [as_vec(v) for v in vertices]
    d = space.dim
    facet_sets = [space.facet_set(v) for v in vertices]

    if len(vertices) == 1:
        if rank([space.facets[i].normal for i in facet_sets[0]]) == d:
            return tuple(vertices)
        raise geo.GeometryError("minimal_exhaustive_subset: input is not exhaustive")

    chosen = []
    chosen_idx = set()
    if must_include is not None:
        must_include = as_vec(must_include)
        try:
            k = vertices.index(must_include)
        except ValueError:
            raise geo.GeometryError("must_include is not among the input vertices")
        chosen.append(k)
        chosen_idx.add(k)

    def facet_union(sel):
        out = set()
        for i in sel:
            out |= facet_sets[i]
        return sorted(out)

    current_rank = rank([space.facets[i].normal for i in facet_union(chosen)]) if chosen else 0
    while current_rank < d:
        best = None
        best_rank = current_rank
        for i in range(len(vertices)):
            if i in chosen_idx:
                continue
            r = rank([space.facets[j].normal for j in facet_union(chosen + [i])])
            if r > best_rank:
                best = i
                best_rank = r
                if r == d:
                    break
        if best is None:
            raise geo.GeometryError("minimal_exhaustive_subset: input is not exhaustive")
        chosen.append(best)
        chosen_idx.add(best)
        current_rank = best_rank

    if not facet_conditions_hold(facet_union(chosen), space):
        added = False
        for i in range(len(vertices)):
            if i in chosen_idx:
                continue
            if facet_conditions_hold(facet_union(chosen + [i]), space):
                chosen.append(i)
                chosen_idx.add(i)
                added = True
                break
        if not added:
            raise geo.GeometryError("minimal_exhaustive_subset: input is not exhaustive")

    if len(chosen) > d + 1:
        raise geo.GeometryError("minimal subset exceeded d+1 points (internal)")
    if not facet_conditions_hold(facet_union(chosen), space):
        raise geo.GeometryError("minimal subset failed certification (internal)")
    return tuple(vertices[i] for i in chosen)


def homothety_cross_check(em: ExtendedMenu, space: AllocationSpace) -> bool:
    """Exhaustiveness via the homothety polytope in (scale, translation) space.

    Hom(M) = {(lam, t): lam * h_M(n_H) + t . n_H <= c_H for all facets H of A,
    lam >= 0} contains (1, 0); the menu is exhaustive iff (1, 0) is a vertex,
    i.e. the active constraint normals (h_M(n_H), n_H) for binding H have rank
    d+1. Must agree with is_exhaustive on every non-singleton menu.
    """
    if len(em.vertices) < 2:
        raise geo.GeometryError("homothety_cross_check needs a non-singleton menu")
    active = []
    for i, h in enumerate(space.facets):
        support = max(dot(as_vec(h.normal), v) for v in em.vertices)
        if support > h.offset:
            raise geo.GeometryError("menu escapes the allocation space (internal)")
        if support == h.offset:
            active.append((support,) + tuple(map(Fraction, h.normal)))
    return rank(active) == space.dim + 1
