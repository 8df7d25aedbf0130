"""Exact rational linear algebra and polyhedral computation.

Everything here is exact: coordinates are ``fractions.Fraction``, hyperplane
normals are primitive integer vectors, and all combinatorial decisions
(rank, incidence, feasibility) are made with integer arithmetic. Floating
point never appears. The scale target is small (ambient dimension <= 6,
tens of generators/halfspaces), so the algorithms favour determinism and
verifiability over asymptotics.

Vectors are tuples of Fractions. A polyhedron carries both descriptions
(irredundant halfspaces and minimal generators) plus generator/halfspace
incidence, with canonical ordering so outputs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .kernels import rref_sparse

Vec = tuple  # tuple[Fraction, ...]


class GeometryError(ValueError):
    """Raised for invalid geometric input (dimension mismatch, lines, ...)."""


# ---------------------------------------------------------------------------
# scalars and vectors


def frac(x) -> Fraction:
    """Coerce an int, Fraction, or 'p/q' string to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise GeometryError(f"refusing float {x!r}: exact rationals only")
    raise GeometryError(f"cannot interpret {x!r} as a rational")


def as_vec(coords) -> Vec:
    return tuple(frac(c) for c in coords)


def dot(u, v) -> Fraction:
    if len(u) != len(v):
        raise GeometryError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vadd(u, v) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def vscale(u, s) -> Vec:
    s = frac(s)
    return tuple(a * s for a in u)


def is_zero(u) -> bool:
    return all(a == 0 for a in u)


def zero_vec(d: int) -> Vec:
    return (Fraction(0),) * d


def unit_vec(d: int, i: int) -> Vec:
    return tuple(Fraction(1 if j == i else 0) for j in range(d))


def primitive(u) -> tuple:
    """Scale a rational vector by a positive rational to coprime integers.

    The zero vector maps to integer zeros. Orientation is preserved.
    """
    if all(type(a) is int for a in u):
        ints = list(u)
    else:
        denoms = 1
        for a in u:
            a = frac(a)
            denoms = denoms * a.denominator // gcd(denoms, a.denominator)
        ints = [int(a * denoms) for a in map(frac, u)]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def _sparse_int_rows(matrix):
    """Clear denominators per row and return sparse integer rows."""
    rows = []
    for r in matrix:
        ints = primitive(r)
        rows.append({c: v for c, v in enumerate(ints) if v != 0})
    return rows


# ---------------------------------------------------------------------------
# rank / nullspace / linear solve


def rank(matrix) -> int:
    """Rank over the rationals via exact elimination. Empty matrix has rank 0."""
    matrix = list(matrix)
    if not matrix:
        return 0
    ncols = len(matrix[0])
    for r in matrix:
        if len(r) != ncols:
            raise GeometryError("rank: rows must all have the same length")
    pivots, _ = rref_sparse(_sparse_int_rows(matrix), ncols)
    return len(pivots)


def nullspace_basis(matrix) -> list:
    """Basis of {x : Mx = 0}, as primitive integer vectors (Fractions).

    Deterministic: one basis vector per free column in ascending column order,
    with +1 in the free coordinate before scaling. rank + len(basis) = ncols.
    """
    matrix = list(matrix)
    if not matrix:
        return []
    ncols = len(matrix[0])
    pivots, reduced = rref_sparse(_sparse_int_rows(matrix), ncols)
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for pc, row in zip(pivots, reduced):
            if f in row:
                x[pc] = Fraction(-row[f], row[pc])
        basis.append(as_vec(primitive(x)))
    return basis


def solve_affine(matrix, rhs):
    """One exact solution of M x = b, or None if inconsistent.

    Free variables are set to 0 (deterministic particular solution).
    """
    matrix = list(matrix)
    rhs = list(rhs)
    if not matrix:
        return None if any(b != 0 for b in rhs) else ()
    ncols = len(matrix[0])
    aug = [tuple(r) + (frac(b),) for r, b in zip(matrix, rhs)]
    pivots, reduced = rref_sparse(_sparse_int_rows(aug), ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for pc, row in zip(pivots, reduced):
        x[pc] = Fraction(row.get(ncols, 0), row[pc])
    return tuple(x)


def affine_rank(points, rays=()) -> int:
    """Dimension of aff(points) + span(rays); -1 for the empty set."""
    points = list(points)
    rays = list(rays)
    if not points and not rays:
        return -1
    dirs = list(rays)
    if points:
        p0 = points[0]
        dirs.extend(vsub(p, p0) for p in points[1:])
    if not dirs:
        return 0
    return rank(dirs)


# ---------------------------------------------------------------------------
# hyperplanes


@dataclass(frozen=True)
class Hyperplane:
    """Halfspace {x : normal . x <= offset} with primitive integer normal.

    Stored canonically: the normal's entries are coprime integers (sign of the
    leading entry preserved, so orientation survives), the offset is scaled to
    match. Canonical storage makes equality testing exact.
    """

    normal: tuple
    offset: Fraction

    @staticmethod
    def make(normal, offset) -> "Hyperplane":
        normal = as_vec(normal)
        if is_zero(normal):
            raise GeometryError("hyperplane normal must be nonzero")
        offset = frac(offset)
        prim = primitive(normal)
        # scale factor from original to primitive (positive by construction)
        for a, b in zip(normal, prim):
            if a != 0:
                scale = Fraction(b, 1) / a
                break
        return Hyperplane(prim, offset * scale)

    @property
    def dim(self) -> int:
        return len(self.normal)

    def value(self, x) -> Fraction:
        return dot(self.normal, x)

    def contains(self, x) -> bool:
        return self.value(x) <= self.offset

    def tight_at(self, x) -> bool:
        return self.value(x) == self.offset

    def flipped(self) -> "Hyperplane":
        return Hyperplane(tuple(-a for a in self.normal), -self.offset)

    def key(self):
        return (self.normal, self.offset)

    def same_hyperplane(self, other: "Hyperplane") -> bool:
        """Equality as point sets (orientation ignored)."""
        return self.key() == other.key() or self.key() == other.flipped().key()


@dataclass(frozen=True)
class GeneratorSet:
    points: tuple  # tuple[Vec, ...]
    rays: tuple  # tuple[Vec, ...] primitive integer directions


# ---------------------------------------------------------------------------
# double description on cones

# A cone is {x in R^n : a . x <= 0 for each constraint a}. The routine returns
# a minimal generator description (lineality basis, extreme rays), processing
# constraints in the given order and keeping every vector primitive, so the
# output is reproducible.


def cone_generators(constraints, n: int):
    """Minimal (lines, rays) generating {x : a.x <= 0 for a in constraints}."""
    cons = [primitive(a) for a in constraints]
    for a in cons:
        if len(a) != n:
            raise GeometryError("cone constraint dimension mismatch")
    lines = [primitive(unit_vec(n, i)) for i in range(n)]
    rays = []  # list of (vector, zeroset frozenset of processed constraint idx)
    processed = []
    for k, a in enumerate(cons):
        if is_zero(a):
            processed.append(a)
            # trivially satisfied; tight everywhere
            rays = [(r, z | {k}) for r, z in rays]
            continue
        lvals = [_idot(a, l) for l in lines]
        hit = next((i for i, v in enumerate(lvals) if v != 0), None)
        if hit is not None:
            l0 = lines[hit]
            d0 = lvals[hit]
            if d0 > 0:
                l0 = tuple(-x for x in l0)
                d0 = -d0
            new_lines = []
            for i, l in enumerate(lines):
                if i == hit:
                    continue
                if lvals[i] == 0:
                    new_lines.append(l)
                else:
                    new_lines.append(primitive([d0 * x - lvals[i] * y for x, y in zip(l, l0)]))
            new_rays = []
            for r, z in rays:
                rv = _idot(a, r)
                if rv == 0:
                    new_rays.append((r, z | {k}))
                else:
                    # shift along the line to the hyperplane, keeping the ray's
                    # own coefficient positive (d0 < 0 by orientation)
                    adj = primitive([(-d0) * x + rv * y for x, y in zip(r, l0)])
                    new_rays.append((adj, z | {k}))
            new_rays.append((primitive(l0), frozenset(range(len(processed)))))
            lines = new_lines
            rays = new_rays
        else:
            vals = [_idot(a, r) for r, _ in rays]
            neg = [i for i, v in enumerate(vals) if v < 0]
            zero = [i for i, v in enumerate(vals) if v == 0]
            pos = [i for i, v in enumerate(vals) if v > 0]
            if pos:
                new_rays = [(rays[i][0], rays[i][1]) for i in neg]
                new_rays += [(rays[i][0], rays[i][1] | {k}) for i in zero]
                for ip in pos:
                    rp, zp = rays[ip]
                    for im in neg:
                        rm, zm = rays[im]
                        common = zp & zm
                        adjacent = True
                        for j, (ro, zo) in enumerate(rays):
                            if j != ip and j != im and common <= zo:
                                adjacent = False
                                break
                        if not adjacent:
                            continue
                        w = primitive([vals[ip] * x - vals[im] * y for x, y in zip(rm, rp)])
                        new_rays.append((w, common | {k}))
                rays = new_rays
            else:
                rays = [(r, z | {k}) if i in zero else (r, z)
                        for i, (r, z) in enumerate(rays)]
        processed.append(a)

    lines = _canonical_lines(lines, n)
    out = []
    seen = set()
    lin_dim = len(lines)
    for r, _ in rays:
        r = reduce_mod_lines(r, lines)
        if is_zero(r):
            continue
        r = primitive(r)
        if r in seen:
            continue
        tight = [cons[i] for i in range(len(cons)) if _idot(cons[i], r) == 0]
        if rank(tight) != n - lin_dim - 1:
            continue
        seen.add(r)
        out.append(r)
    out.sort()
    return lines, out


def _idot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _canonical_lines(lines, n):
    """RREF-canonical primitive basis of the span of the given vectors."""
    nonzero = [l for l in lines if not is_zero(l)]
    if not nonzero:
        return []
    _, reduced = rref_sparse([{c: v for c, v in enumerate(l) if v} for l in nonzero], n)
    return [tuple(row.get(c, 0) for c in range(n)) for row in reduced]


def reduce_mod_lines(v, lines_rref):
    """Canonical representative of v modulo the span of RREF lines."""
    v = list(v)
    for line in lines_rref:
        pc = next(c for c, x in enumerate(line) if x != 0)
        if v[pc] != 0:
            p = line[pc]
            f = v[pc]
            v = [p * x - f * y for x, y in zip(v, line)]
    return tuple(v)


# ---------------------------------------------------------------------------
# polyhedra


@dataclass(frozen=True)
class Polyhedron:
    """Dual description of a pointed polyhedron with incidence data.

    halfspaces: irredundant facet halfspaces; lower-dimensional sets carry
    their affine hull as pairs of opposite halfspaces (canonical RREF-based
    normals). points/rays: minimal generators (vertices, extreme recession
    rays). incidence[i]: indices of halfspaces tight at generator i, with
    points listed before rays. Everything is canonically ordered.
    """

    ambient_dim: int
    halfspaces: tuple
    points: tuple
    rays: tuple
    incidence: tuple
    dim: int
    is_empty: bool = False

    @property
    def generators(self) -> GeneratorSet:
        return GeneratorSet(self.points, self.rays)

    def n_generators(self) -> int:
        return len(self.points) + len(self.rays)

    def contains(self, x) -> bool:
        return all(h.contains(x) for h in self.halfspaces)

    def tight_set(self, x) -> frozenset:
        return frozenset(i for i, h in enumerate(self.halfspaces) if h.tight_at(x))

    def is_vertex(self, x) -> bool:
        if not self.contains(x):
            return False
        tight = [self.halfspaces[i].normal for i in self.tight_set(x)]
        return rank(tight) == self.ambient_dim


def polyhedron_from_generators(points, rays=()) -> Polyhedron:
    """Build the canonical dual description of conv(points) + cone(rays)."""
    pts = []
    seen = set()
    for p in points:
        p = as_vec(p)
        if p not in seen:
            seen.add(p)
            pts.append(p)
    if not pts:
        raise GeometryError("generator input needs at least one point")
    d = len(pts[0])
    rys = []
    seen_r = set()
    for r in rays:
        r = primitive(as_vec(r))
        if is_zero(r):
            raise GeometryError("zero ray in generator input")
        if r not in seen_r:
            seen_r.add(r)
            rys.append(r)
    return _assemble(pts, rys, d)


def polyhedron_from_halfspaces(halfspaces, ambient_dim=None) -> Polyhedron:
    """Vertex/ray enumeration for an intersection of halfspaces.

    An empty intersection yields an explicit empty Polyhedron. A feasible set
    containing a full line is outside this toolkit's domain and is an error.
    """
    hs = [h if isinstance(h, Hyperplane) else Hyperplane.make(*h) for h in halfspaces]
    if not hs:
        raise GeometryError("halfspace input must be nonempty")
    d = hs[0].dim if ambient_dim is None else ambient_dim
    for h in hs:
        if h.dim != d:
            raise GeometryError("halfspace dimensions disagree")
    cons = [(-h.offset,) + tuple(map(Fraction, h.normal)) for h in hs]
    cons.append((Fraction(-1),) + zero_vec(d))  # homogenizing x0 >= 0
    lines, rays = cone_generators(cons, d + 1)
    if lines:
        raise GeometryError("polyhedron contains a line (not pointed)")
    pts = []
    recession = []
    for r in rays:
        if r[0] > 0:
            pts.append(tuple(Fraction(x, r[0]) for x in r[1:]))
        else:
            recession.append(primitive(r[1:]))
    if not pts:
        canon = tuple(sorted((h for h in hs), key=Hyperplane.key))
        return Polyhedron(d, canon, (), (), (), -1, is_empty=True)
    return _assemble(sorted(pts), sorted(recession), d)


def dual_description(arg, ambient_dim=None) -> Polyhedron:
    """Complete irredundant dual description from either description.

    Accepts a GeneratorSet (or (points, rays) pair) or a list of Hyperplanes.
    """
    if isinstance(arg, GeneratorSet):
        return polyhedron_from_generators(arg.points, arg.rays)
    if isinstance(arg, tuple) and len(arg) == 2:
        return polyhedron_from_generators(arg[0], arg[1])
    arg = list(arg)
    if not arg:
        raise GeometryError("empty input to dual_description")
    if isinstance(arg[0], Hyperplane):
        return polyhedron_from_halfspaces(arg, ambient_dim)
    return polyhedron_from_generators(arg)


def _assemble(pts, rys, d) -> Polyhedron:
    """Canonical Polyhedron from deduplicated generators (V -> H -> filter)."""
    # Valid inequalities y = (-c, n) of conv(pts)+cone(rys) form the polar cone
    # of the homogenized generators; its extreme rays are the facets, its
    # lineality encodes the affine hull.
    cons = [(Fraction(1),) + p for p in pts] + [(Fraction(0),) + tuple(map(Fraction, r)) for r in rys]
    lines, polar_rays = cone_generators(cons, d + 1)

    halfspaces = []
    for line in lines:
        n = line[1:]
        if all(x == 0 for x in n):
            raise GeometryError("unexpected trivial equality in dual description")
        c = Fraction(-line[0])
        halfspaces.append(Hyperplane.make(n, c))
        halfspaces.append(Hyperplane.make([-x for x in n], -c))
    for ray in polar_rays:
        n = ray[1:]
        if all(x == 0 for x in n):
            continue  # horizon direction, not a supporting halfspace
        c = Fraction(-ray[0])
        h = Hyperplane.make(n, c)
        if any(h.tight_at(p) for p in pts):
            halfspaces.append(h)
    halfspaces = sorted(set(halfspaces), key=Hyperplane.key)

    inc_pts = [frozenset(i for i, h in enumerate(halfspaces) if h.tight_at(p)) for p in pts]
    inc_rys = [frozenset(i for i, h in enumerate(halfspaces) if _idot(h.normal, r) == 0)
               for r in rys]

    vertices = []
    v_inc = []
    for p, inc in zip(pts, inc_pts):
        if rank([halfspaces[i].normal for i in inc]) == d:
            vertices.append(p)
            v_inc.append(inc)
    extreme_rays = []
    r_inc = []
    for r, inc in zip(rys, inc_rys):
        if rank([halfspaces[i].normal for i in inc]) == d - 1:
            extreme_rays.append(r)
            r_inc.append(inc)

    order_p = sorted(range(len(vertices)), key=lambda i: vertices[i])
    order_r = sorted(range(len(extreme_rays)), key=lambda i: extreme_rays[i])
    points = tuple(vertices[i] for i in order_p)
    rays = tuple(extreme_rays[i] for i in order_r)
    incidence = tuple([v_inc[i] for i in order_p] + [r_inc[i] for i in order_r])

    poly = Polyhedron(
        ambient_dim=d,
        halfspaces=tuple(halfspaces),
        points=points,
        rays=rays,
        incidence=incidence,
        dim=affine_rank(points, rays),
    )
    _check_polyhedron(poly, pts, rys)
    return poly


def _check_polyhedron(poly, original_pts, original_rys):
    """Internal invariants: generators satisfy every halfspace; inputs too."""
    for h in poly.halfspaces:
        for p in original_pts:
            if not h.contains(p):
                raise GeometryError(f"generator {p} violates halfspace {h}")
        for r in original_rys:
            if _idot(h.normal, r) > 0:
                raise GeometryError(f"ray {r} violates halfspace {h}")
    if not poly.points:
        raise GeometryError("pointed polyhedron lost all vertices (internal)")


# ---------------------------------------------------------------------------
# faces


@dataclass(frozen=True)
class Face:
    generator_indices: tuple
    halfspace_indices: tuple
    dim: int
    bounded: bool


def faces(poly: Polyhedron, k: int):
    """All k-dimensional faces, each with its generators and tight halfspaces.

    For k = 1 the bounded flag distinguishes edges from unbounded edges.
    Faces are identified by their generator sets; the whole polyhedron is
    included when k == poly.dim.
    """
    if k > poly.ambient_dim or k < 0:
        raise GeometryError(f"face dimension {k} out of range for ambient {poly.ambient_dim}")
    if poly.is_empty:
        return []
    active_sets = set(poly.incidence)
    # close under intersection: every face's tight set is an intersection of
    # generator tight sets
    frontier = set(active_sets)
    while frontier:
        new = set()
        for a in frontier:
            for b in active_sets:
                c = a & b
                if c not in active_sets and c not in new:
                    new.add(c)
        active_sets |= new
        frontier = new
    n_pts = len(poly.points)
    seen_gen_sets = {}
    for act in active_sets:
        gens = tuple(i for i, inc in enumerate(poly.incidence) if act <= inc)
        if not gens:
            continue
        if gens in seen_gen_sets:
            continue
        gpts = [poly.points[i] for i in gens if i < n_pts]
        grys = [poly.rays[i - n_pts] for i in gens if i >= n_pts]
        if not gpts:
            continue  # a pointed face always has a vertex
        fdim = affine_rank(gpts, grys)
        canonical_act = frozenset.intersection(*[poly.incidence[i] for i in gens])
        seen_gen_sets[gens] = Face(
            generator_indices=gens,
            halfspace_indices=tuple(sorted(canonical_act)),
            dim=fdim,
            bounded=not grys,
        )
    out = [f for f in seen_gen_sets.values() if f.dim == k]
    out.sort(key=lambda f: f.generator_indices)
    return out


# ---------------------------------------------------------------------------
# exact linear programming (dictionary simplex, Bland's rule)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: tuple | None = None
    active: frozenset = frozenset()
    dual: tuple = ()
    ray: tuple | None = None


def lp_solve(halfspaces, objective, sense="max") -> LPResult:
    """Exact LP over an intersection of halfspaces.

    max/min objective . x subject to n_i . x <= c_i; sense "feasibility"
    solves with a zero objective. The optimum comes with a witness point, the
    active constraint set, and dual multipliers; complementary slackness and
    dual feasibility are verified internally before returning.
    """
    if sense not in ("max", "min", "feasibility"):
        raise GeometryError(f"lp_solve: unknown sense {sense!r}")
    hs = [h if isinstance(h, Hyperplane) else Hyperplane.make(*h) for h in halfspaces]
    if not hs:
        raise GeometryError("lp_solve needs at least one halfspace")
    d = hs[0].dim
    for h in hs:
        if h.dim != d:
            raise GeometryError("lp_solve: dimension mismatch")
    objective = as_vec(objective) if sense != "feasibility" else zero_vec(d)
    if len(objective) != d:
        raise GeometryError("lp_solve: objective dimension mismatch")
    if sense == "min":
        res = lp_solve(hs, tuple(-c for c in objective), "max")
        if res.status != "optimal":
            return res
        return LPResult("optimal", -res.value, res.x, res.active, tuple(-y for y in res.dual))

    m = len(hs)
    A = [[Fraction(x) for x in h.normal] for h in hs]
    b = [h.offset for h in hs]
    c = list(objective)

    # variables: x_j = u_j - v_j with u, v >= 0; columns 0..d-1 are u,
    # d..2d-1 are v; simplex dictionary over slack rows.
    ncols = 2 * d
    rows = [[A[i][j] for j in range(d)] + [-A[i][j] for j in range(d)] for i in range(m)]
    obj = [c[j] for j in range(d)] + [-c[j] for j in range(d)]

    tab = _Simplex(rows, b, obj)
    status = tab.solve()
    if status == "infeasible":
        return LPResult("infeasible")
    x = tab.solution()
    point = tuple(x[j] - x[d + j] for j in range(d))
    if status == "unbounded":
        rdir = tab.unbounded_ray()
        ray = tuple(rdir[j] - rdir[d + j] for j in range(d))
        return LPResult("unbounded", ray=primitive(ray))
    value = dot(objective, point)
    dual = tab.duals()
    active = frozenset(i for i in range(m) if dot(hs[i].normal, point) == b[i])
    # certify optimality: dual feasibility, A^T y = c, complementary slackness
    for i in range(m):
        if dual[i] < 0:
            raise GeometryError("lp_solve: negative dual (internal)")
        if dual[i] != 0 and dot(hs[i].normal, point) != b[i]:
            raise GeometryError("lp_solve: complementary slackness failed (internal)")
    for j in range(d):
        lhs = sum(dual[i] * hs[i].normal[j] for i in range(m))
        if lhs != objective[j]:
            raise GeometryError("lp_solve: dual equation failed (internal)")
    if sum(dual[i] * b[i] for i in range(m)) != value:
        raise GeometryError("lp_solve: strong duality failed (internal)")
    return LPResult("optimal", value, point, active, tuple(dual))


class _Simplex:
    """Dense dictionary simplex with Bland's rule and a Phase-I variable.

    Variables are indexed 0..n-1 (structural), n..n+m-1 (slack), n+m (phase-I
    auxiliary). The dictionary stores, for each basic variable, its affine
    expression [const, coeff per nonbasic column] in the nonbasic variables.
    Exact Fractions throughout; Bland's rule guarantees termination.
    """

    def __init__(self, rows, b, obj):
        self.m = len(rows)
        self.n = len(rows[0]) if rows else 0
        self.aux = self.n + self.m
        self.nonbasic = list(range(self.n))
        self.basic = [self.n + i for i in range(self.m)]
        self.expr = [[b[i]] + [-rows[i][j] for j in range(self.n)] for i in range(self.m)]
        self._orig_obj = [Fraction(x) for x in obj]
        self.obj = [Fraction(0)] + list(self._orig_obj)
        self._unbounded_col = None

    def solve(self) -> str:
        if any(self.expr[i][0] < 0 for i in range(self.m)):
            if not self._phase1():
                return "infeasible"
        return self._optimize()

    # -- phase I ----------------------------------------------------------
    def _phase1(self) -> bool:
        self.nonbasic.append(self.aux)
        for e in self.expr:
            e.append(Fraction(1))
        ncols = len(self.nonbasic)
        self.obj = [Fraction(0)] * (ncols + 1)
        self.obj[ncols] = Fraction(-1)  # maximize -aux
        leave = min(range(self.m), key=lambda i: (self.expr[i][0], self.basic[i]))
        self._pivot(leave, ncols - 1)
        status = self._optimize()
        if status != "optimal":
            raise GeometryError("phase-I unbounded (internal)")
        if self.obj[0] != 0:
            return False
        if self.aux in self.basic:
            i = self.basic.index(self.aux)
            col = next(
                (j for j in range(len(self.nonbasic)) if self.expr[i][j + 1] != 0), None
            )
            if col is None:
                # vacuous row: aux == 0 identically
                self.expr.pop(i)
                self.basic.pop(i)
                self.m -= 1
            else:
                self._pivot(i, col)
        k = self.nonbasic.index(self.aux)
        self.nonbasic.pop(k)
        for e in self.expr:
            e.pop(k + 1)
        # re-express the original objective in the current nonbasic variables
        c = self._orig_obj
        obj = [Fraction(0)] * (len(self.nonbasic) + 1)
        for j, var in enumerate(self.nonbasic):
            if var < self.n:
                obj[j + 1] += c[var]
        for i, var in enumerate(self.basic):
            if var < self.n and c[var] != 0:
                coef = c[var]
                for j in range(len(self.nonbasic) + 1):
                    obj[j] += coef * self.expr[i][j]
        self.obj = obj
        return True

    # -- phase II ---------------------------------------------------------
    def _optimize(self) -> str:
        while True:
            enter = None
            for j in range(len(self.nonbasic)):  # Bland: smallest entering var id
                if self.obj[j + 1] > 0:
                    if enter is None or self.nonbasic[j] < self.nonbasic[enter]:
                        enter = j
            if enter is None:
                return "optimal"
            leave = None
            best = None
            for i in range(self.m):
                a = self.expr[i][enter + 1]
                if a < 0:
                    ratio = -self.expr[i][0] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basic[i] < self.basic[leave])
                    ):
                        best = ratio
                        leave = i
            if leave is None:
                self._unbounded_col = enter
                return "unbounded"
            self._pivot(leave, enter)

    def _pivot(self, leave: int, enter: int):
        row = self.expr[leave]
        a = row[enter + 1]
        out_var = self.basic[leave]
        in_var = self.nonbasic[enter]
        new_row = [-x / a for x in row]
        new_row[enter + 1] = Fraction(1) / a
        for i in range(self.m):
            if i == leave:
                continue
            coef = self.expr[i][enter + 1]
            if coef != 0:
                e = self.expr[i]
                for j in range(len(row)):
                    if j == enter + 1:
                        e[j] = coef * new_row[j]
                    else:
                        e[j] += coef * new_row[j]
        coef = self.obj[enter + 1]
        if coef != 0:
            for j in range(len(row)):
                if j == enter + 1:
                    self.obj[j] = coef * new_row[j]
                else:
                    self.obj[j] += coef * new_row[j]
        self.expr[leave] = new_row
        self.basic[leave] = in_var
        self.nonbasic[enter] = out_var

    # -- extraction --------------------------------------------------------
    def solution(self):
        vals = [Fraction(0)] * (self.aux + 1)
        for i, var in enumerate(self.basic):
            vals[var] = self.expr[i][0]
        return vals

    def duals(self):
        """Multipliers of the slack constraints from the final objective row."""
        y = [Fraction(0)] * (self.aux - self.n)
        for j, var in enumerate(self.nonbasic):
            if self.n <= var < self.aux:
                y[var - self.n] = -self.obj[j + 1]
        return y

    def unbounded_ray(self):
        j = self._unbounded_col
        vals = [Fraction(0)] * (self.aux + 1)
        vals[self.nonbasic[j]] = Fraction(1)
        for i, var in enumerate(self.basic):
            vals[var] = self.expr[i][j + 1]
        return vals
