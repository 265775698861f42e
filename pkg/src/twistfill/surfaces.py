"""Surfaces and their canonical triangulations.

Combinatorial conventions (see docs/conventions.md for the full statement):

* every triangle lists its three sides in slots 0,1,2, counterclockwise with
  respect to the global orientation;
* corner ``c`` of a triangle is the corner opposite side ``c``; side ``s``
  runs from corner ``(s+1)%3`` to corner ``(s+2)%3`` when traversed ccw;
* ``tri_signs[t][s]`` is +1 when the ccw traversal of slot ``s`` agrees with
  the intrinsic tail->head direction of the underlying edge;
* an interior edge is traversed with opposite signs by its two sides (this is
  exactly orientability of the gluing), a boundary edge has one side.

Triangulations here are Delta-complexes: edges may be loops and two sides of
one triangle may share an edge in principle, but the canonical builders below
never produce a triangle carrying the same edge twice (asserted), which keeps
normal-coordinate bookkeeping per side equal to bookkeeping per edge.
"""

from dataclasses import dataclass

from .errors import TwistfillError


@dataclass(frozen=True)
class SurfaceSpec:
    """Compact oriented surface of given genus with `boundary` boundary circles."""

    genus: int
    boundary: int

    def __post_init__(self):
        if self.genus < 0 or self.boundary < 0:
            raise ValueError("genus and boundary must be nonnegative")

    def euler(self):
        return 2 - 2 * self.genus - self.boundary

    def complexity(self):
        return 3 * self.genus - 3 + self.boundary

    def label(self):
        return f"S_{self.genus},{self.boundary}"


class Triangulation:
    """Oriented Delta-complex triangulation with derived incidence structure.

    Instances are immutable by convention: build once, then treat as frozen.
    """

    def __init__(self, spec, name, tri_edges, tri_signs, n_edges, boundary_edges, meta=None):
        self.spec = spec
        self.name = name
        self.tri_edges = [tuple(t) for t in tri_edges]
        self.tri_signs = [tuple(s) for s in tri_signs]
        self.n_tris = len(tri_edges)
        self.n_edges = n_edges
        self.boundary_edges = frozenset(boundary_edges)
        self.meta = meta or {}
        self._derive()
        self._validate()

    # -- construction helpers -------------------------------------------------

    def _derive(self):
        edge_sides = [[] for _ in range(self.n_edges)]
        for t in range(self.n_tris):
            if len(set(self.tri_edges[t])) != 3:
                raise TwistfillError(f"triangle {t} repeats an edge")
            for s in range(3):
                edge_sides[self.tri_edges[t][s]].append((t, s))
        self.edge_sides = [tuple(x) for x in edge_sides]

        # vertices: union-find over triangle corners sharing an edge end
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        for t in range(self.n_tris):
            for c in range(3):
                parent[(t, c)] = (t, c)
        for e in range(self.n_edges):
            sides = self.edge_sides[e]
            tails, heads = [], []
            for (t, s) in sides:
                sign = self.tri_signs[t][s]
                start = (t, (s + 1) % 3)  # ccw-start corner of the side
                end = (t, (s + 2) % 3)
                if sign > 0:
                    tails.append(start)
                    heads.append(end)
                else:
                    tails.append(end)
                    heads.append(start)
            for grp in (tails, heads):
                for other in grp[1:]:
                    union(grp[0], other)

        roots = {}
        self.vertex_of_corner = {}
        for t in range(self.n_tris):
            for c in range(3):
                r = find((t, c))
                if r not in roots:
                    roots[r] = len(roots)
                self.vertex_of_corner[(t, c)] = roots[r]
        self.n_vertices = len(roots)

        self.edge_tail = [None] * self.n_edges
        self.edge_head = [None] * self.n_edges
        for e in range(self.n_edges):
            t, s = self.edge_sides[e][0]
            sign = self.tri_signs[t][s]
            start = self.vertex_of_corner[(t, (s + 1) % 3)]
            end = self.vertex_of_corner[(t, (s + 2) % 3)]
            self.edge_tail[e], self.edge_head[e] = (start, end) if sign > 0 else (end, start)

        self._build_fans()
        self._build_boundary_cycles()

    def is_boundary(self, e):
        return e in self.boundary_edges

    def other_side(self, t, s):
        """The opposite (triangle, slot) incidence across the edge at (t, s)."""
        e = self.tri_edges[t][s]
        sides = self.edge_sides[e]
        if len(sides) == 1:
            return None
        return sides[1] if sides[0] == (t, s) else sides[0]

    def corner_successor(self, t, c):
        """Next corner ccw around the vertex, crossing the departing side."""
        s = (c + 2) % 3
        nxt = self.other_side(t, s)
        if nxt is None:
            return None
        t2, s2 = nxt
        return (t2, (s2 + 2) % 3)

    def corner_predecessor(self, t, c):
        s = (c + 1) % 3
        nxt = self.other_side(t, s)
        if nxt is None:
            return None
        t2, s2 = nxt
        return (t2, (s2 + 1) % 3)

    def _build_fans(self):
        """Fans: ccw-ordered corner lists per vertex (cyclic iff interior vertex)."""
        self.fans = {}
        self.fan_cyclic = {}
        seen = set()
        for t in range(self.n_tris):
            for c in range(3):
                if (t, c) in seen:
                    continue
                v = self.vertex_of_corner[(t, c)]
                if v in self.fans:
                    raise TwistfillError("fan walk missed a corner of its vertex")
                # rewind to the fan start (corner whose arriving side is boundary)
                start, cur, cyclic, guard = (t, c), (t, c), True, 0
                while True:
                    prev = self.corner_predecessor(*cur)
                    if prev is None:
                        cyclic = False
                        start = cur
                        break
                    cur = prev
                    if cur == (t, c):
                        start = (t, c)
                        break
                    guard += 1
                    if guard > 3 * self.n_tris:
                        raise TwistfillError("fan walk failed to terminate")
                chain = [start]
                cur = start
                while True:
                    nxt = self.corner_successor(*cur)
                    if nxt is None or nxt == start:
                        break
                    chain.append(nxt)
                    cur = nxt
                    if len(chain) > 3 * self.n_tris:
                        raise TwistfillError("fan walk failed to terminate")
                self.fans[v] = chain
                self.fan_cyclic[v] = cyclic
                seen.update(chain)
        # consistency: fans partition the corners
        total = sum(len(ch) for ch in self.fans.values())
        if total != 3 * self.n_tris:
            raise TwistfillError("fans do not partition corners")

    def corner_arriving_end(self, t, c):
        """(edge, end) arriving at corner c along side c+1; end: 0=tail, 1=head."""
        s = (c + 1) % 3
        e = self.tri_edges[t][s]
        return (e, 1 if self.tri_signs[t][s] > 0 else 0)

    def corner_departing_end(self, t, c):
        s = (c + 2) % 3
        e = self.tri_edges[t][s]
        return (e, 0 if self.tri_signs[t][s] > 0 else 1)

    def fan_ends(self, v):
        """Edge ends around v in ccw fan order.

        For a boundary vertex the first and last entries are the two boundary
        side ends; for an interior vertex the list is cyclic (one entry per
        fan corner, the end crossed after that corner).
        """
        corners = self.fans[v]
        if self.fan_cyclic[v]:
            return [self.corner_departing_end(t, c) for (t, c) in corners]
        ends = [self.corner_arriving_end(*corners[0])]
        ends.extend(self.corner_departing_end(t, c) for (t, c) in corners)
        return ends

    def _build_boundary_cycles(self):
        nxt = {}
        for e in sorted(self.boundary_edges):
            (t, s) = self.edge_sides[e][0]
            cur = (t, (s + 2) % 3)  # corner at the ccw-end of the boundary side
            guard = 0
            while True:
                dep_s = (cur[1] + 2) % 3
                dep_e = self.tri_edges[cur[0]][dep_s]
                if self.is_boundary(dep_e):
                    nxt[e] = dep_e
                    break
                cur = self.corner_successor(*cur)
                guard += 1
                if cur is None or guard > 3 * self.n_tris:
                    raise TwistfillError("boundary walk failed")
        cycles = []
        remaining = set(nxt)
        while remaining:
            e0 = min(remaining)
            cyc = [e0]
            remaining.discard(e0)
            e = nxt[e0]
            while e != e0:
                cyc.append(e)
                remaining.discard(e)
                e = nxt[e]
            cycles.append(cyc)
        self.boundary_cycles = cycles
        self.boundary_vertices = set()
        for cyc in cycles:
            for e in cyc:
                self.boundary_vertices.add(self.edge_tail[e])
                self.boundary_vertices.add(self.edge_head[e])

    def _validate(self):
        for e in range(self.n_edges):
            sides = self.edge_sides[e]
            if self.is_boundary(e):
                if len(sides) != 1:
                    raise TwistfillError(f"boundary edge {e} has {len(sides)} sides")
            else:
                if len(sides) != 2:
                    raise TwistfillError(f"interior edge {e} has {len(sides)} sides")
                (t1, s1), (t2, s2) = sides
                if self.tri_signs[t1][s1] == self.tri_signs[t2][s2]:
                    raise TwistfillError(f"edge {e} glued orientation-reversingly")
        chi = self.n_vertices - self.n_edges + self.n_tris
        if chi != self.spec.euler():
            raise TwistfillError(
                f"Euler characteristic mismatch: {chi} != {self.spec.euler()}")
        if len(self.boundary_cycles) != self.spec.boundary:
            raise TwistfillError("boundary cycle count mismatch")

    # -- misc ------------------------------------------------------------------

    def vertex_degree(self, v):
        return len(self.fan_ends(v))

    def structure_key(self):
        return (self.name, self.spec.genus, self.spec.boundary,
                tuple(self.tri_edges), tuple(self.tri_signs),
                tuple(sorted(self.boundary_edges)))

    def __repr__(self):
        return (f"Triangulation({self.name}: {self.spec.label()}, "
                f"V={self.n_vertices} E={self.n_edges} F={self.n_tris})")


def _polygon_word(g, m):
    """Token list for the fundamental polygon a1 b1 a1' b1' ... d1 c1 d1' ..."""
    word = []
    for k in range(g):
        word += [("a", k, 0), ("b", k, 0), ("a", k, 1), ("b", k, 1)]
    for r in range(m):
        word += [("d", r, 0), ("c", r, 0), ("d", r, 1)]
    return word


def build_triangulation(spec):
    """Canonical fan triangulation of the polygon model for the surface.

    Deterministic for each (genus, boundary); rejected unless 3g-3+m > 0.
    Edge order: polygon-side edges first (in first-occurrence order), then the
    fan diagonals diag_2 .. diag_{N-2}.
    """
    g, m = spec.genus, spec.boundary
    if spec.complexity() <= 0:
        raise TwistfillError(
            f"surface {spec.label()} rejected: 3g-3+m = {spec.complexity()} <= 0")
    word = _polygon_word(g, m)
    n = len(word)

    edge_of_token = {}
    side_edge = []
    side_sign = []
    boundary = []
    for p, (kind, idx, occ) in enumerate(word):
        key = (kind, idx)
        if kind == "c":
            e = len(edge_of_token)
            edge_of_token[(kind, idx, p)] = e
            side_edge.append(e)
            side_sign.append(1)
            boundary.append(e)
        elif occ == 0:
            e = len(edge_of_token)
            edge_of_token[key] = e
            side_edge.append(e)
            side_sign.append(1)
        else:
            side_edge.append(edge_of_token[key])
            side_sign.append(-1)
    n_sides = len(edge_of_token)
    diag_edge = {}
    for i in range(2, n - 1):
        diag_edge[i] = n_sides + (i - 2)
    n_edges = n_sides + max(0, n - 3)

    tri_edges, tri_signs = [], []
    for i in range(1, n - 1):
        if i == 1:
            slot0 = (side_edge[0], side_sign[0])
        else:
            slot0 = (diag_edge[i], 1)
        slot1 = (side_edge[i], side_sign[i])
        if i == n - 2:
            slot2 = (side_edge[n - 1], side_sign[n - 1])
        else:
            slot2 = (diag_edge[i + 1], -1)
        tri_edges.append((slot0[0], slot1[0], slot2[0]))
        tri_signs.append((slot0[1], slot1[1], slot2[1]))

    meta = {
        "kind": "fan",
        "word": word,
        "side_edge": side_edge,
        "diag_edge": diag_edge,
        "handle_side": {("a", k): word.index(("a", k, 0)) for k in range(g)}
        | {("b", k): word.index(("b", k, 0)) for k in range(g)},
    }
    tri = Triangulation(spec, f"fan-g{g}-b{m}", tri_edges, tri_signs, n_edges,
                        boundary, meta)
    if m > 0 and tri.n_vertices != m + 1:
        raise TwistfillError("unexpected vertex count in polygon model")
    if m == 0 and tri.n_vertices != 1:
        raise TwistfillError("closed polygon model should have one vertex")
    return tri


def double_triangulation(base):
    """Glue two mirror copies of a bounded triangulation along its boundary.

    Returns (double, mirror_edge, seam_edges) where mirror_edge is the edge
    involution swapping the copies (fixing exactly the seam edges) and
    seam_edges lists, per boundary cycle of the base, the shared edges.
    """
    if not base.boundary_edges:
        raise TwistfillError("doubling requires a nonempty boundary")
    g, m = base.spec.genus, base.spec.boundary
    spec2 = SurfaceSpec(2 * g + m - 1, 0)

    shift = {}
    nxt = base.n_edges
    for e in range(base.n_edges):
        if base.is_boundary(e):
            shift[e] = e
        else:
            shift[e] = nxt
            nxt += 1
    n_edges = nxt

    tri_edges = list(base.tri_edges)
    tri_signs = list(base.tri_signs)
    for t in range(base.n_tris):
        e0, e1, e2 = base.tri_edges[t]
        s0, s1, s2 = base.tri_signs[t]
        # mirror image traversed ccw: reverse the slot order and flip signs
        tri_edges.append((shift[e2], shift[e1], shift[e0]))
        tri_signs.append((-s2, -s1, -s0))

    mirror_edge = {}
    for e in range(base.n_edges):
        mirror_edge[e] = shift[e]
        mirror_edge[shift[e]] = e

    meta = {
        "kind": "double",
        "base_name": base.name,
        "base_spec": (g, m),
        "mirror_edge": dict(mirror_edge),
        "copy_edge": dict(shift),
        "n_base_tris": base.n_tris,
        "base_meta": base.meta,
        "seam_cycles": [list(c) for c in base.boundary_cycles],
    }
    double = Triangulation(spec2, f"double-g{g}-b{m}", tri_edges, tri_signs,
                           n_edges, [], meta)
    seam_edges = [list(c) for c in base.boundary_cycles]
    return double, mirror_edge, seam_edges


def mirror_triangle(double, t):
    """Index of the mirror copy of triangle t inside a doubled triangulation."""
    nb = double.meta["n_base_tris"]
    return t + nb if t < nb else t - nb
