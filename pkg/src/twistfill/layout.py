"""Positioned curve systems on a triangulated surface.

A Layout holds one or more transverse curves: points on interior edges (each
edge carries an ordered point list along its tail->head direction) and arcs
pairing up point "ends" inside triangles.  Within a triangle every arc is
realized as a straight chord of a disk whose boundary carries the triangle's
corners and edge points; two arcs cross exactly when their endpoints
interleave on that circle.  All queries reduce to integer arithmetic.

Ends: the end of point ``p`` facing incidence ``k`` of its edge is ``(p, k)``
where ``k`` indexes ``tri.edge_sides[edge]``.  The arc attached to ``(p, k)``
lives in triangle ``tri.edge_sides[edge][k][0]``.
"""

from fractions import Fraction

from .errors import InessentialCurve, ResourceCap, TwistfillError


class Limits:
    """Desk-scale guards; raise ResourceCap beyond them."""

    def __init__(self, max_points=2_000_000, max_crossings=1_000_000,
                 max_rounds=200_000):
        self.max_points = max_points
        self.max_crossings = max_crossings
        self.max_rounds = max_rounds


DEFAULT_LIMITS = Limits()


class Layout:
    def __init__(self, tri):
        self.tri = tri
        self.on_edge = [[] for _ in range(tri.n_edges)]
        self.pt_edge = {}
        self.owner = {}
        self.mate = {}
        self._next = 0

    # -- basic bookkeeping ----------------------------------------------------

    def new_point(self, e, index, owner):
        if self.tri.is_boundary(e):
            raise TwistfillError("points cannot lie on boundary edges")
        p = self._next
        self._next += 1
        self.on_edge[e].insert(index, p)
        self.pt_edge[p] = e
        self.owner[p] = owner
        return p

    def delete_point(self, p):
        e = self.pt_edge.pop(p)
        self.on_edge[e].remove(p)
        self.owner.pop(p)
        for k in (0, 1):
            self.mate.pop((p, k), None)

    def set_arc(self, end_a, end_b):
        self.mate[end_a] = end_b
        self.mate[end_b] = end_a

    def n_points(self):
        return len(self.pt_edge)

    def weights(self):
        return tuple(len(pts) for pts in self.on_edge)

    def end_triangle(self, p, k):
        return self.tri.edge_sides[self.pt_edge[p]][k][0]

    def incidence_toward(self, p, t):
        """Which end of p faces triangle t."""
        sides = self.tri.edge_sides[self.pt_edge[p]]
        for k, (tt, _s) in enumerate(sides):
            if tt == t:
                return k
        raise TwistfillError(f"point {p} not adjacent to triangle {t}")

    def copy(self):
        c = Layout(self.tri)
        c.on_edge = [list(x) for x in self.on_edge]
        c.pt_edge = dict(self.pt_edge)
        c.owner = dict(self.owner)
        c.mate = dict(self.mate)
        c._next = self._next
        return c

    def check(self):
        """Internal consistency; used liberally in tests."""
        for p, e in self.pt_edge.items():
            assert p in self.on_edge[e]
            for k in (0, 1):
                assert (p, k) in self.mate, (p, k)
                q, k2 = self.mate[(p, k)]
                assert self.mate[(q, k2)] == (p, k)
                assert self.end_triangle(p, k) == self.end_triangle(q, k2)
        for e, pts in enumerate(self.on_edge):
            for p in pts:
                assert self.pt_edge[p] == e

    # -- components -----------------------------------------------------------

    def components(self):
        """Cyclic point traversals, one per curve component.

        Each component is a list of (point, out_incidence) pairs: the strand
        leaves ``point`` through ``out_incidence`` to reach the next entry.
        Deterministic: components sorted by least point id, traversal starts
        there, leaving through incidence 0.
        """
        seen = set()
        comps = []
        for p0 in sorted(self.pt_edge):
            if p0 in seen:
                continue
            comp = []
            p, out_k = p0, 0
            while True:
                comp.append((p, out_k))
                seen.add(p)
                q, kq = self.mate[(p, out_k)]
                p, out_k = q, 1 - kq
                if (p, out_k) == (p0, 0):
                    break
                if len(comp) > 2 * len(self.pt_edge) + 4:
                    raise TwistfillError("component traversal runaway")
            comps.append(comp)
        return comps

    def component_count(self):
        return len(self.components())

    # -- per-triangle chord pictures -------------------------------------------

    def circle_nodes(self, t):
        """Boundary nodes of triangle t, ccw.

        Returns a list of ("corner", c) and ("pt", p, k) items; side s runs
        from corner (s+1)%3 to corner (s+2)%3, so the order is
        corner1, side0 pts, corner2, side1 pts, corner0, side2 pts.
        """
        out = []
        for s in range(3):
            out.append(("corner", (s + 1) % 3))
            e = self.tri.tri_edges[t][s]
            sign = self.tri.tri_signs[t][s]
            pts = self.on_edge[e]
            k = self.tri.edge_sides[e].index((t, s))
            ordered = pts if sign > 0 else list(reversed(pts))
            out.extend(("pt", p, k) for p in ordered)
        return out

    def tri_arcs(self, t):
        """Arcs inside triangle t as (lo, hi) circle index pairs with ends."""
        nodes = self.circle_nodes(t)
        pos = {}
        for i, node in enumerate(nodes):
            if node[0] == "pt":
                pos[(node[1], node[2])] = i
        arcs = []
        done = set()
        for (p, k), i in pos.items():
            if (p, k) in done:
                continue
            q, kq = self.mate[(p, k)]
            j = pos[(q, kq)]
            done.add((p, k))
            done.add((q, kq))
            lo, hi = (i, j) if i < j else (j, i)
            arcs.append((lo, hi, (p, k), (q, kq)))
        return nodes, arcs

    def crossing_count(self, limits=DEFAULT_LIMITS, same_owner_only=False,
                       pairs=None):
        """Total interleaving count over all triangles.

        ``pairs``: optional set of frozenset owner pairs to count; by default
        all pairs (including same-owner, which must be zero for embedded
        systems) are counted.
        """
        total = 0
        for t in range(self.tri.n_tris):
            _nodes, arcs = self.tri_arcs(t)
            n = len(arcs)
            for i in range(n):
                li, hi_, ei, _ = arcs[i]
                oi = self.owner[ei[0]]
                for j in range(i + 1, n):
                    lj, hj, ej, _ = arcs[j]
                    oj = self.owner[ej[0]]
                    if same_owner_only and oi != oj:
                        continue
                    if pairs is not None and frozenset((oi, oj)) not in pairs:
                        continue
                    if li < lj < hi_ < hj or lj < li < hj < hi_:
                        total += 1
                        if total > limits.max_crossings:
                            raise ResourceCap("crossing count exceeds cap")
        return total

    def assert_embedded(self):
        bad = self.crossing_count(same_owner_only=True)
        if bad:
            raise TwistfillError(f"layout has {bad} same-owner self-crossings")

    # -- merging ---------------------------------------------------------------

    @staticmethod
    def merge(layouts):
        """Disjointly combine layouts on one triangulation.

        Owners are re-tagged by input index.  Points of different inputs are
        interleaved by proportional position along each edge (ties broken by
        input index), which is an arbitrary but deterministic transverse
        overlay; callers needing minimal position must reduce afterwards.
        """
        tri = layouts[0].tri
        for l in layouts[1:]:
            if l.tri.structure_key() != tri.structure_key():
                raise TwistfillError("cannot merge layouts on different triangulations")
        out = Layout(tri)
        maps = [{} for _ in layouts]
        for e in range(tri.n_edges):
            entries = []
            for idx, l in enumerate(layouts):
                pts = l.on_edge[e]
                n = len(pts)
                for i, p in enumerate(pts):
                    entries.append((Fraction(i + 1, n + 1), idx, i, p))
            entries.sort(key=lambda x: (x[0], x[1], x[2]))
            for _frac, idx, _i, p in entries:
                np = out.new_point(e, len(out.on_edge[e]), idx)
                maps[idx][p] = np
        for idx, l in enumerate(layouts):
            for (p, k), (q, kq) in l.mate.items():
                out.mate[(maps[idx][p], k)] = (maps[idx][q], kq)
        return out, maps

    # -- canonical trace of normal coordinates ----------------------------------

    @staticmethod
    def from_weights(tri, weights, owner=0):
        """Canonical embedded normal position of admissible coordinates."""
        check_matching(tri, weights)
        lay = Layout(tri)
        for e in range(tri.n_edges):
            for _ in range(weights[e]):
                lay.new_point(e, len(lay.on_edge[e]), owner)

        def side_point(t, s, from_corner, depth):
            """depth-th point (1-based) counted from the given corner of side s."""
            e = tri.tri_edges[t][s]
            sign = tri.tri_signs[t][s]
            pts = lay.on_edge[e]
            ordered = pts if sign > 0 else list(reversed(pts))
            if from_corner == (s + 1) % 3:       # ccw start of the side
                p = ordered[depth - 1]
            else:                                 # ccw end
                p = ordered[len(ordered) - depth]
            k = tri.edge_sides[e].index((t, s))
            return (p, k)

        for t in range(tri.n_tris):
            w = [weights[tri.tri_edges[t][s]] for s in range(3)]
            for c in range(3):
                cnt = (w[(c + 1) % 3] + w[(c + 2) % 3] - w[c]) // 2
                for d in range(1, cnt + 1):
                    a = side_point(t, (c + 1) % 3, c, d)
                    b = side_point(t, (c + 2) % 3, c, d)
                    lay.set_arc(a, b)
        lay.check()
        lay.assert_embedded()
        return lay


def check_matching(tri, weights):
    """Normal-coordinate admissibility: parity and triangle inequalities."""
    if len(weights) != tri.n_edges:
        raise TwistfillError("weight vector length mismatch")
    if any(w < 0 for w in weights):
        raise TwistfillError("negative weight")
    for e in tri.boundary_edges:
        if weights[e] != 0:
            raise TwistfillError("nonzero weight on a boundary edge")
    for t in range(tri.n_tris):
        w = [weights[tri.tri_edges[t][s]] for s in range(3)]
        if sum(w) % 2:
            raise TwistfillError(f"odd weight sum at triangle {t}")
        for c in range(3):
            if w[c] > w[(c + 1) % 3] + w[(c + 2) % 3]:
                raise TwistfillError(f"triangle inequality fails at triangle {t}")


# -- reductions ----------------------------------------------------------------


def remove_returning_arcs(lay):
    """Splice away innermost arcs that enter and leave through one side.

    Returns the number of arcs removed.  Raises InessentialCurve when a
    component disappears (it bounded a disk).
    """
    removed = 0
    progress = True
    while progress:
        progress = False
        for e in range(lay.tri.n_edges):
            pts = lay.on_edge[e]
            i = 0
            while i + 1 < len(pts):
                p, q = pts[i], pts[i + 1]
                hit = None
                for k in (0, 1):
                    if lay.mate.get((p, k)) == (q, k):
                        hit = k
                        break
                if hit is None:
                    i += 1
                    continue
                k = hit
                op = lay.mate[(p, 1 - k)]
                oq = lay.mate[(q, 1 - k)]
                if op == (q, 1 - k):
                    raise InessentialCurve(
                        "component reduced to a contractible bubble")
                lay.delete_point(p)
                lay.delete_point(q)
                lay.set_arc(op, oq)
                removed += 1
                progress = True
                pts = lay.on_edge[e]
                i = max(i - 1, 0)
    return removed


def _depth_one_arc(lay, t, c):
    """The arc cutting corner c of t nearest the corner, or None.

    Returns (end_on_side_c1, end_on_side_c2) where side c+1 carries the first
    endpoint.  Only reported when both endpoints are the extreme points of
    their sides toward the corner.
    """
    tri = lay.tri
    s1, s2 = (c + 1) % 3, (c + 2) % 3
    e1, e2 = tri.tri_edges[t][s1], tri.tri_edges[t][s2]
    if not lay.on_edge[e1] or not lay.on_edge[e2]:
        return None
    # corner c sits at the ccw-end of side s1 and the ccw-start of side s2
    sign1, sign2 = tri.tri_signs[t][s1], tri.tri_signs[t][s2]
    p = lay.on_edge[e1][-1] if sign1 > 0 else lay.on_edge[e1][0]
    q = lay.on_edge[e2][0] if sign2 > 0 else lay.on_edge[e2][-1]
    k1 = tri.edge_sides[e1].index((t, s1))
    k2 = tri.edge_sides[e2].index((t, s2))
    if lay.mate.get((p, k1)) == (q, k2):
        return ((p, k1), (q, k2))
    return None


def vertex_reduction_pass(lay):
    """Slide innermost strand runs across interior vertices when that lowers
    the total edge weight.  Returns number of moves applied."""
    tri = lay.tri
    moves = 0
    for v in sorted(tri.fans):
        if v in tri.boundary_vertices or not tri.fan_cyclic[v]:
            continue
        while True:
            corners = tri.fans[v]
            d = len(corners)
            arcs = [_depth_one_arc(lay, t, c) for (t, c) in corners]
            # chain flags: arc i links to arc i+1 through the shared fan edge
            chained = []
            for i in range(d):
                a, b = arcs[i], arcs[(i + 1) % d]
                # a's endpoint on side c+2 of corner i must equal b's endpoint
                # on side c+1 of corner i+1 (same point on the shared edge)
                chained.append(a is not None and b is not None and a[1][0] == b[0][0])
            if d > 0 and all(chained):
                raise InessentialCurve("vertex-linking component found")
            # maximal runs of consecutive corners with depth-1 arcs, chained
            run = _best_vertex_run(arcs, chained, d)
            if run is None:
                break
            a0, length = run
            if (d - length - 1) >= (length + 1):
                break
            _apply_vertex_move(lay, v, a0, length)
            moves += 1
    return moves


def _best_vertex_run(arcs, chained, d):
    """Longest maximal run (start, length) of chained depth-1 corners."""
    best = None
    starts = [i for i in range(d)
              if arcs[i] is not None and not chained[(i - 1) % d]]
    for s in starts:
        ln = 1
        while ln < d and chained[(s + ln - 1) % d]:
            ln += 1
        if best is None or ln > best[1]:
            best = (s, ln)
    return best


def _apply_vertex_move(lay, v, run_start, run_len):
    """Push the depth-1 run across v onto the complementary fan ends."""
    tri = lay.tri
    corners = tri.fans[v]
    d = len(corners)
    arcs = [_depth_one_arc(lay, t, c) for (t, c) in corners]

    run = [arcs[(run_start + i) % d] for i in range(run_len)]
    # strand points along the run: first endpoint of each arc, plus the last
    path_pts = [run[0][0][0]] + [a[1][0] for a in run]
    owner = lay.owner[path_pts[0]]

    # flanking ends: the other arcs attached to the extreme path points
    first_pt, last_pt = path_pts[0], path_pts[-1]
    k_first = run[0][0][1]
    k_last = run[-1][1][1]
    flank_a = lay.mate[(first_pt, 1 - k_first)]   # lives in corner run_start-1
    flank_b = lay.mate[(last_pt, 1 - k_last)]     # lives in corner run_start+run_len

    for p in path_pts:
        lay.delete_point(p)
    # flank ends may have been attached to deleted points only via mate keys
    # of deleted points; the flank points themselves survive
    assert flank_a[0] in lay.pt_edge and flank_b[0] in lay.pt_edge

    # new chain crossing the complementary ends, from corner run_start-1
    # backwards to corner run_start+run_len
    new_ends = []
    idx = (run_start - 1) % d
    count = d - run_len - 1
    chain_pts = []
    for step in range(count):
        t, c = corners[(run_start - 1 - step) % d]
        # departing end of this corner is the edge between it and the next
        # corner counterclockwise; we travel clockwise, crossing the arriving
        # side of corner (run_start-1-step), i.e. the edge shared with the
        # previous corner in fan order
        e, end = tri.corner_arriving_end(t, c)
        # insert at the v end of e
        index = 0 if end == 0 else len(lay.on_edge[e])
        # end==0 means v is the tail, so the v-extreme is index 0
        p = lay.new_point(e, index, owner)
        chain_pts.append(p)
        new_ends.append((e, end))

    # arcs: flank_a -> chain[0] in corner (run_start-1)'s triangle;
    # chain[i] -> chain[i+1] cutting corner (run_start-2-i); last -> flank_b
    def end_toward(p, t):
        return (p, lay.incidence_toward(p, t))

    if count == 0:
        t_in = corners[(run_start - 1) % d][0]
        t_out = corners[(run_start + run_len) % d][0]
        assert t_in == t_out
        lay.set_arc(flank_a, flank_b)
        return

    t_in = corners[(run_start - 1) % d][0]
    lay.set_arc(flank_a, end_toward(chain_pts[0], t_in))
    for i in range(count - 1):
        t_mid = corners[(run_start - 2 - i) % d][0]
        lay.set_arc(end_toward(chain_pts[i], t_mid),
                    end_toward(chain_pts[i + 1], t_mid))
    t_out = corners[(run_start + run_len) % d][0]
    lay.set_arc(end_toward(chain_pts[-1], t_out), flank_b)


def normalize_layout(lay, limits=DEFAULT_LIMITS):
    """Reduce to the canonical taut position: no returning arcs, no
    weight-reducing vertex slides.  Mutates and returns the layout."""
    rounds = 0
    while True:
        rounds += 1
        if rounds > limits.max_rounds:
            raise ResourceCap("normalization did not stabilize under cap")
        a = remove_returning_arcs(lay)
        b = vertex_reduction_pass(lay)
        if a == 0 and b == 0:
            return lay
