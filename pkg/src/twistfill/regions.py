"""Arrangement analysis: cells, complement regions, bigon reduction.

Given a Layout (one or more embedded multicurves in transverse position) we
subdivide each triangle by its chords, glue cells across interior edge
intervals, and read off the complementary regions of the curve system as cut
surfaces: Euler characteristic, boundary circles, corner structure.  This
single piece of machinery drives geometric intersection numbers (via bigon
face reduction), the filling test, essentialness checks and the sound
isotopy test.

In-triangle geometry: the boundary nodes of a triangle live on a circle via
the rational parametrization u -> ((1-u^2)/(1+u^2), 2u/(1+u^2)); arcs are the
straight chords, so interleaving endpoints means exactly one crossing and
crossing order along a chord is exact Fraction arithmetic.
"""

from fractions import Fraction

from .errors import ResourceCap, TwistfillError
from .layout import DEFAULT_LIMITS


def _circle_coords(n, attempt):
    """n strictly increasing rational parameters; attempt jitters re-draws."""
    coords = []
    for i in range(n):
        u = Fraction(i - n // 2)
        if attempt:
            u += Fraction((attempt * 1009 + i * 31) % 97, 997)
        coords.append((1 - u * u, 2 * u, 1 + u * u))
    return coords


def _cross(o, a, b):
    """2x2 determinant of (a-o, b-o) for homogeneous rational points."""
    ax = Fraction(a[0], a[2]) - Fraction(o[0], o[2])
    ay = Fraction(a[1], a[2]) - Fraction(o[1], o[2])
    bx = Fraction(b[0], b[2]) - Fraction(o[0], o[2])
    by = Fraction(b[1], b[2]) - Fraction(o[1], o[2])
    return ax * by - ay * bx


class TriPicture:
    """Planar subdivision of one triangle by the layout's chords."""

    def __init__(self, lay, t):
        self.lay = lay
        self.t = t
        self.nodes, self.arcs = lay.tri_arcs(t)
        self._build()

    def _build(self):
        for attempt in range(12):
            try:
                self._build_attempt(attempt)
                return
            except _Concurrent:
                continue
        raise TwistfillError("could not draw chords in general position")

    def _build_attempt(self, attempt):
        M = len(self.nodes)
        coords = _circle_coords(M, attempt)
        arcs = self.arcs
        # crossings: interleaved chord pairs
        crossings = []         # (arc_i, arc_j)
        per_arc = [[] for _ in arcs]   # (param, crossing id)
        for i in range(len(arcs)):
            li, hi, _, _ = arcs[i]
            for j in range(i + 1, len(arcs)):
                lj, hj, _, _ = arcs[j]
                if li < lj < hi < hj or lj < li < hj < hi:
                    cid = len(crossings)
                    crossings.append((i, j))
                    P, Q = coords[li], coords[hi]
                    R, S = coords[lj], coords[hj]
                    ti = _cross(P, R, S) / (_cross(P, Q, S) - _cross(P, Q, R))
                    tj = _cross(R, P, Q) / (_cross(R, S, Q) - _cross(R, S, P))
                    if not (0 < ti < 1 and 0 < tj < 1):
                        raise TwistfillError("chord crossing parameter out of range")
                    per_arc[i].append((ti, cid))
                    per_arc[j].append((tj, cid))
        for lst in per_arc:
            lst.sort()
            for a in range(len(lst) - 1):
                if lst[a][0] == lst[a + 1][0]:
                    raise _Concurrent()
        self.crossings = crossings
        self.n_cross = len(crossings)

        # nodes: 0..M-1 circle, M+  crossings
        def xnode(cid):
            return M + cid

        # half-edges: list of (src, dst, kind, info); twin pairs adjacent
        he_src, he_dst, he_kind, he_info = [], [], [], []

        def add_pair(a, b, kind, info):
            h = len(he_src)
            he_src.extend([a, b])
            he_dst.extend([b, a])
            he_kind.extend([kind, kind])
            he_info.extend([info, info])
            return h  # forward id; twin = h ^ 1

        # circle segments
        self.circle_fwd = []
        for i in range(M):
            h = add_pair(i, (i + 1) % M, "circle", i)
            self.circle_fwd.append(h)

        # chord segments: for arc a, nodes along it
        self.arc_segments = [[] for _ in arcs]   # forward half ids, lo -> hi
        for a, (lo, hi, end_lo, end_hi) in enumerate(arcs):
            chain = [lo] + [xnode(cid) for (_t, cid) in per_arc[a]] + [hi]
            for u, v in zip(chain, chain[1:]):
                h = add_pair(u, v, "chord", a)
                self.arc_segments[a].append(h)

        n_nodes = M + self.n_cross
        out_at = [[] for _ in range(n_nodes)]   # outgoing half ids
        for h in range(len(he_src)):
            out_at[he_src[h]].append(h)

        # rotations (ccw outgoing order) -------------------------------------
        def towards(h):
            # circle position of the chord endpoint a chord half heads to:
            # even ids run lo->hi along their arc, odd ids hi->lo
            a = he_info[h]
            return self.arcs[a][1] if h % 2 == 0 else self.arcs[a][0]

        rotation = [None] * n_nodes
        for i in range(M):
            # boundary node: [to-next-circle, chord (at most one), to-prev]
            fwd = self.circle_fwd[i]
            back_prev = self.circle_fwd[(i - 1) % M] ^ 1
            chords = [h for h in out_at[i] if he_kind[h] == "chord"]
            if len(chords) > 1:
                raise TwistfillError("multiple chords at one boundary node")
            rotation[i] = [fwd] + chords + [back_prev]
        for cid in range(self.n_cross):
            n = xnode(cid)
            rotation[n] = sorted(out_at[n], key=towards)

        rot_index = {}
        for n, rot in enumerate(rotation):
            for pos, h in enumerate(rot):
                rot_index[h] = (n, pos)

        def nxt(h):
            tw = h ^ 1
            n, pos = rot_index[tw]
            rot = rotation[n]
            return rot[(pos - 1) % len(rot)]

        # face tracing
        face_of = [-1] * len(he_src)
        faces = []
        for h0 in range(len(he_src)):
            if face_of[h0] != -1:
                continue
            fid = len(faces)
            cyc = []
            h = h0
            while face_of[h] == -1:
                face_of[h] = fid
                cyc.append(h)
                h = nxt(h)
            if h != h0:
                raise TwistfillError("face tracing failed to close")
            faces.append(cyc)

        # outer face: contains the backward circle halves
        outer = face_of[self.circle_fwd[0] ^ 1]
        for i in range(M):
            if face_of[self.circle_fwd[i] ^ 1] != outer:
                raise TwistfillError("outer face not unique")

        self.n_halfedges = len(he_src)
        self.he_src, self.he_dst = he_src, he_dst
        self.he_kind, self.he_info = he_kind, he_info
        self.face_of = face_of
        self.faces = faces
        self.outer = outer
        self.next = nxt
        self.M = M

        # circle segment i (from node i to i+1) -> (edge, edge-interval index);
        # interval j of edge e sits between edge-order points j-1 and j
        tri = self.lay.tri
        t = self.t
        seg_ei = [None] * M
        pos = 0
        for s in range(3):
            e = tri.tri_edges[t][s]
            k = len(self.lay.on_edge[e])
            sign = tri.tri_signs[t][s]
            for local in range(k + 1):
                i = pos + local
                seg_ei[i] = (e, local if sign > 0 else k - local)
            pos += 1 + k
        self._seg_ei = seg_ei

    def circle_segment_edge_interval(self, i):
        return self._seg_ei[i]


class _Concurrent(Exception):
    pass


class Arrangement:
    """Region decomposition of the complement of a layout's curves."""

    def __init__(self, lay, limits=DEFAULT_LIMITS):
        self.lay = lay
        self.tri = lay.tri
        self.limits = limits
        self._build()

    def _build(self):
        lay = self.lay
        tri = self.tri
        if lay.n_points() > self.limits.max_points:
            raise ResourceCap("layout exceeds point cap")
        self.pics = [TriPicture(lay, t) for t in range(tri.n_tris)]
        self.n_crossings = sum(p.n_cross for p in self.pics)
        if self.n_crossings > self.limits.max_crossings:
            raise ResourceCap("arrangement exceeds crossing cap")

        # global cells: (t, face) excluding outer faces
        cell_id = {}
        for t, pic in enumerate(self.pics):
            for f in range(len(pic.faces)):
                if f != pic.outer:
                    cell_id[(t, f)] = len(cell_id)
        self.cell_id = cell_id

        # gluing across interior edge intervals
        parent = list(range(len(cell_id)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry

        interval_cells = {}
        self.interval_halves = {}
        for t, pic in enumerate(self.pics):
            for i in range(pic.M):
                h = pic.circle_fwd[i]
                e, interval = pic.circle_segment_edge_interval(i)
                c = cell_id[(t, pic.face_of[h])]
                interval_cells.setdefault((e, interval), []).append(c)
                self.interval_halves.setdefault((e, interval), []).append((t, h))
        n_glued = {}
        for (e, interval), cells in interval_cells.items():
            if tri.is_boundary(e):
                if len(cells) != 1:
                    raise TwistfillError("boundary interval glued twice")
            else:
                if len(cells) != 2:
                    raise TwistfillError("interior interval not doubly covered")
                union(cells[0], cells[1])
        self.interval_cells = interval_cells

        region_of_cell = {}
        regions = {}
        for c in range(len(cell_id)):
            r = find(c)
            region_of_cell[c] = r
        self.region_of_cell = region_of_cell

        # tallies
        n_cells = {}
        for c in range(len(cell_id)):
            n_cells[region_of_cell[c]] = n_cells.get(region_of_cell[c], 0) + 1
        glued_count = {}
        for (e, interval), cells in interval_cells.items():
            if not tri.is_boundary(e):
                r = region_of_cell[cells[0]]
                if region_of_cell[cells[1]] != r:
                    raise TwistfillError("gluing crosses regions")
                glued_count[r] = glued_count.get(r, 0) + 1
        interior_v = {}
        self.vertex_region = {}
        for v in range(tri.n_vertices):
            # cell containing any corner of v
            (t, c) = tri.fans[v][0]
            pic = self.pics[t]
            # corner node index: position of ("corner", c) in pic.nodes
            ci = pic.nodes.index(("corner", c))
            h = pic.circle_fwd[ci]
            cell = self.cell_id[(t, pic.face_of[h])]
            r = region_of_cell[cell]
            self.vertex_region[v] = r
            if v not in tri.boundary_vertices:
                interior_v[r] = interior_v.get(r, 0) + 1

        self.region_ids = sorted(n_cells)
        self.chi = {r: n_cells[r] - glued_count.get(r, 0) + interior_v.get(r, 0)
                    for r in self.region_ids}
        self._trace_region_boundaries()

    # -- region boundary circles ------------------------------------------------

    def _glue_partner(self, t, h):
        pic = self.pics[t]
        i = pic.he_info[h]
        e, interval = pic.circle_segment_edge_interval(i)
        halves = self.interval_halves[(e, interval)]
        if len(halves) == 1:
            return None
        for (t2, h2) in halves:
            if (t2, h2) != (t, h):
                return (t2, h2)
        raise TwistfillError("glue partner lookup failed")

    def _succ(self, t, h, trail=None):
        """Next non-glued half-edge along the region boundary; optionally
        record traversed points as (pid, edge, interval_used)."""
        pic = self.pics[t]
        x = pic.next(h)
        while True:
            if pic.he_kind[x] == "chord":
                return (t, x)
            # circle segment: forward halves may be glued
            if x % 2 == 1:
                raise TwistfillError("region walk met a backward circle half")
            partner = self._glue_partner(t, x)
            if partner is None:
                return (t, x)   # boundary-of-surface segment: emit
            if trail is not None:
                i = pic.he_info[x]
                e, interval = pic.circle_segment_edge_interval(i)
                # the node shared by x and the continuing chord is a point
                node = pic.nodes[pic.he_dst[x]]
                node2 = pic.nodes[pic.he_src[x]]
                pid = None
                for nd in (node, node2):
                    if nd[0] == "pt":
                        pid = nd[1]
                trail.append((pid, e, interval))
            (t, x2) = partner
            pic = self.pics[t]
            x = pic.next(x2)

    def _trace_region_boundaries(self):
        self.circles = {r: [] for r in self.region_ids}
        visited = set()
        for t, pic in enumerate(self.pics):
            for h in range(pic.n_halfedges):
                if pic.he_kind[h] == "chord":
                    pass
                elif self._is_surface_boundary_half(t, h):
                    pass
                else:
                    continue
                if (t, h) in visited:
                    continue
                circle = self._walk_circle(t, h, visited)
                r = self._region_of_half(t, h)
                self.circles[r].append(circle)

    def _is_surface_boundary_half(self, t, h):
        pic = self.pics[t]
        if pic.he_kind[h] != "circle" or h % 2 == 1:
            return False
        i = pic.he_info[h]
        e, _ = pic.circle_segment_edge_interval(i)
        return self.tri.is_boundary(e)

    def _region_of_half(self, t, h):
        pic = self.pics[t]
        return self.region_of_cell[self.cell_id[(t, pic.face_of[h])]]

    def _walk_circle(self, t0, h0, visited):
        items = []
        t, h = t0, h0
        guard = 0
        while True:
            visited.add((t, h))
            pic = self.pics[t]
            if pic.he_kind[h] == "chord":
                items.append(("strand", t, h))
            else:
                e, _ = pic.circle_segment_edge_interval(pic.he_info[h])
                items.append(("sboundary", e))
            trail = []
            (t2, h2) = self._succ(t, h, trail)
            if trail:
                items.append(("through", trail))
            t, h = t2, h2
            guard += 1
            if (t, h) == (t0, h0):
                break
            if guard > 4 * (self.lay.n_points() + self.n_crossings + 10):
                raise TwistfillError("region boundary walk runaway")
        return items

    # -- derived data -----------------------------------------------------------

    def circle_summary(self, circle):
        """(n_corners, corner list, owner set, has_surface_boundary).

        A corner is a chord->chord transition at a crossing node, emitted as
        (t, crossing id, owner_a, owner_b).
        """
        strands = [(i, it) for i, it in enumerate(circle) if it[0] != "through"]
        n = len(strands)
        corners = []
        owners = set()
        has_b = False
        for idx, (i, it) in enumerate(strands):
            if it[0] == "sboundary":
                has_b = True
                continue
            t, h = it[1], it[2]
            pic = self.pics[t]
            a = pic.he_info[h]
            own = self.lay.owner[self.arc_owner_point(t, a)]
            owners.add(own)
            # corner when the next strand item is a chord reached at a crossing
            j, jt = strands[(idx + 1) % n]
            if jt[0] != "strand":
                continue
            # transition h -> next: corner iff dst(h) is a crossing node and
            # there was no 'through' item between (chord to chord directly)
            between = (j - i) % len(circle)
            direct = between == 1
            if direct:
                node = pic.he_dst[h]
                if node >= pic.M:
                    t2, h2 = jt[1], jt[2]
                    a2 = self.pics[t2].he_info[h2]
                    own2 = self.lay.owner[self.arc_owner_point(t2, a2)]
                    corners.append((t, node - pic.M, own, own2))
        return len(corners), corners, owners, has_b

    def arc_owner_point(self, t, arc_idx):
        return self.pics[t].arcs[arc_idx][2][0]

    def region_report(self):
        """List of per-region dicts: chi, circles info, boundary cycles."""
        # map surface boundary cycles fully contained in a region's circles
        cycle_of_edge = {}
        for ci, cyc in enumerate(self.tri.boundary_cycles):
            for e in cyc:
                cycle_of_edge[e] = ci
        out = []
        for r in self.region_ids:
            circles = self.circles[r]
            summary = []
            bcycles = set()
            for c in circles:
                ncorn, corners, owners, has_b = self.circle_summary(c)
                pure_b = has_b and all(it[0] != "strand" for it in c)
                if pure_b:
                    edges = {it[1] for it in c if it[0] == "sboundary"}
                    bcycles.update(cycle_of_edge[e] for e in edges)
                summary.append({
                    "corners": ncorn,
                    "corner_list": corners,
                    "owners": owners,
                    "has_surface_boundary": has_b,
                    "pure_surface_boundary": pure_b,
                })
            out.append({
                "region": r,
                "chi": self.chi[r],
                "circles": summary,
                "raw_circles": circles,
                "boundary_cycles": sorted(bcycles),
            })
        return out


# -- bigon reduction -------------------------------------------------------------


def _side_owner(arr, item):
    t, h = item[1], item[2]
    return arr.lay.owner[arr.arc_owner_point(t, arr.pics[t].he_info[h])]


def find_bigons(arr):
    """Empty bigon faces: disk regions with exactly two crossing corners whose
    two smooth sides lie on different owners.  Returns region reports."""
    out = []
    for r in arr.region_ids:
        if arr.chi[r] != 1 or len(arr.circles[r]) != 1:
            continue
        circle = arr.circles[r][0]
        ncorn, corners, owners, has_b = arr.circle_summary(circle)
        if has_b or ncorn != 2 or len(owners) != 2:
            continue
        if corners[0][:2] == corners[1][:2]:
            continue  # both corners at one crossing: not a reducible bigon
        out.append((r, circle, corners))
    return out


def _bigon_sides(arr, circle):
    """Split a 2-corner bigon circle into its two smooth sides.

    Each side: dict(owner, halves=[(t,h)..], trail=[(pid,e,interval)..]).
    """
    items = circle
    n = len(items)
    # corner positions: index i such that items[i] and items[(i+1)%n] are both
    # strands meeting at a crossing node
    corner_pos = []
    for i, it in enumerate(items):
        if it[0] != "strand":
            continue
        jt = items[(i + 1) % n]
        if jt[0] != "strand":
            continue
        t, h = it[1], it[2]
        if arr.pics[t].he_dst[h] >= arr.pics[t].M:
            corner_pos.append(i)
    if len(corner_pos) != 2:
        raise TwistfillError("bigon circle does not have two corners")
    i1, i2 = corner_pos

    def collect(start, stop):
        side = {"halves": [], "trail": []}
        j = start
        while True:
            it = items[j % n]
            if it[0] == "strand":
                side["halves"].append((it[1], it[2]))
            else:
                side["trail"].extend(it[1])
            if j % n == stop:
                break
            j += 1
        return side

    side1 = collect((i1 + 1) % n, i2)
    side2 = collect((i2 + 1) % n, i1)
    for s in (side1, side2):
        t, h = s["halves"][0]
        s["owner"] = arr.lay.owner[arr.arc_owner_point(t, arr.pics[t].he_info[h])]
        for (pid, _e, _iv) in s["trail"]:
            if pid is None:
                raise TwistfillError("bigon side trail passed a corner node")
    return side1, side2


def _half_endpoints(arr, t, h):
    """(backward_end, forward_end) arc endpoints of the chord through half h."""
    pic = arr.pics[t]
    a = pic.he_info[h]
    lo_end, hi_end = pic.arcs[a][2], pic.arcs[a][3]
    return (lo_end, hi_end) if h % 2 == 0 else (hi_end, lo_end)


def apply_bigon_move(lay, arr, circle):
    """Isotope one curve across an empty bigon; crossings drop by exactly 2."""
    side1, side2 = _bigon_sides(arr, circle)
    keep, drop = (side1, side2) if side1["owner"] < side2["owner"] else (side2, side1)

    # points of the dropped path
    drop_pts = [pid for (pid, _e, _iv) in drop["trail"]]
    t_first, h_first = drop["halves"][0]
    t_last, h_last = drop["halves"][-1]
    end_b0, _ = _half_endpoints(arr, t_first, h_first)
    _, end_bend = _half_endpoints(arr, t_last, h_last)

    # triangles along the kept side
    kept_tris = [t for (t, _h) in keep["halves"]]
    u = len(keep["trail"])
    assert len(keep["halves"]) == u + 1

    owner = drop["owner"]
    dropset = set(drop_pts)
    if len(drop["halves"]) != len(drop_pts) + 1:
        raise TwistfillError("dropped bigon side structure inconsistent")
    consumed = end_b0[0] in dropset or end_bend[0] in dropset
    if consumed:
        if not (end_b0[0] in dropset and end_bend[0] in dropset):
            raise TwistfillError("bigon consumed a component asymmetrically")
        if u == 0:
            raise TwistfillError("bigon would erase a curve component")

    # insertion sides relative to kept points, from pre-mutation positions
    plan = []
    for (pid, e, interval) in keep["trail"]:
        pos = lay.on_edge[e].index(pid)
        if interval == pos:          # bigon on the tail side of pid
            plan.append((pid, e, True))
        elif interval == pos + 1:
            plan.append((pid, e, False))
        else:
            raise TwistfillError("kept-side interval inconsistent")

    # dissolve old arcs: every arc underlying drop halves, and the arcs of the
    # dropped points
    for (t, h) in drop["halves"]:
        pic = arr.pics[t]
        a = pic.he_info[h]
        for end in (pic.arcs[a][2], pic.arcs[a][3]):
            lay.mate.pop(end, None)
    for pid in drop_pts:
        lay.delete_point(pid)

    # new points alongside the kept path, on the side away from the bigon
    new_pts = []
    for (pid, e, after) in plan:
        pos = lay.on_edge[e].index(pid)
        idx = pos + 1 if after else pos
        new_pts.append(lay.new_point(e, idx, owner))

    def end_toward(p, t):
        return (p, lay.incidence_toward(p, t))

    # the kept side runs corner1 -> corner2 around the bigon; the dropped side
    # runs corner2 -> corner1, so the replacement path attaches in reverse:
    # end_b0 (behind corner2) joins new_pts[-1], end_bend joins new_pts[0]
    if consumed:
        # the dropped component's surviving image is the new parallel cycle
        assert u >= 1
        for j in range(1, u):
            lay.set_arc(end_toward(new_pts[j], kept_tris[j]),
                        end_toward(new_pts[j - 1], kept_tris[j]))
        if kept_tris[0] != kept_tris[-1]:
            raise TwistfillError("consumed-component bigon spans two triangles")
        lay.set_arc(end_toward(new_pts[0], kept_tris[0]),
                    end_toward(new_pts[-1], kept_tris[0]))
        return

    if u == 0:
        if kept_tris[0] != kept_tris[-1]:
            raise TwistfillError("pointless bigon side spans two triangles")
        lay.set_arc(end_b0, end_bend)
        return

    lay.set_arc(end_b0, end_toward(new_pts[-1], kept_tris[-1]))
    for j in range(1, u):
        lay.set_arc(end_toward(new_pts[j], kept_tris[j]),
                    end_toward(new_pts[j - 1], kept_tris[j]))
    lay.set_arc(end_toward(new_pts[0], kept_tris[0]), end_bend)


def reduce_bigons(lay, limits=DEFAULT_LIMITS):
    """Remove empty bigons until none remain; the layout is then in pairwise
    minimal position (innermost bigons are always faces).  Returns the final
    Arrangement."""
    rounds = 0
    while True:
        rounds += 1
        if rounds > limits.max_rounds:
            raise ResourceCap("bigon reduction exceeded round cap")
        arr = Arrangement(lay, limits)
        bigons = find_bigons(arr)
        if not bigons:
            return arr
        # apply the first bigon (deterministic order by region id)
        bigons.sort(key=lambda x: x[0])
        _r, circle, _corners = bigons[0]
        apply_bigon_move(lay, arr, circle)
