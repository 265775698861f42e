"""Deterministic template curves on the canonical fan triangulations.

Walks are cyclic lists of (edge, exit_incidence): cross the edge, emerging in
triangle ``tri.edge_sides[edge][exit_incidence][0]``, where the arc to the
next crossing lives.  ``embed_walk`` realizes a walk as an embedded layout,
searching the (tiny, for templates) per-edge orderings.
"""

from itertools import permutations

from .curves import MultiCurve
from .errors import TwistfillError
from .layout import Layout


def walk_consistent(tri, walk):
    n = len(walk)
    for i in range(n):
        e, k = walk[i]
        t_exit = tri.edge_sides[e][k][0]
        e2, k2 = walk[(i + 1) % n]
        t_entry = tri.edge_sides[e2][1 - k2][0]
        if t_exit != t_entry:
            return False
    return True


def embed_walk(tri, walk, owner=0, max_tries=200_000):
    """Realize a closed walk as an embedded positioned curve.

    Tries per-edge orderings of the walk's crossings until the layout has no
    self-crossings; deterministic (lexicographic order of permutations).
    """
    if not walk_consistent(tri, walk):
        raise TwistfillError("walk is not a closed transverse curve")
    by_edge = {}
    for i, (e, _k) in enumerate(walk):
        by_edge.setdefault(e, []).append(i)
    edges = sorted(by_edge)
    perm_sets = [list(permutations(by_edge[e])) for e in edges]
    tries = 0

    def build(choice):
        lay = Layout(tri)
        pid_of = {}
        for e, perm in zip(edges, choice):
            for idx in perm:
                pid_of[idx] = lay.new_point(e, len(lay.on_edge[e]), owner)
        n = len(walk)
        for i in range(n):
            e, k = walk[i]
            e2, k2 = walk[(i + 1) % n]
            t = tri.edge_sides[e][k][0]
            lay.set_arc((pid_of[i], k), (pid_of[(i + 1) % n], 1 - k2))
        return lay

    def rec(i, choice):
        nonlocal tries
        if i == len(edges):
            tries += 1
            if tries > max_tries:
                raise TwistfillError("walk embedding search exhausted")
            lay = build(choice)
            if lay.crossing_count(same_owner_only=True) == 0:
                return lay
            return None
        for perm in perm_sets[i]:
            got = rec(i + 1, choice + [perm])
            if got is not None:
                return got
        return None

    lay = rec(0, [])
    if lay is None:
        raise TwistfillError("walk admits no embedded realization")
    lay.check()
    return lay


def curve_from_walk(tri, walk, trusted=False):
    lay = embed_walk(tri, walk)
    return MultiCurve.from_layout(lay, trusted=trusted)


# -- fan polygon navigation ------------------------------------------------------


def _side_tri(tri, p):
    """(triangle index, slot) of polygon side position p."""
    n = len(tri.meta["word"])
    if p == 0:
        return (0, 0)
    if p == n - 1:
        return (n - 3, 2)
    return (p - 1, 1)


def _partner_position(tri, p):
    word = tri.meta["word"]
    kind, idx, occ = word[p]
    if kind == "c":
        raise TwistfillError("boundary sides have no partner")
    for q, tok in enumerate(word):
        if tok == (kind, idx, 1 - occ):
            return q
    raise TwistfillError("no partner side")


def _corridor(tri, a, b):
    """Walk steps crossing fan diagonals from triangle index a to b."""
    steps = []
    diag = tri.meta["diag_edge"]
    j = a
    while j != b:
        if b > j:
            e = diag[j + 2]
            j2 = j + 1
        else:
            e = diag[j + 1]
            j2 = j - 1
        k = next(kk for kk, (tt, _s) in enumerate(tri.edge_sides[e]) if tt == j2)
        steps.append((e, k))
        j = j2
    return steps


def side_crossing_loop(tri, positions):
    """Closed walk crossing the listed polygon sides in order.

    Between consecutive listed sides the walk runs through the fan corridor.
    Crossing position p means passing from the triangle of p to the triangle
    of the identified partner side.
    """
    walk = []
    for i, p in enumerate(positions):
        e = tri.meta["side_edge"][p]
        q = _partner_position(tri, p)
        tq, _ = _side_tri(tri, q)
        k = next(kk for kk, (tt, _s) in enumerate(tri.edge_sides[e])
                 if (tt, _s) == _side_tri(tri, q))
        walk.append((e, k))
        p_next = positions[(i + 1) % len(positions)]
        t_target, _ = _side_tri(tri, p_next)
        walk.extend(_corridor(tri, tq, t_target))
    return walk


def dual_curve(tri, kind, index):
    """The loop crossing polygon side (kind, index) exactly once."""
    word = tri.meta["word"]
    p = word.index((kind, index, 0))
    return curve_from_walk(tri, side_crossing_loop(tri, [p]), trusted=False)


def _fan_sector_walk(tri, v, ends_slice, closing_tri):
    """Crossings of the given fan ends (list of fan indices), cyclically."""
    fans = tri.fans[v]
    ends = tri.fan_ends(v)
    walk = []
    for i in ends_slice:
        e, _end = ends[i]
        # crossing fan_ends[i] passes between corners i and i+1 (interior
        # vertex; for a boundary fan the indices shift by one)
        if tri.fan_cyclic[v]:
            t_next = fans[(i + 1) % len(fans)][0]
        else:
            t_next = fans[i][0]
        k = next(kk for kk, (tt, _s) in enumerate(tri.edge_sides[e])
                 if tt == t_next)
        walk.append((e, k))
    return walk


def edge_loop_pushoff(tri, e, sector=0):
    """Parallel pushoff of an edge loop whose both ends meet one interior
    vertex; ``sector`` picks the side (0 or 1)."""
    v = tri.edge_tail[e]
    if tri.edge_head[e] != v or v in tri.boundary_vertices:
        raise TwistfillError("pushoff needs an interior edge loop")
    ends = tri.fan_ends(v)
    d = len(ends)
    i0 = ends.index((e, 0))
    i1 = ends.index((e, 1))
    a, b = (i0, i1) if sector == 0 else (i1, i0)
    # indices strictly between a and b cyclically
    idxs = []
    j = (a + 1) % d
    while j != b:
        idxs.append(j)
        j = (j + 1) % d
    if not idxs:
        raise TwistfillError("degenerate pushoff sector")
    walk = _fan_sector_walk(tri, v, idxs, None)
    return curve_from_walk(tri, walk)


def boundary_pushoff_layout(tri, cycle_edges, owner=0):
    """Layout of the curve parallel to a surface boundary cycle.

    The curve is inessential in the bounded surface itself; callers lift it to
    a double where it becomes the seam class, so this returns a raw Layout.
    """
    if len(cycle_edges) != 1:
        raise TwistfillError("only single-edge boundary cycles are built")
    e = cycle_edges[0]
    v = tri.edge_tail[e]
    ends = tri.fan_ends(v)
    idxs = list(range(1, len(ends) - 1))
    if not idxs:
        raise TwistfillError("boundary fan too small for a pushoff")
    # boundary fan: crossing fan_ends[i] passes from corners[i-1] to corners[i]
    fans = tri.fans[v]
    walk = []
    for i in idxs:
        ee, _end = ends[i]
        t_next = fans[i][0] if i < len(fans) else fans[-1][0]
        k = next(kk for kk, (tt, _s) in enumerate(tri.edge_sides[ee])
                 if tt == t_next)
        walk.append((ee, k))
    return embed_walk(tri, walk, owner=owner)


def separating_chain_curve(tri, k):
    """Pushoff of the fan diagonal separating handles 1..k from the rest."""
    diag = tri.meta["diag_edge"]
    e = diag.get(4 * k)
    if e is None:
        raise TwistfillError("no separating diagonal for this k")
    return edge_loop_pushoff(tri, e)
