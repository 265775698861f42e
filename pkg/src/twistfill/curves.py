"""Isotopy classes of essential multicurves in normal coordinates.

A MultiCurve is determined by its triangulation and its per-edge crossing
numbers after taut normalization.  Equality of weight vectors implies isotopy
(normal curves are reconstructible from their coordinates); the converse is
asserted for the canonical reduction and guarded by tests, but no soundness-
critical path relies on it: `isotopic` falls back to an overlay argument
(disjoint curves are isotopic exactly when they cobound annulus regions,
matched class by class with multiplicity).
"""

from dataclasses import dataclass

from .errors import InessentialCurve, TwistfillError
from .layout import DEFAULT_LIMITS, Layout, check_matching, normalize_layout
from .regions import Arrangement, reduce_bigons


class MultiCurve:
    def __init__(self, tri, weights, n_components, _token=None):
        if _token is not _PRIVATE:
            raise TwistfillError("use MultiCurve.from_weights / from_layout")
        self.tri = tri
        self.weights = tuple(weights)
        self.n_components = n_components

    @staticmethod
    def from_weights(tri, weights, trusted=False):
        """Validate, normalize and essentialness-check normal coordinates."""
        check_matching(tri, weights)
        lay = Layout.from_weights(tri, list(weights))
        normalize_layout(lay)
        canon = lay.weights()
        if sum(canon) == 0:
            raise InessentialCurve("curve reduced to nothing")
        lay2 = Layout.from_weights(tri, list(canon))
        comps = lay2.components()
        if not trusted:
            for comp in comps:
                _check_component_essential(tri, lay2, comp)
        return MultiCurve(tri, canon, len(comps), _token=_PRIVATE)

    @staticmethod
    def from_layout(lay, trusted=False):
        normalize_layout(lay)
        return MultiCurve.from_weights(lay.tri, lay.weights(), trusted=trusted)

    def layout(self, owner=0):
        return Layout.from_weights(self.tri, list(self.weights), owner=owner)

    def total_weight(self):
        return sum(self.weights)

    def same_surface(self, other):
        return self.tri.structure_key() == other.tri.structure_key()

    def __eq__(self, other):
        return (isinstance(other, MultiCurve) and self.same_surface(other)
                and self.weights == other.weights)

    def __hash__(self):
        return hash((self.tri.name, self.weights))

    def __repr__(self):
        return (f"MultiCurve({self.tri.name}, comps={self.n_components}, "
                f"|w|={self.total_weight()})")


_PRIVATE = object()


def _component_weights(lay, comp):
    w = [0] * lay.tri.n_edges
    for (p, _k) in comp:
        w[lay.pt_edge[p]] += 1
    return w


def _check_component_essential(tri, lay, comp):
    w = _component_weights(lay, comp)
    solo = Layout.from_weights(tri, w)
    arr = Arrangement(solo)
    report = arr.region_report()
    for reg in report:
        if reg["chi"] == 1:
            raise InessentialCurve("component bounds a disk")
        if reg["chi"] == 0 and len(reg["circles"]) == 2:
            pure = [c for c in reg["circles"] if c["pure_surface_boundary"]]
            curveside = [c for c in reg["circles"]
                         if not c["has_surface_boundary"]]
            if len(pure) == 1 and len(curveside) == 1:
                raise InessentialCurve("component is boundary-parallel")


# -- overlays ------------------------------------------------------------------


def overlay(curves, limits=DEFAULT_LIMITS, reduce=True):
    """Merge canonical layouts of the curves and reduce to minimal position.

    Returns (layout, arrangement).
    """
    lays = [c.layout(owner=i) for i, c in enumerate(curves)]
    merged, _maps = Layout.merge(lays)
    if reduce:
        arr = reduce_bigons(merged, limits)
    else:
        arr = Arrangement(merged, limits)
    return merged, arr


def intersect(a, b, limits=DEFAULT_LIMITS):
    """Exact geometric intersection number of two multicurve classes."""
    if not a.same_surface(b):
        raise TwistfillError("curves live on different triangulations")
    if a.weights == b.weights:
        return 0
    merged, _arr = overlay([a, b], limits)
    return merged.crossing_count(limits)


def is_disjoint(a, b, limits=DEFAULT_LIMITS):
    return intersect(a, b, limits) == 0


def _final_components(lay):
    comps = lay.components()
    comp_of_point = {}
    owner_of_comp = []
    for ci, comp in enumerate(comps):
        for (p, _k) in comp:
            comp_of_point[p] = ci
        owner_of_comp.append(lay.owner[comp[0][0]])
    return comps, comp_of_point, owner_of_comp


def _circle_component(arr, circle, comp_of_point):
    for it in circle:
        if it[0] == "strand":
            t, h = it[1], it[2]
            return comp_of_point[arr.arc_owner_point(t, arr.pics[t].he_info[h])]
    return None


def _parallel_classes(merged, arr):
    """Union-find over components joined by annulus regions of the complement."""
    comps, comp_of_point, owner_of_comp = _final_components(merged)
    parent = list(range(len(comps)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for reg in arr.region_report():
        if reg["chi"] != 0 or len(reg["circles"]) != 2:
            continue
        if any(c["has_surface_boundary"] for c in reg["circles"]):
            continue
        if any(c["corners"] for c in reg["circles"]):
            continue
        c1 = _circle_component(arr, reg["raw_circles"][0], comp_of_point)
        c2 = _circle_component(arr, reg["raw_circles"][1], comp_of_point)
        if c1 is None or c2 is None or c1 == c2:
            continue
        ra, rb = find(c1), find(c2)
        if ra != rb:
            parent[ra] = rb
    classes = {}
    for ci in range(len(comps)):
        classes.setdefault(find(ci), []).append(ci)
    return list(classes.values()), owner_of_comp


def isotopic(a, b, limits=DEFAULT_LIMITS):
    """Sound isotopy test for multicurves.

    Equal coordinates decide immediately; otherwise overlay: isotopic
    multicurves are disjoint after reduction and their components pair up
    through annulus complement regions, class by class with equal counts.
    """
    if not a.same_surface(b):
        return False
    if a.weights == b.weights:
        return True
    if a.n_components != b.n_components or a.tri.spec != b.tri.spec:
        return False
    merged, arr = overlay([a, b], limits)
    if merged.crossing_count(limits) > 0:
        return False
    classes, owner_of_comp = _parallel_classes(merged, arr)
    for cls in classes:
        na = sum(1 for ci in cls if owner_of_comp[ci] == 0)
        nb = len(cls) - na
        if na != nb:
            return False
    return True


# -- filling -------------------------------------------------------------------


@dataclass
class FillingReport:
    fills: bool
    regions: list           # (chi, n_boundary_cycles) per region
    n_regions: int
    connected_complement: bool
    deduplicated: int       # how many isotopy duplicates were dropped


def _region_ok(reg):
    if reg["chi"] == 1:
        return True
    if reg["chi"] == 0 and len(reg["circles"]) == 2:
        pure = [c for c in reg["circles"] if c["pure_surface_boundary"]]
        curveside = [c for c in reg["circles"]
                     if not c["has_surface_boundary"] and c["corners"] >= 0]
        return len(pure) == 1 and len(curveside) == 1
    return False


def fills(curves, limits=DEFAULT_LIMITS, _dropped=0):
    """Do the given multicurves jointly fill the surface?

    True exactly when every complementary region is a disk or a collar of one
    surface boundary circle; isotopy duplicates in the list are dropped first
    (a parallel pair never fills).
    """
    if not curves:
        raise TwistfillError("empty curve system")
    tri = curves[0].tri
    for c in curves[1:]:
        if c.tri.structure_key() != tri.structure_key():
            raise TwistfillError("curve system spans triangulations")
    merged, arr = overlay(curves, limits)

    # drop isotopy duplicates at the whole-curve level
    if len(curves) > 1:
        classes, owner_of_comp = _parallel_classes(merged, arr)
        comp_class = {}
        for k, cls in enumerate(classes):
            for ci in cls:
                comp_class[ci] = k
        sig = {}
        for ci, ow in enumerate(owner_of_comp):
            sig.setdefault(ow, []).append(comp_class[ci])
        keep, seen = [], set()
        for i, c in enumerate(curves):
            key = tuple(sorted(sig.get(i, [])))
            # owners sharing every component class AND the same coordinates
            # are duplicates; distinct curves may share some classes
            marker = (key, c.weights)
            if marker in seen:
                continue
            dup = False
            for j in range(i):
                if curves[j].weights == c.weights:
                    dup = True
                    break
                if tuple(sorted(sig.get(j, []))) == key and isotopic(curves[j], c, limits):
                    dup = True
                    break
            if dup:
                continue
            seen.add(marker)
            keep.append(c)
        if len(keep) < len(curves):
            return fills(keep, limits, _dropped=_dropped + len(curves) - len(keep))

    report = arr.region_report()
    regions = [(reg["chi"], len(reg["boundary_cycles"])) for reg in report]
    ok = all(_region_ok(reg) for reg in report)
    return FillingReport(fills=ok, regions=regions, n_regions=len(report),
                         connected_complement=(len(report) == 1),
                         deduplicated=_dropped)


# -- oriented crossing sum (homology pairing) -----------------------------------


def _orient_arcs(lay):
    """Direction per arc from the canonical component traversal.

    Returns dict: frozenset of the two ends -> (from_end, to_end).
    """
    directed = {}
    for comp in lay.components():
        n = len(comp)
        for i in range(n):
            p, out_k = comp[i]
            q, kq = lay.mate[(p, out_k)]
            directed[frozenset(((p, out_k), (q, kq)))] = ((p, out_k), (q, kq))
    return directed


def signed_intersection(a, b, limits=DEFAULT_LIMITS):
    """Algebraic intersection number with canonical orientations.

    Position-independent, so no bigon reduction is performed.
    """
    from .regions import TriPicture, _circle_coords
    from fractions import Fraction

    if not a.same_surface(b):
        raise TwistfillError("curves live on different triangulations")
    merged, _maps = Layout.merge([a.layout(owner=0), b.layout(owner=1)])
    directed = _orient_arcs(merged)
    total = 0
    for t in range(merged.tri.n_tris):
        nodes, arcs = merged.tri_arcs(t)
        coords = _circle_coords(len(nodes), 0)
        pos = {}
        for i, node in enumerate(nodes):
            if node[0] == "pt":
                pos[(node[1], node[2])] = i
        n = len(arcs)
        for i in range(n):
            li, hi_, ei, fi = arcs[i]
            if merged.owner[ei[0]] != 0:
                continue
            for j in range(n):
                lj, hj, ej, fj = arcs[j]
                if merged.owner[ej[0]] != 1:
                    continue
                if not (li < lj < hi_ < hj or lj < li < hj < hi_):
                    continue
                da = directed[frozenset((ei, fi))]
                db = directed[frozenset((ej, fj))]
                pa, qa = pos[da[0]], pos[da[1]]
                pb, qb = pos[db[0]], pos[db[1]]

                def vec(p, q):
                    return (Fraction(coords[q][0], coords[q][2])
                            - Fraction(coords[p][0], coords[p][2]),
                            Fraction(coords[q][1], coords[q][2])
                            - Fraction(coords[p][1], coords[p][2]))

                va, vb = vec(pa, qa), vec(pb, qb)
                det = va[0] * vb[1] - va[1] * vb[0]
                total += 1 if det > 0 else -1
    return total
