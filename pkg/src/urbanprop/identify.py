"""Significant-building identification along a receiver route.

Two passes per receiver position: candidate selection by side of the
propagation line (with NLOS links split at the breakpoint into TX-bp and
bp-RX sub-segments, the latter contributing left-side buildings only), then
near-to-far visibility filtering where a building is kept only if none of
its roof-ring vertex-to-projection segments is blocked by an already
accepted building.

All functions are pure over the immutable map; route positions are
independent of each other.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGeometryError
from .geometry import Point3, Segment3, f_block, f_proj, f_side, block_nearest
from . import kernels

EPS_TOP = 0.5      # roof-ring height band, m
EPS_TIE = 1e-9     # perpendicular-distance tie threshold, m


@dataclass(frozen=True)
class LinkClassification:
    los: bool
    breakpoint: Point3 = None
    blocking_building: int = None

    def __post_init__(self):
        if self.los and self.breakpoint is not None:
            raise ValueError("LOS link cannot carry a breakpoint")
        if not self.los and (self.breakpoint is None or self.blocking_building is None):
            raise ValueError("NLOS link requires breakpoint and blocking building")


@dataclass
class SubSegmentSides:
    """Candidate buildings flanking one propagation sub-segment."""

    a: Point3
    b: Point3
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    left_only: bool = False   # bp-RX sub-segment considers the left side only


@dataclass
class VisibleSegment:
    a: Point3
    b: Point3
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)


@dataclass
class VisibilitySet:
    """Per-receiver-position identification result."""

    rx_index: int
    classification: LinkClassification
    sides: list       # list[SubSegmentSides]
    visible: list     # list[VisibleSegment], parallel to ``sides``

    def ordered_visible(self):
        """Visible buildings in propagation order (sub-segment, then near-to-far
        interleaved by projection position downstream), deduplicated."""
        seen = set()
        out = []
        for seg in self.visible:
            for side_name in ("left", "right"):
                for bid in getattr(seg, side_name):
                    if bid not in seen:
                        seen.add(bid)
                        out.append((bid, seg, side_name))
        return out

    def flat_sides(self):
        left, right = [], []
        for seg in self.sides:
            left += [b for b in seg.left if b not in left]
            right += [b for b in seg.right if b not in right]
        return {"left": left, "right": right}

    def flat_visible(self):
        left, right = [], []
        for seg in self.visible:
            left += [b for b in seg.left if b not in left]
            right += [b for b in seg.right if b not in right]
        return {"left": left, "right": right}


# -- LOS / breakpoint ------------------------------------------------------


def classify_link(tx, rx, gmap):
    """LOS/NLOS classification of the TX-RX segment against every face."""
    blocked, face_idx, _hit = block_nearest(tx, rx, gmap)
    if not blocked:
        return LinkClassification(True)
    bid = gmap.faces[face_idx].building_id
    bp = compute_breakpoint(tx, rx, bid, gmap)
    return LinkClassification(False, breakpoint=bp, blocking_building=bid)


def _perp_dist_2d(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    return abs(dx * (py - ay) - dy * (px - ax)) / np.hypot(dx, dy)


def _param_2d(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    return ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)


def compute_breakpoint(tx, rx, blocking_id, gmap, eps_top=EPS_TOP):
    """Diffraction corner of the first obstructing building.

    Among the building's roof-ring corners on the RX side of the first face
    hit, picks the one closest (horizontally) to the TX-RX line; ties go to
    the left-side corner, then the lower vertex index.  The corner is
    returned at the height of the TX-RX line at that horizontal location.
    """
    v0, v1, v2, tfaces = gmap.triangles_of([blocking_id])
    t, idx = kernels.first_hit(tx.as_array(), rx.as_array(), v0, v1, v2, 1e-9)
    if idx < 0:
        raise DegenerateGeometryError(
            f"building {blocking_id} does not block the TX-RX segment")
    nrm = np.cross(v1[idx] - v0[idx], v2[idx] - v0[idx])
    offset = nrm @ v0[idx]
    rx_sign = np.sign(rx.as_array() @ nrm - offset)

    seg = Segment3(tx, rx)
    corners = gmap.top_vertices(blocking_id, eps_top)
    best = None
    for vid in corners:
        c = gmap.vertices[vid]
        side_of_face = np.sign(c @ nrm - offset)
        # closed half-space: corners lying exactly on the hit plane qualify
        if rx_sign != 0 and side_of_face == -rx_sign:
            continue
        dist = _perp_dist_2d(c[0], c[1], tx.x, tx.y, rx.x, rx.y)
        left = f_side(Point3.from_array(c), seg)
        # sort key: distance, then right-before-left inverted (left wins), then index
        key = (dist, -left, int(vid))
        if best is None or _tie_lt(key, best[0]):
            best = (key, c)
    if best is None:
        raise DegenerateGeometryError(
            f"building {blocking_id} has no roof corner on the RX side of the hit face")
    c = best[1]
    tline = _param_2d(c[0], c[1], tx.x, tx.y, rx.x, rx.y)
    z = tx.z + tline * (rx.z - tx.z)
    return Point3(float(c[0]), float(c[1]), float(z))


def _tie_lt(ka, kb):
    # lexicographic with a tolerance on the leading distance component
    if ka[0] < kb[0] - EPS_TIE:
        return True
    if ka[0] > kb[0] + EPS_TIE:
        return False
    return ka[1:] < kb[1:]


# -- Candidate selection (initial identification) --------------------------


def _segment_candidates(a, b, gmap, corridor_width, eps_top, left_only=False):
    sub = SubSegmentSides(a, b, left_only=left_only)
    seg = Segment3(a, b)
    for bid in gmap.building_ids():
        votes = 0
        n_kept = 0
        for vid in gmap.top_vertices(bid, eps_top):
            vx, vy = gmap.vertices[vid, 0], gmap.vertices[vid, 1]
            t = _param_2d(vx, vy, a.x, a.y, b.x, b.y)
            if not 0.0 <= t <= 1.0:
                continue
            if _perp_dist_2d(vx, vy, a.x, a.y, b.x, b.y) > corridor_width:
                continue
            n_kept += 1
            votes += f_side(Point3(float(vx), float(vy), 0.0), seg)
        if n_kept == 0:
            continue
        if votes >= 0:   # majority vote, ties assigned left
            sub.left.append(bid)
        elif not left_only:
            sub.right.append(bid)
    if left_only:
        sub.right = []
    return sub


def initial_identification(tx, route, gmap, corridor_width=100.0, eps_top=EPS_TOP):
    """Algorithm-1 pass: per route point, LOS/NLOS split and side candidates.

    Returns a list of ``(LinkClassification, [SubSegmentSides, ...])``.
    """
    if not route:
        raise ValueError("route must contain at least one point")
    if corridor_width <= 0.0:
        raise ValueError("corridor_width must be positive")
    out = []
    for r in route:
        cls = classify_link(tx, r, gmap)
        if cls.los:
            segs = [_segment_candidates(tx, r, gmap, corridor_width, eps_top)]
        else:
            bp = cls.breakpoint
            segs = [
                _segment_candidates(tx, bp, gmap, corridor_width, eps_top),
                _segment_candidates(bp, r, gmap, corridor_width, eps_top,
                                    left_only=True),
            ]
        out.append((cls, segs))
    return out


# -- Visibility filtering --------------------------------------------------


def _building_line_distance(bid, gmap, a, b, eps_top):
    verts = gmap.top_vertices(bid, eps_top)
    return min(_perp_dist_2d(gmap.vertices[v, 0], gmap.vertices[v, 1],
                             a.x, a.y, b.x, b.y) for v in verts)


def visible_identification(segs, tx, rx, cls, gmap, rx_index=0, eps_top=EPS_TOP):
    """Algorithm-2 pass: near-to-far visibility filtering of the candidates.

    Within a sub-segment, buildings are visited per side in ascending
    perpendicular distance to the sub-segment line (ties by id) and kept
    only if no roof-ring vertex-to-projection segment is blocked by a
    previously accepted building.  Sub-segments are filtered independently.
    """
    visible = []
    for sub in segs:
        vseg = VisibleSegment(sub.a, sub.b)
        line = Segment3(sub.a, sub.b)
        accepted = []
        for side_name in ("left", "right"):
            cand = getattr(sub, side_name)
            ordered = sorted(
                cand,
                key=lambda bid: (_building_line_distance(bid, gmap, sub.a, sub.b,
                                                         eps_top), bid))
            for bid in ordered:
                occluders = [x for x in accepted if x != bid]
                if _is_visible(bid, line, gmap, occluders, eps_top):
                    getattr(vseg, side_name).append(bid)
                    accepted.append(bid)
        visible.append(vseg)
    return VisibilitySet(rx_index, cls, list(segs), visible)


def _is_visible(bid, line, gmap, occluders, eps_top):
    if not occluders:
        return True
    v0, v1, v2, _ = gmap.triangles_of(occluders)
    for vid in gmap.top_vertices(bid, eps_top):
        v = gmap.vertices[vid]
        proj, _t = f_proj(Point3.from_array(v), line)
        d = proj.as_array() - v
        if np.linalg.norm(d) <= 1e-9:
            continue
        if kernels.any_hit(v, proj.as_array(), v0, v1, v2, 1e-9):
            return False
    return True


def identify_position(tx, r, gmap, corridor_width=100.0, eps_top=EPS_TOP,
                      rx_index=0):
    """Convenience wrapper: both passes for one receiver position."""
    (cls, segs), = initial_identification(tx, [r], gmap, corridor_width, eps_top)
    return visible_identification(segs, tx, r, cls, gmap, rx_index=rx_index,
                                  eps_top=eps_top)
