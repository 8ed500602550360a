"""3D environment model and the exact geometric predicates under it.

The map is an immutable vertex/face/building structure loaded from JSON.
Faces are simple planar polygons, fan-triangulated once at load time into a
triangle soup that all occlusion predicates run against (see ``kernels``).
All predicates are pure functions, safe to call in parallel.

Coordinates are meters in a right-handed local planar frame (x east,
y north, z up).  Geographic input must be pre-projected; the loader accepts
an optional declared origin for provenance only.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import MapValidationError, NumericalDomainError
from . import kernels

# Default tolerances, overridable per call / per load.
EPS_PLANE = 1e-6   # face planarity, meters
EPS_HIT = 1e-9     # endpoint exclusion for occlusion, meters
EPS_SIDE = 1e-9    # collinearity threshold for the side test, m^2
EPS_LEN = 1e-9     # minimal segment length, meters


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y) and np.isfinite(self.z)):
            raise NumericalDomainError(f"non-finite coordinate in {self!r}")

    def as_array(self):
        return np.array([self.x, self.y, self.z], dtype=np.float64)

    @classmethod
    def from_array(cls, arr):
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class Segment3:
    a: Point3
    b: Point3

    def __post_init__(self):
        if np.linalg.norm(self.b.as_array() - self.a.as_array()) <= EPS_LEN:
            raise NumericalDomainError("degenerate segment: endpoints coincide")

    def direction(self):
        return self.b.as_array() - self.a.as_array()


@dataclass(frozen=True)
class Face:
    building_id: int
    vertex_ids: tuple


@dataclass(frozen=True)
class Building:
    id: int
    name: str
    face_indices: tuple
    vertex_indices: tuple


@dataclass
class GeometryMap:
    """Immutable 3D environment: vertices, faces and building groups.

    The triangle soup (``tri_v0/v1/v2``) is derived at construction by fan
    triangulation of every face; ``tri_face`` maps each triangle back to its
    face index and per-building triangle ids enable subset occlusion tests.
    """

    vertices: np.ndarray                    # (N, 3) float64
    faces: list                             # list[Face]
    buildings: list                         # list[Building]
    origin: tuple = None                    # provenance only, never used
    eps_plane: float = EPS_PLANE

    tri_v0: np.ndarray = field(init=False, repr=False)
    tri_v1: np.ndarray = field(init=False, repr=False)
    tri_v2: np.ndarray = field(init=False, repr=False)
    tri_face: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        if self.vertices.size and not np.isfinite(self.vertices).all():
            raise MapValidationError("non-finite vertex coordinate")
        self._validate()
        self._triangulate()
        self._by_id = {b.id: b for b in self.buildings}
        self._tris_of_building = {}
        for b in self.buildings:
            mask = np.isin(self.tri_face, b.face_indices)
            self._tris_of_building[b.id] = np.flatnonzero(mask)

    # -- construction ------------------------------------------------------

    def _validate(self):
        n = len(self.vertices)
        ids = {b.id for b in self.buildings}
        if len(ids) != len(self.buildings):
            raise MapValidationError("duplicate building id")
        for fi, f in enumerate(self.faces):
            if len(f.vertex_ids) < 3:
                raise MapValidationError(f"face {fi} has fewer than 3 vertices")
            for vid in f.vertex_ids:
                if not 0 <= vid < n:
                    raise MapValidationError(
                        f"face {fi} references vertex {vid} of a {n}-vertex map")
            if f.building_id not in ids:
                raise MapValidationError(
                    f"face {fi} references unknown building {f.building_id}")
            self._check_planar(fi, f)
        for b in self.buildings:
            if not b.face_indices:
                raise MapValidationError(f"building {b.id} has no faces")
            for vid in b.vertex_indices:
                if not 0 <= vid < n:
                    raise MapValidationError(
                        f"building {b.id} references vertex {vid} out of range")

    def _check_planar(self, fi, f):
        pts = self.vertices[list(f.vertex_ids)]
        if len(pts) == 3:
            return
        e1 = pts[1] - pts[0]
        e2 = pts[2] - pts[0]
        nrm = np.cross(e1, e2)
        norm = np.linalg.norm(nrm)
        if norm == 0.0:
            raise MapValidationError(f"face {fi} has collinear leading vertices")
        nrm /= norm
        dist = np.abs((pts - pts[0]) @ nrm)
        if dist.max() > self.eps_plane:
            raise MapValidationError(
                f"face {fi} is non-planar by {dist.max():.2e} m")

    def _triangulate(self):
        v0, v1, v2, tf = [], [], [], []
        for fi, f in enumerate(self.faces):
            ids = f.vertex_ids
            for k in range(1, len(ids) - 1):
                v0.append(self.vertices[ids[0]])
                v1.append(self.vertices[ids[k]])
                v2.append(self.vertices[ids[k + 1]])
                tf.append(fi)
        shape = (len(v0), 3)
        self.tri_v0 = np.array(v0, dtype=np.float64).reshape(shape)
        self.tri_v1 = np.array(v1, dtype=np.float64).reshape(shape)
        self.tri_v2 = np.array(v2, dtype=np.float64).reshape(shape)
        self.tri_face = np.array(tf, dtype=np.int64)

    # -- accessors ---------------------------------------------------------

    def building(self, building_id):
        try:
            return self._by_id[building_id]
        except KeyError:
            raise MapValidationError(f"unknown building id {building_id}") from None

    def building_ids(self):
        return [b.id for b in self.buildings]

    def triangles_of(self, building_ids):
        """Triangle arrays restricted to the given building ids."""
        if not building_ids:
            empty = np.empty((0, 3), dtype=np.float64)
            return empty, empty, empty, np.empty(0, dtype=np.int64)
        idx = np.concatenate([self._tris_of_building[b] for b in building_ids])
        return (self.tri_v0[idx], self.tri_v1[idx], self.tri_v2[idx],
                self.tri_face[idx])

    def building_max_z(self, building_id):
        b = self.building(building_id)
        return float(self.vertices[list(b.vertex_indices), 2].max())

    def top_vertices(self, building_id, eps_top=0.5):
        """Indices of the building's roof-ring vertices.

        A vertex is top-level when its height is within ``eps_top`` of the
        building's maximum height.
        """
        b = self.building(building_id)
        ids = np.array(b.vertex_indices, dtype=np.int64)
        z = self.vertices[ids, 2]
        return ids[z >= z.max() - eps_top]


# -- loading ---------------------------------------------------------------


def load_map(path, eps_plane=EPS_PLANE):
    """Load and validate a geometry map from its JSON file.

    Schema: ``{"vertices": [[x,y,z], ...], "faces": [{"building": id,
    "v": [i, ...]}, ...], "buildings": [{"id": id, "name": str?}, ...]}``.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise MapValidationError(f"cannot read map file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MapValidationError(f"malformed JSON in {path}: {exc}") from exc
    return map_from_dict(raw, eps_plane=eps_plane)


def map_from_dict(raw, eps_plane=EPS_PLANE):
    for key in ("vertices", "faces", "buildings"):
        if key not in raw:
            raise MapValidationError(f"map is missing the '{key}' array")
    vertices = np.asarray(raw["vertices"], dtype=np.float64)
    if vertices.size == 0:
        vertices = np.empty((0, 3))
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise MapValidationError("'vertices' must be an array of [x, y, z]")

    faces = []
    for fi, f in enumerate(raw["faces"]):
        try:
            faces.append(Face(int(f["building"]), tuple(int(v) for v in f["v"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise MapValidationError(f"bad face entry at index {fi}: {exc}") from exc

    face_of_building = {}
    for fi, f in enumerate(faces):
        face_of_building.setdefault(f.building_id, []).append(fi)

    buildings = []
    for bi, b in enumerate(raw["buildings"]):
        try:
            bid = int(b["id"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MapValidationError(f"bad building entry at index {bi}: {exc}") from exc
        f_idx = tuple(face_of_building.get(bid, ()))
        if not f_idx:
            raise MapValidationError(f"building {bid} has no faces")
        v_idx = tuple(sorted({v for fi in f_idx for v in faces[fi].vertex_ids}))
        buildings.append(Building(bid, str(b.get("name", "")), f_idx, v_idx))

    origin = tuple(raw["origin"]) if "origin" in raw else None
    return GeometryMap(vertices, faces, buildings, origin=origin,
                       eps_plane=eps_plane)


# -- predicates ------------------------------------------------------------


def f_proj(p, seg):
    """Orthogonal projection of ``p`` onto the infinite line through ``seg``.

    Returns ``(point, t)`` where ``t`` is the unclamped line parameter
    (0 at ``seg.a``, 1 at ``seg.b``).
    """
    a = seg.a.as_array()
    d = seg.direction()
    t = float((p.as_array() - a) @ d / (d @ d))
    return Point3.from_array(a + t * d), t


def f_side(p, seg, eps_side=EPS_SIDE):
    """Side of ``p`` relative to a->b on the xy-plane: +1 left, -1 right, 0 collinear.

    Heights are ignored; the test is the z-component of the 2D cross product.
    """
    ax, ay = seg.a.x, seg.a.y
    cross = (seg.b.x - ax) * (p.y - ay) - (seg.b.y - ay) * (p.x - ax)
    if abs(cross) <= eps_side:
        return 0
    return 1 if cross > 0 else -1


def segment_face_intersect(seg, face_index, gmap, eps_hit=EPS_HIT):
    """Nearest-to-``a`` intersection of the open segment with one face, or None."""
    mask = gmap.tri_face == face_index
    t, idx = kernels.first_hit(seg.a.as_array(), seg.b.as_array(),
                              gmap.tri_v0[mask], gmap.tri_v1[mask],
                              gmap.tri_v2[mask], eps_hit)
    if idx < 0:
        return None
    a = seg.a.as_array()
    return Point3.from_array(a + t * seg.direction())


def f_block(a, b, gmap, building_ids=None, eps_hit=EPS_HIT):
    """1 iff any face of the selected buildings blocks the open segment a-b.

    ``building_ids=None`` tests against every building in the map.
    """
    if building_ids is None:
        v0, v1, v2 = gmap.tri_v0, gmap.tri_v1, gmap.tri_v2
    else:
        v0, v1, v2, _ = gmap.triangles_of(list(building_ids))
    return int(kernels.any_hit(a.as_array(), b.as_array(), v0, v1, v2, eps_hit))


def block_nearest(a, b, gmap, eps_hit=EPS_HIT):
    """All-buildings occlusion test used for LOS classification.

    Returns ``(blocked, face_index, hit_point)`` with the nearest blocking
    face; ``(False, None, None)`` when the segment is clear.
    """
    t, idx = kernels.first_hit(a.as_array(), b.as_array(), gmap.tri_v0,
                               gmap.tri_v1, gmap.tri_v2, eps_hit)
    if idx < 0:
        return False, None, None
    hit = Point3.from_array(a.as_array() + t * (b.as_array() - a.as_array()))
    return True, int(gmap.tri_face[idx]), hit
