"""Cell-complex surgery: building surfaces from positive domains.

A positive domain is realized as a surface by taking one polygon per region
copy and gluing the copies along the curve arcs: top-aligned along alpha
arcs, bottom-aligned along beta arcs.  The preimages of a crossing are then
the chains of quadrant sheets linked by those gluings; odd chains of length
three or more are ground down to right-angle corners by slitting along beta
arc preimages, points shared by both generators receive their corners (as
symbolic degenerate disks or boundary slits), and boundary circles lying
over a single curve are spliced into the main boundary arc.  A final
stabilization stage cuts open a fresh copy of the whole surface at every
point of the outgoing generator and chains it onto the corners.

All surgery happens on edges: faces are created once and never split, so
the Euler characteristic is always an honest cell count V - E + F.

Cut points land in the interior of edge preimages (each slit is half an
edge long); the far end of a slit is a boundary branch point and never
touches the preimages of other crossings, which keeps every cut local and
the whole pipeline deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from hdindex.diagram import ALPHA, BETA, Dart, DiagramError, HeegaardDiagram
from hdindex.domains import (
    Domain,
    Generator,
    check_generator,
    connects,
    is_positive,
    sigma_class,
)
from hdindex.formulas import branch_budget, embedded_euler_char

Point = tuple  # ('v', vertex) or ('cut', serial)


class PreconditionError(ValueError):
    """An operation was called outside its contract (bad domain, genus...)."""


class BuilderError(RuntimeError):
    """Internal invariant of the construction failed; indicates a bug."""


@dataclass(frozen=True)
class QuadrantSheet:
    """Sheet ``level`` of the quadrant at ``vertex`` in rotation ``position``."""

    vertex: str
    region: int
    position: int
    level: int


@dataclass(frozen=True)
class PreimageChain:
    """The quadrant sheets forming one preimage of a crossing."""

    vertex: str
    cells: tuple[QuadrantSheet, ...]
    kind: str  # "closed" | "open"

    @property
    def length(self) -> int:
        return len(self.cells)


class _Side:
    """One oriented edge of a face polygon.

    Runs from ``tail_pt`` to ``head_pt`` over the diagram dart ``dart``
    (``None`` partner means the side is free boundary).  Faces keep their
    sides in counterclockwise cyclic order.
    """

    __slots__ = ("sid", "face", "dart", "tail_pt", "head_pt", "partner")

    def __init__(self, sid: int, face: "_Face", dart, tail_pt: Point, head_pt: Point):
        self.sid = sid
        self.face = face
        self.dart = dart
        self.tail_pt = tail_pt
        self.head_pt = head_pt
        self.partner: Optional["_Side"] = None

    def __repr__(self) -> str:
        return f"<side {self.sid} {self.dart} {self.tail_pt}->{self.head_pt}>"


class _Face:
    __slots__ = ("fid", "region", "layer", "sides")

    def __init__(self, fid: int, region: int, layer):
        self.fid = fid
        self.region = region
        self.layer = layer  # sheet level (int) or ('sigma', copy) or ('local', i)
        self.sides: list[_Side] = []


@dataclass
class _DegenerateDisk:
    vertex: str
    alpha_curve: str
    beta_curve: str


class _Surface:
    """Mutable polygon complex with glued sides; all surgery lives here."""

    def __init__(self, curve_family: dict[str, str] | None = None) -> None:
        self.faces: list[_Face] = []
        self._next_sid = 0
        self._next_cut = 0
        self.curve_family: dict[str, str] = dict(curve_family or {})
        self.degenerate_disks: list[_DegenerateDisk] = []
        self.branch_marks: list[tuple] = []  # (cut point, dart) of slit far ends

    def family(self, dart) -> str:
        return self.curve_family[dart.curve]

    # -- construction ----------------------------------------------------

    def new_face(self, region: int, layer) -> _Face:
        f = _Face(len(self.faces), region, layer)
        self.faces.append(f)
        return f

    def add_side(self, face: _Face, dart, tail_pt: Point, head_pt: Point) -> _Side:
        s = _Side(self._next_sid, face, dart, tail_pt, head_pt)
        self._next_sid += 1
        face.sides.append(s)
        return s

    def glue(self, a: _Side, b: _Side) -> None:
        if a.partner is not None or b.partner is not None:
            raise BuilderError("side already glued")
        a.partner = b
        b.partner = a

    def copy(self) -> "_Surface":
        out = _Surface(self.curve_family)
        out._next_sid = self._next_sid
        out._next_cut = self._next_cut
        out.degenerate_disks = list(self.degenerate_disks)
        out.branch_marks = list(self.branch_marks)
        clones: dict[int, _Side] = {}
        for f in self.faces:
            nf = out.new_face(f.region, f.layer)
            for s in f.sides:
                ns = _Side(s.sid, nf, s.dart, s.tail_pt, s.head_pt)
                nf.sides.append(ns)
                clones[s.sid] = ns
        for f in self.faces:
            for s in f.sides:
                if s.partner is not None:
                    clones[s.sid].partner = clones[s.partner.sid]
        return out

    def fresh_cut_point(self) -> Point:
        self._next_cut += 1
        return ("cut", self._next_cut)

    # -- elementary queries ------------------------------------------------

    def sides(self) -> Iterator[_Side]:
        for f in self.faces:
            yield from f.sides

    def next_side(self, s: _Side) -> _Side:
        sides = s.face.sides
        return sides[(sides.index(s) + 1) % len(sides)]

    def prev_side(self, s: _Side) -> _Side:
        sides = s.face.sides
        return sides[(sides.index(s) - 1) % len(sides)]

    def cell_counts(self) -> tuple[int, int, int]:
        """(V, E, F) of the complex, symbolic degenerate disks excluded."""
        v = len(self.corner_classes())
        pairs = sum(1 for s in self.sides() if s.partner is not None) // 2
        boundary = sum(1 for s in self.sides() if s.partner is None)
        return v, pairs + boundary, len(self.faces)

    def chi(self) -> int:
        v, e, f = self.cell_counts()
        return v - e + f + len(self.degenerate_disks)

    # -- corner classes (vertex preimages) ---------------------------------

    def corner_forward(self, s: _Side) -> Optional[_Side]:
        """Next corner around the vertex point of corner(s), or None at boundary.

        corner(s) sits between s and next(s); crossing next(s) lands at the
        corner of the partner side.
        """
        n = self.next_side(s)
        return n.partner

    def corner_backward(self, s: _Side) -> Optional[_Side]:
        if s.partner is None:
            return None
        return self.prev_side(s.partner)

    def corner_classes(self) -> list[list[_Side]]:
        """Orbits of corners under the around-the-vertex step.

        Each corner is named by its incoming side; open orbits are returned
        end to end starting at the boundary end, closed orbits starting at
        the side with the smallest id.  The list itself is sorted by the
        smallest corner id, so everything downstream is deterministic.
        """
        all_corners = sorted((s for s in self.sides()), key=lambda s: s.sid)
        seen: set[int] = set()
        classes: list[list[_Side]] = []
        for s in all_corners:
            if s.sid in seen:
                continue
            # rewind to the open start if there is one
            start = s
            guard = 0
            while True:
                b = self.corner_backward(start)
                if b is None or b is s:
                    break
                start = b
                guard += 1
                if guard > self._next_sid + 1:
                    raise BuilderError("corner walk does not terminate")
            if self.corner_backward(start) is None:
                orbit = [start]
                cur = self.corner_forward(start)
                while cur is not None:
                    orbit.append(cur)
                    cur = self.corner_forward(cur)
            else:  # closed orbit through s
                orbit = [s]
                cur = self.corner_forward(s)
                while cur is not s:
                    orbit.append(cur)
                    cur = self.corner_forward(cur)
                m = min(range(len(orbit)), key=lambda i: orbit[i].sid)
                orbit = orbit[m:] + orbit[:m]
            if any(c.sid in seen for c in orbit):
                raise BuilderError("overlapping corner orbits")
            seen.update(c.sid for c in orbit)
            classes.append(orbit)
        classes.sort(key=lambda orbit: min(c.sid for c in orbit))
        return classes

    def class_point(self, orbit: list[_Side]) -> Point:
        return orbit[0].head_pt

    def class_is_open(self, orbit: list[_Side]) -> bool:
        return self.corner_backward(orbit[0]) is None

    def open_classes_at(self, pt: Point) -> list[list[_Side]]:
        return [
            orbit
            for orbit in self.corner_classes()
            if self.class_point(orbit) == pt and self.class_is_open(orbit)
        ]

    def class_slots(self, orbit: list[_Side]) -> tuple[_Side, list[_Side], _Side]:
        """(start free side, link sides, end free side) of an open class.

        The link between consecutive corners i, i+1 is the glued side
        next(orbit[i]); its tail sits at the class's vertex point.
        """
        if not self.class_is_open(orbit):
            raise BuilderError("slots of a closed class")
        links = [self.next_side(orbit[i]) for i in range(len(orbit) - 1)]
        return orbit[0], links, self.next_side(orbit[-1])

    # -- surgery primitives -------------------------------------------------

    def subdivide(self, s: _Side, mid: Point) -> tuple[_Side, _Side]:
        """Split s (and its partner, if any) at ``mid``; returns (tail, head) halves."""
        f = s.face
        i = f.sides.index(s)
        first = _Side(self._next_sid, f, s.dart, s.tail_pt, mid)
        self._next_sid += 1
        second = _Side(self._next_sid, f, s.dart, mid, s.head_pt)
        self._next_sid += 1
        f.sides[i : i + 1] = [first, second]
        p = s.partner
        if p is not None:
            g = p.face
            j = g.sides.index(p)
            pfirst = _Side(self._next_sid, g, p.dart, p.tail_pt, mid)
            self._next_sid += 1
            psecond = _Side(self._next_sid, g, p.dart, mid, p.head_pt)
            self._next_sid += 1
            g.sides[j : j + 1] = [pfirst, psecond]
            # s runs tail->head, p head->tail over the same segment
            first.partner = psecond
            psecond.partner = first
            second.partner = pfirst
            pfirst.partner = second
        return first, second

    def slit_at_tail(self, s: _Side, mid: Point | None = None) -> Point:
        """Open the tail half of the glued side s; returns the cut point.

        The far end of the slit is a boundary branch point recorded in
        ``branch_marks``.  Two parallel slits that will be cross-glued may
        share their cut point by passing ``mid`` explicitly.
        """
        if s.partner is None:
            raise BuilderError("cannot slit a boundary side")
        if mid is None:
            mid = self.fresh_cut_point()
        first, _second = self.subdivide(s, mid)
        mate = first.partner
        first.partner = None
        mate.partner = None
        self.branch_marks.append((mid, s.dart))
        return mid

    def glue_boundary(self, a: _Side, b: _Side) -> None:
        """Glue two boundary sides running over the same segment oppositely."""
        if a.partner is not None or b.partner is not None:
            raise BuilderError("glue_boundary needs two boundary sides")
        if (a.tail_pt, a.head_pt) != (b.head_pt, b.tail_pt):
            raise BuilderError("glue_boundary segment mismatch")
        a.partner = b
        b.partner = a

    # -- boundary structure -------------------------------------------------

    def next_boundary_side(self, s: _Side) -> _Side:
        t = self.next_side(s)
        guard = 0
        while t.partner is not None:
            t = self.next_side(t.partner)
            guard += 1
            if guard > 4 * (self._next_sid + 1):
                raise BuilderError("boundary walk does not terminate")
        return t

    def boundary_components(self) -> list[list[_Side]]:
        comps: list[list[_Side]] = []
        seen: set[int] = set()
        for s in sorted(self.sides(), key=lambda s: s.sid):
            if s.partner is not None or s.sid in seen:
                continue
            comp = [s]
            seen.add(s.sid)
            cur = self.next_boundary_side(s)
            while cur is not s:
                comp.append(cur)
                seen.add(cur.sid)
                cur = self.next_boundary_side(cur)
            comps.append(comp)
        return comps

    def face_components(self) -> list[list[_Face]]:
        parent = {f.fid: f.fid for f in self.faces}

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for s in self.sides():
            if s.partner is not None:
                a, b = find(s.face.fid), find(s.partner.face.fid)
                if a != b:
                    parent[a] = b
        groups: dict[int, list[_Face]] = {}
        for f in self.faces:
            groups.setdefault(find(f.fid), []).append(f)
        return [groups[k] for k in sorted(groups)]


# ---------------------------------------------------------------------------
# The public report object


class BuiltSurface:
    """A stage of the construction, with its census.

    Everything is recomputed from the cells on demand; instances are
    treated as immutable snapshots (stage transformers copy the complex).
    """

    def __init__(
        self,
        stage: str,
        diagram: HeegaardDiagram,
        domain: Domain,
        surface: _Surface,
        x: Generator | None = None,
        y: Generator | None = None,
    ):
        self.stage = stage
        self.diagram = diagram
        self.domain = domain
        self.surface = surface
        self.x = x
        self.y = y

    # -- census -------------------------------------------------------------

    @property
    def chi(self) -> int:
        return self.surface.chi()

    def pushforward(self) -> Domain:
        counts = [0] * len(self.diagram.regions)
        for f in self.surface.faces:
            counts[f.region] += 1
        return Domain(tuple(counts))

    def corners(self) -> list[tuple[str, int]]:
        """(vertex, chain length) of the surface corners, plus degenerate disks.

        A corner is an open vertex class of odd length; after the cutting
        stage every odd class has length one.  Each symbolic degenerate disk
        contributes two corners at its vertex.
        """
        out: list[tuple[str, int]] = []
        for orbit in self.surface.corner_classes():
            pt = self.surface.class_point(orbit)
            if pt[0] != "v" or not self.surface.class_is_open(orbit):
                continue
            if len(orbit) % 2 == 1:
                out.append((pt[1], len(orbit)))
        for disk in self.surface.degenerate_disks:
            out.append((disk.vertex, 1))
            out.append((disk.vertex, 1))
        return sorted(out)

    def corner_count(self) -> int:
        return len(self.corners())

    def boundary_arcs(self) -> dict[str, list[dict]]:
        """Maximal boundary arcs per curve, split at the surface corners."""
        arcs: dict[str, list[dict]] = {name: [] for name in self.diagram.curve_vertices}
        surf = self.surface
        for comp in surf.boundary_components():
            # mark the positions whose following vertex class is a corner
            breaks: list[int] = []
            for i, s in enumerate(comp):
                orbit_rep = s  # corner(s) belongs to the class after side s
                # find class of corner(s): open class containing this corner
                # corner is odd <=> its class has odd length
                orbit = _class_of_corner(surf, s)
                pt = surf.class_point(orbit)
                if pt[0] == "v" and len(orbit) % 2 == 1:
                    breaks.append(i)
            if not breaks:
                curve_names = {s.dart.curve for s in comp}
                if len(curve_names) != 1:
                    raise BuilderError("cornerless boundary circle over several curves")
                arcs[curve_names.pop()].append(
                    {"sides": len(comp), "circle": True}
                )
                continue
            for k, i in enumerate(breaks):
                j = breaks[(k + 1) % len(breaks)]
                run = (
                    comp[i + 1 : j + 1]
                    if j > i
                    else comp[i + 1 :] + comp[: j + 1]
                )
                curve_names = {s.dart.curve for s in run}
                if len(curve_names) != 1:
                    raise BuilderError("boundary arc crosses curves without a corner")
                arcs[curve_names.pop()].append({"sides": len(run), "circle": False})
        for disk in self.surface.degenerate_disks:
            arcs[disk.alpha_curve].append({"sides": 1, "circle": False, "degenerate": True})
            arcs[disk.beta_curve].append({"sides": 1, "circle": False, "degenerate": True})
        return arcs

    def component_count(self) -> int:
        return len(self.surface.face_components()) + len(self.surface.degenerate_disks)

    def delta(self) -> Fraction:
        """Implied double-point excess (chi - chi_emb)/2 of the class."""
        if self.x is None or self.y is None:
            raise PreconditionError("delta needs the generator pair")
        chi_emb = embedded_euler_char(self.diagram, self.domain, self.x, self.y)
        return Fraction(self.chi - chi_emb, 2)

    def to_json_dict(self) -> dict:
        d: dict = {
            "stage": self.stage,
            "chi": self.chi,
            "corners": [
                {"vertex": v, "length": length} for v, length in self.corners()
            ],
            "boundary_arcs": {
                curve: arcs for curve, arcs in sorted(self.boundary_arcs().items())
            },
            "degenerate_disks": len(self.surface.degenerate_disks),
            "branch_marks": len(self.surface.branch_marks),
            "pushforward": self.pushforward().format(),
        }
        if self.x is not None and self.y is not None:
            delta = self.delta()
            d["delta"] = str(delta)
            d["branch_budget"] = str(branch_budget(self.diagram.genus, self.chi))
        return d


def _class_of_corner(surf: _Surface, s: _Side) -> list[_Side]:
    """The full vertex class through corner(s) (walked, not cached)."""
    start = s
    guard = 0
    while True:
        b = surf.corner_backward(start)
        if b is None or b is s:
            break
        start = b
        guard += 1
        if guard > surf._next_sid + 1:
            raise BuilderError("corner walk does not terminate")
    if surf.corner_backward(start) is None:
        orbit = [start]
        cur = surf.corner_forward(start)
        while cur is not None:
            orbit.append(cur)
            cur = surf.corner_forward(cur)
        return orbit
    orbit = [s]
    cur = surf.corner_forward(s)
    while cur is not s:
        orbit.append(cur)
        cur = surf.corner_forward(cur)
    return orbit


# ---------------------------------------------------------------------------
# Stage S0: gluing the region copies


def glue_copies(d: HeegaardDiagram, a: Domain) -> BuiltSurface:
    """Stage S0: one polygon per region copy, glued along the curve arcs.

    Along every alpha arc the sheets are matched top-aligned (the offset is
    the coefficient difference of the two sides); along every beta arc they
    are matched bottom-aligned.  A region adjacent to itself across an arc
    follows the same rules with its two arc sides kept distinct.
    """
    if not is_positive(a):
        raise PreconditionError("glue_copies needs a positive domain")
    if len(a.coeffs) != len(d.regions):
        raise PreconditionError("domain does not match the diagram")
    surf = _Surface(d.curve_family)
    side_of: dict[tuple, _Side] = {}
    for r in d.regions:
        n = a[r.index]
        for level in range(1, n + 1):
            f = surf.new_face(r.index, level)
            for dart in r.darts:
                s = surf.add_side(
                    f,
                    dart,
                    ("v", dart.vertex),
                    ("v", d.rev(dart).vertex),
                )
                side_of[(dart, level)] = s
    for name, edges in d.edges.items():
        fam = d.curve_family[name]
        for i in range(len(edges)):
            tail, _ = edges[i]
            e = Dart(tail, name, True)
            f = d.rev(e)
            p = a[d.face_of[e]]
            q = a[d.face_of[f]]
            if fam == BETA:
                pairs = [(m, m) for m in range(1, min(p, q) + 1)]
            else:
                off = q - p
                pairs = [
                    (m, m + off)
                    for m in range(1, p + 1)
                    if 1 <= m + off <= q
                ]
            for m, m2 in pairs:
                surf.glue(side_of[(e, m)], side_of[(f, m2)])
    return BuiltSurface("S0", d, a, surf)


def classify_vertex_chains(
    d: HeegaardDiagram, a: Domain, v: str
) -> list[PreimageChain]:
    """The preimage chains of crossing v in the glued surface of ``a``."""
    s0 = glue_copies(d, a)
    return chains_at(s0, v)


def chains_at(built: BuiltSurface, v: str) -> list[PreimageChain]:
    """Extract the quadrant-sheet chains at a crossing from any stage."""
    d = built.diagram
    surf = built.surface
    rot = d.rotation[v]
    out: list[PreimageChain] = []
    for orbit in surf.corner_classes():
        if surf.class_point(orbit) != ("v", v):
            continue
        cells = []
        for s in orbit:
            nxt = surf.next_side(s)
            # the corner between s and next(s) occupies the sector between
            # dart(next(s)) and its rotation successor
            dart = nxt.dart
            position = rot.index(dart) if dart in rot else None
            if position is None:
                raise BuilderError(f"corner at {v} with foreign dart {dart}")
            level = s.face.layer if isinstance(s.face.layer, int) else 0
            cells.append(QuadrantSheet(v, s.face.region, position, level))
        kind = "open" if surf.class_is_open(orbit) else "closed"
        out.append(PreimageChain(v, tuple(cells), kind))
    return out


@dataclass(frozen=True)
class _SynthDart:
    """Stand-in dart for the synthetic single-vertex model."""

    curve: str
    label: str

    def __repr__(self) -> str:
        return f"{self.label}:{self.curve}"


def local_vertex_chains(coeffs: tuple[int, int, int, int]) -> list[PreimageChain]:
    """Chains of a synthetic vertex whose four sectors have these coefficients.

    Sector i sits counterclockwise between half-dart i and half-dart i+1;
    half-darts 0 and 2 are alpha, 1 and 3 beta, and the gluings follow the
    same top-/bottom-aligned rules as the full construction, so this is the
    local model of any crossing with the given quadrant pattern.
    """
    if len(coeffs) != 4 or any(c < 0 for c in coeffs):
        raise PreconditionError("need four nonnegative sector coefficients")
    fam = {"la": ALPHA, "lb": BETA, "lo": "outer"}
    surf = _Surface(fam)
    center: Point = ("v", "p")

    def ray_dart(j: int, outward: bool) -> _SynthDart:
        curve = "la" if j % 2 == 0 else "lb"
        return _SynthDart(curve, f"{'out' if outward else 'in'}{j}")

    sides_out: dict[tuple[int, int], _Side] = {}
    sides_in: dict[tuple[int, int], _Side] = {}
    for i in range(4):
        for level in range(1, coeffs[i] + 1):
            f = surf.new_face(i, level)
            o_start: Point = ("v", f"o{i}")
            o_end: Point = ("v", f"o{(i + 1) % 4}")
            sides_in[((i + 1) % 4, level)] = surf.add_side(
                f, ray_dart((i + 1) % 4, False), o_end, center
            )
            sides_out[(i, level)] = surf.add_side(
                f, ray_dart(i, True), center, o_start
            )
            surf.add_side(f, _SynthDart("lo", f"outer{i}"), o_start, o_end)
    for j in range(4):
        # ray j separates sector j (out-side) from sector j-1 (in-side)
        c_out, c_in = coeffs[j], coeffs[(j - 1) % 4]
        if j % 2 == 0:  # alpha ray: top-aligned
            off = c_in - c_out
            pairs = [(m, m + off) for m in range(1, c_out + 1) if 1 <= m + off <= c_in]
        else:  # beta ray: bottom-aligned
            pairs = [(m, m) for m in range(1, min(c_out, c_in) + 1)]
        for m, m2 in pairs:
            surf.glue(sides_out[(j, m)], sides_in[(j, m2)])
    out: list[PreimageChain] = []
    for orbit in surf.corner_classes():
        if surf.class_point(orbit) != center:
            continue
        cells = tuple(
            QuadrantSheet("p", s.face.region, s.face.region, s.face.layer)
            for s in orbit
        )
        kind = "open" if surf.class_is_open(orbit) else "closed"
        out.append(PreimageChain("p", cells, kind))
    return out


# ---------------------------------------------------------------------------
# Stage S1: grinding bad corners down to right angles


def cut_bad_corners(built: BuiltSurface) -> BuiltSurface:
    """Stage S1: every odd vertex class of length 2m+1 >= 3 receives m cuts.

    The chain is oriented from its alpha-family free end and every second
    link (a beta-family side) is slit for half its length, repartitioning
    the class into one length-one corner and m smooth length-two pieces.
    """
    surf = built.surface.copy()
    _grind_odd_chains(surf)
    return BuiltSurface("S1", built.diagram, built.domain, surf, built.x, built.y)


def _grind_odd_chains(surf: _Surface) -> None:
    guard = 0
    while True:
        target = None
        for orbit in surf.corner_classes():
            pt = surf.class_point(orbit)
            if pt[0] != "v" or not surf.class_is_open(orbit):
                continue
            if len(orbit) % 2 == 1 and len(orbit) >= 3:
                target = orbit
                break
        if target is None:
            return
        start_free, links, end_free = surf.class_slots(target)
        fam_start = surf.family(start_free.dart)
        fam_end = surf.family(end_free.dart)
        if fam_start == fam_end:
            raise BuilderError("odd chain with equal end families")
        if fam_start != ALPHA:
            links = list(reversed(links))
        for i in range(0, len(links), 2):
            if surf.family(links[i].dart) == ALPHA:
                raise BuilderError("cut scheduled along an alpha link")
            surf.slit_at_tail(links[i])
        guard += 1
        if guard > 4 * surf._next_sid:
            raise BuilderError("bad-corner grinding does not terminate")


# ---------------------------------------------------------------------------
# Stage S2: corners for shared generator points


def add_degenerate_corners(
    built: BuiltSurface, x: Generator, y: Generator
) -> BuiltSurface:
    """Stage S2: each point of both generators gets its two corners.

    A shared point not covered by the boundary contributes a symbolic
    degenerate disk; a covered one gets a boundary slit, which introduces
    two corners and a boundary branch point.
    """
    d = built.diagram
    check_generator(d, x)
    check_generator(d, y)
    surf = built.surface.copy()
    shared = [v for v in x.points if v in set(y.points)]
    for v in shared:
        pt = ("v", v)
        open_here = surf.open_classes_at(pt)
        if not open_here:
            surf.degenerate_disks.append(
                _DegenerateDisk(v, d.vertex_alpha[v][0], d.vertex_beta[v][0])
            )
            continue
        orbit = open_here[0]
        if len(orbit) % 2 == 1:
            raise BuilderError("shared generator point already has a corner")
        _, links, _ = surf.class_slots(orbit)
        surf.slit_at_tail(links[0])
        _grind_odd_chains(surf)
    return BuiltSurface("S2", d, built.domain, surf, x, y)


# ---------------------------------------------------------------------------
# Stage S3: splicing boundary circles into the arcs


def splice_boundary_circles(built: BuiltSurface) -> BuiltSurface:
    """Stage S3: merge every boundary circle lying over one curve into the
    boundary arc of that curve.

    For a circle over an alpha curve, a slit is made along a beta arc
    preimage at the circle's passage over the outgoing generator's point on
    that curve, and one lip of the slit is glued to the matching side of
    the corner there; beta circles are treated symmetrically.  Each splice
    strictly decreases the number of circles.
    """
    if built.x is None:
        raise PreconditionError("splice needs the generator pair")
    d = built.diagram
    surf = built.surface.copy()
    x = built.x
    guard = 0
    while True:
        circle = _first_circle(surf)
        if circle is None:
            break
        curve = circle[0].dart.curve
        fam = d.curve_family[curve]
        v = _generator_point_on_curve(d, x, curve)
        _splice_circle(surf, d, circle, v, fam)
        _grind_odd_chains(surf)
        guard += 1
        if guard > 4 * surf._next_sid:
            raise BuilderError("splicing does not terminate")
    return BuiltSurface("S3", d, built.domain, surf, built.x, built.y)


def _first_circle(surf: _Surface) -> list[_Side] | None:
    for comp in surf.boundary_components():
        curves = {s.dart.curve for s in comp}
        if len(curves) == 1:
            # a circle has no odd (corner) classes; mixed components always
            # carry corners, single-curve ones never do
            return comp
    return None


def _generator_point_on_curve(d: HeegaardDiagram, x: Generator, curve: str) -> str:
    fam = d.curve_family[curve]
    for v in x.points:
        table = d.vertex_alpha if fam == ALPHA else d.vertex_beta
        if table[v][0] == curve:
            return v
    raise BuilderError(f"generator misses curve {curve}")


def _dart_at(d: HeegaardDiagram, side: _Side, pt: Point):
    """The diagram dart of ``side`` as seen from the vertex point ``pt``."""
    if side.tail_pt == pt:
        return side.dart
    if side.head_pt == pt:
        return d.rev(side.dart)
    raise BuilderError("side does not touch the vertex point")


def _splice_circle(
    surf: _Surface, d: HeegaardDiagram, circle: list[_Side], v: str, fam: str
) -> None:
    """Merge the circle into the rest of the boundary at its passage over v.

    Two local moves, tried in this order over the circle's passages and
    their other-family links:

    * corner mate: a corner at v has a free side over the link's dart; slit
      the link for half its length and glue the matching lip to the corner
      side (the corner migrates to the freshly cut sheet).
    * parallel passage: another boundary passage at v has a link over the
      same dart; slit both links at a shared cut point and cross-glue the
      four lips, swapping the sheets between the two passages.

    Both moves drop the Euler characteristic by one and leave every corner
    count unchanged.
    """
    pt = ("v", v)
    other_family = BETA if fam == ALPHA else ALPHA
    circle_ids = {s.sid for s in circle}

    def open_classes():
        return surf.open_classes_at(pt)

    passage_classes = [
        orbit
        for orbit in open_classes()
        if len(orbit) % 2 == 0 and surf.class_slots(orbit)[0].sid in circle_ids
    ]
    # corner-mate move
    for orbit in passage_classes:
        _, links, _ = surf.class_slots(orbit)
        for link in links:
            if surf.family(link.dart) != other_family:
                continue
            for corner in open_classes():
                if len(corner) % 2 == 0:
                    continue
                k_in, _, k_out = surf.class_slots(corner)
                for k_side in (k_in, k_out):
                    if _dart_at(d, k_side, pt) != link.dart:
                        continue
                    _execute_splice(surf, link, k_side, pt)
                    return
    # parallel-passage move
    for orbit in passage_classes:
        _, links, _ = surf.class_slots(orbit)
        for link in links:
            if surf.family(link.dart) != other_family:
                continue
            for other in open_classes():
                if len(other) % 2 == 1:
                    continue
                slots = surf.class_slots(other)
                if slots[0].sid in circle_ids:
                    continue
                for olink in slots[1]:
                    if olink.dart != link.dart or olink is link:
                        continue
                    _execute_swap(surf, link, olink, pt)
                    return
    raise BuilderError(f"no matching corner side to splice at {v}")


def _execute_splice(surf: _Surface, link: _Side, k_side: _Side, pt: Point) -> None:
    """Slit ``link`` at its tail and glue the matching lip to ``k_side``.

    ``link`` has its tail at the vertex point; ``k_side`` is a boundary side
    of the corner over the same dart, pointing into or out of the vertex.
    Orientations determine which lip mates with which subdivided half.
    """
    mate = link.partner
    mid = surf.slit_at_tail(link)
    # lips over [pt..mid]: tail-at-pt lip on link's face, head-at-pt on
    # mate's; the fresh cut point makes both unique across the complex
    tail_lip = next(
        s for s in link.face.sides if s.tail_pt == pt and s.head_pt == mid
    )
    head_lip = next(
        s for s in mate.face.sides if s.tail_pt == mid and s.head_pt == pt
    )
    if k_side.tail_pt == pt:
        first, _ = surf.subdivide(k_side, mid)
        surf.glue_boundary(first, head_lip)
    elif k_side.head_pt == pt:
        _, second = surf.subdivide(k_side, mid)
        surf.glue_boundary(second, tail_lip)
    else:
        raise BuilderError("corner side does not touch the vertex")


def _execute_swap(surf: _Surface, link: _Side, olink: _Side, pt: Point) -> None:
    """Slit two parallel links at a shared cut point and cross-glue the lips."""
    mate = link.partner
    omate = olink.partner
    mid = surf.slit_at_tail(link)
    surf.slit_at_tail(olink, mid)

    def lip(face: "_Face", tail: Point, head: Point) -> _Side:
        return next(
            s
            for s in face.sides
            if s.partner is None and s.tail_pt == tail and s.head_pt == head
        )

    surf.glue_boundary(lip(link.face, pt, mid), lip(omate.face, mid, pt))
    surf.glue_boundary(lip(olink.face, pt, mid), lip(mate.face, mid, pt))


# ---------------------------------------------------------------------------
# The full pipeline


def build_surface(
    d: HeegaardDiagram, a: Domain, x: Generator, y: Generator
) -> BuiltSurface:
    """Glue, cut, add degenerate corners, splice; verify the stage-3 contract.

    The result has 2g right-angle corners, exactly one boundary arc per
    curve, pushforward equal to the domain, and an Euler characteristic of
    the same parity as the embedded Euler characteristic of the class.
    """
    if not is_positive(a):
        raise PreconditionError("build_surface needs a positive domain")
    if not connects(d, a, x, y):
        raise PreconditionError("domain does not connect the generators")
    s0 = glue_copies(d, a)
    s0 = BuiltSurface("S0", d, a, s0.surface, x, y)
    s1 = cut_bad_corners(s0)
    s2 = add_degenerate_corners(s1, x, y)
    s3 = splice_boundary_circles(s2)
    _verify_stage3(s3)
    return s3


def _verify_stage3(s3: BuiltSurface) -> None:
    d = s3.diagram
    g = d.genus
    corners = s3.corners()
    if len(corners) != 2 * g:
        raise BuilderError(f"stage S3 has {len(corners)} corners, wanted {2 * g}")
    if any(length != 1 for _, length in corners):
        raise BuilderError("stage S3 corner with angle above a right angle")
    arcs = s3.boundary_arcs()
    for curve, lst in arcs.items():
        if len(lst) != 1 or lst[0].get("circle"):
            raise BuilderError(f"stage S3 boundary over {curve} is not one arc")
    if s3.pushforward() != s3.domain:
        raise BuilderError("stage S3 pushforward differs from the domain")
    chi_emb = embedded_euler_char(d, s3.domain, s3.x, s3.y)
    if (s3.chi - chi_emb) % 2 != 0:
        raise BuilderError("stage S3 parity defect against the embedded chi")


# ---------------------------------------------------------------------------
# Stage S4: stabilization


def stabilized_surface(
    d: HeegaardDiagram, a: Domain, x: Generator, y: Generator
) -> BuiltSurface:
    """Represent the class plus the full surface, with boundary, connectedly.

    Degenerate disks are dropped; a fresh copy of the whole surface is cut
    open at every point of x (two slits along the alpha curve, one along the
    beta curve) and chained onto the corners there.  Closed components of
    the stage-3 surface (full-surface layers of the domain) are opened at
    the same points and joined into the same chain, so the result is
    connected with pushforward A plus the surface class.
    """
    if d.genus <= 1:
        raise PreconditionError("should have assumed that g>1")
    s3 = build_surface(d, a, x, y)
    surf = s3.surface.copy()
    surf.degenerate_disks = []

    closed_layers = [
        comp
        for comp in surf.face_components()
        if all(s.partner is not None for f in comp for s in f.sides)
    ]
    for comp in closed_layers:
        per_region = [0] * len(d.regions)
        for f in comp:
            per_region[f.region] += 1
        if any(c != 1 for c in per_region):
            raise BuilderError("closed component is not a single surface layer")

    sigma_faces = _add_sigma_copy(surf, d)
    layers: list[list[_Face]] = closed_layers + [sigma_faces]

    for i in range(len(d.alpha)):
        v = x.points[i]
        pt = ("v", v)
        pending = _initial_pending_corner(surf, layers, pt)
        for layer in layers:
            pending = _cut_layer_and_chain(surf, d, layer, v, pending)
    s4 = BuiltSurface("S4", d, a + sigma_class(d), surf, x, y)
    if s4.component_count() != 1:
        raise BuilderError("stage S4 is not connected")
    if len(s4.corners()) != 2 * d.genus:
        raise BuilderError("stage S4 corner count defect")
    return s4


def _add_sigma_copy(surf: _Surface, d: HeegaardDiagram) -> list[_Face]:
    faces: list[_Face] = []
    side_of: dict[Dart, _Side] = {}
    for r in d.regions:
        f = surf.new_face(r.index, ("sigma", 1))
        faces.append(f)
        for dart in r.darts:
            side_of[dart] = surf.add_side(
                f, dart, ("v", dart.vertex), ("v", d.rev(dart).vertex)
            )
    for name, edges in d.edges.items():
        for i in range(len(edges)):
            tail, _ = edges[i]
            e = Dart(tail, name, True)
            surf.glue(side_of[e], side_of[d.rev(e)])
    return faces


def _initial_pending_corner(
    surf: _Surface, layers: list[list[_Face]], pt: Point
) -> list[_Side] | None:
    """The stage-3 corner at pt to chain from, if the point has one.

    Corners belonging to the closed layers or the fresh copy do not exist
    yet; a point of x with no corner (a dropped degenerate disk) starts the
    chain inside the first layer instead.
    """
    layer_fids = {f.fid for layer in layers for f in layer}
    for orbit in surf.open_classes_at(pt):
        if len(orbit) % 2 == 1 and orbit[0].face.fid not in layer_fids:
            return orbit
    return None


def _layer_side(surf: _Surface, layer: list[_Face], dart, pt: Point) -> _Side:
    """The layer's side over ``dart`` whose tail sits at ``pt``."""
    for f in layer:
        for s in f.sides:
            if s.dart == dart and s.tail_pt == pt:
                return s
    raise BuilderError(f"layer has no side over {dart} at {pt}")


def _cut_layer_and_chain(
    surf: _Surface,
    d: HeegaardDiagram,
    layer: list[_Face],
    v: str,
    pending: list[_Side] | None,
) -> list[_Side]:
    """Cut one layer open at v and glue the pending corner into the cut.

    An opening cut (no corner to receive, the replacement for a dropped
    degenerate disk) slits along both alpha half-darts and one beta
    half-dart, leaving two corners.  A receiving cut slits exactly along
    the two free darts of the received corner; the corner then closes the
    three remaining sectors into a smooth interior point.  Either way the
    layer is left with a fresh corner for the next layer up the chain.
    """
    pt = ("v", v)
    af = Dart(v, d.vertex_alpha[v][0], True)
    ab = Dart(v, d.vertex_alpha[v][0], False)
    bf = Dart(v, d.vertex_beta[v][0], True)
    if pending is not None:
        k_in, _, k_out = surf.class_slots(pending)
        cuts = sorted(
            {_dart_at(d, k_in, pt), _dart_at(d, k_out, pt)},
            key=lambda dart: (dart.curve, dart.forward),
        )
        if len(cuts) != 2:
            raise BuilderError("pending corner with degenerate free darts")
    else:
        cuts = [af, ab, bf]
    mids: dict[Dart, Point] = {}
    for dart in cuts:
        side = _layer_side(surf, layer, dart, pt)
        if side.partner is None:
            raise BuilderError("layer cut along an already open side")
        mids[dart] = surf.slit_at_tail(side)
    if pending is None:
        return _corner_in_layer(surf, layer, pt)
    # glue the pending corner's two sides into the matching lips
    k_in, _, k_out = surf.class_slots(pending)
    for k_side in (k_in, k_out):
        mid = mids[_dart_at(d, k_side, pt)]
        lip_tail, lip_head = _lips(surf, pt, mid)
        if k_side.head_pt == pt:
            _, second = surf.subdivide(k_side, mid)
            surf.glue_boundary(second, lip_tail)
        else:
            first, _ = surf.subdivide(k_side, mid)
            surf.glue_boundary(first, lip_head)
    return _corner_in_layer(surf, layer, pt)


def _lips(surf: _Surface, pt: Point, mid: Point) -> tuple[_Side, _Side]:
    """(tail-at-pt, head-at-pt) boundary lips of the cut ending at ``mid``.

    Cut points are fresh, so the two lips are unique in the whole complex.
    """
    tail_lip = head_lip = None
    for f in surf.faces:
        for s in f.sides:
            if s.partner is not None:
                continue
            if s.tail_pt == pt and s.head_pt == mid:
                tail_lip = s
            elif s.tail_pt == mid and s.head_pt == pt:
                head_lip = s
    if tail_lip is None or head_lip is None:
        raise BuilderError("cut lips not found")
    return tail_lip, head_lip


def _corner_in_layer(surf: _Surface, layer: list[_Face], pt: Point) -> list[_Side]:
    fids = {f.fid for f in layer}
    for orbit in surf.open_classes_at(pt):
        if len(orbit) % 2 == 1 and orbit[0].face.fid in fids:
            return orbit
    raise BuilderError("layer cut produced no corner")


# ---------------------------------------------------------------------------
# Stage S4 verification


def branched_cover_check(s4: BuiltSurface) -> dict:
    """Bookkeeping for the g-fold cover of the disk carried by stage S4.

    Verifies that the boundary corner counts are even with halves summing to
    the genus, and that the branch budget g - chi is a nonnegative integer.
    Violations are reported as data, not raised.
    """
    if s4.stage != "S4":
        raise PreconditionError("branched_cover_check needs a stage S4 surface")
    d = s4.diagram
    g = d.genus
    surf = s4.surface
    per_component: list[int] = []
    for comp in surf.boundary_components():
        n = 0
        for s in comp:
            orbit = _class_of_corner(surf, s)
            pt = surf.class_point(orbit)
            if pt[0] == "v" and len(orbit) % 2 == 1:
                n += 1
        per_component.append(n)
    halves = sum(Fraction(n, 2) for n in per_component)
    budget = branch_budget(g, s4.chi)
    report = {
        "corner_halves": [str(Fraction(n, 2)) for n in per_component],
        "corner_halves_sum": str(halves),
        "corner_halves_sum_is_genus": halves == g,
        "all_components_even": all(n % 2 == 0 for n in per_component),
        "branch_budget": str(budget),
        "branch_budget_ok": budget >= 0 and budget.denominator == 1,
        "connected": s4.component_count() == 1,
        "ok": (
            halves == g
            and all(n % 2 == 0 for n in per_component)
            and budget >= 0
            and budget.denominator == 1
            and s4.component_count() == 1
        ),
    }
    return report
