"""Combinatorial Heegaard diagrams: parsing, face tracing, validation.

A diagram is stored as two families of closed curves (alpha and beta) on an
oriented closed surface, given by the cyclic sequences of their transverse
crossings, plus a local crossing sign at every crossing.  Everything else --
the rotation system, the regions (faces), the genus -- is derived here by
face tracing, and all derived quantities are exact integers or rationals.

Orientation conventions (fixed once, globally):

* sign ``+`` at a vertex means the counterclockwise dart order is
  (alpha-forward, beta-forward, alpha-backward, beta-backward);
  sign ``-`` swaps the two beta darts.
* faces are orbits of (rotation^-1 . edge-reversal), so region boundaries
  run counterclockwise and each dart has the region containing it on its
  left.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

ALPHA = "alpha"
BETA = "beta"

_SIGN_TOKENS = {"+": 1, "-": -1}


class DiagramError(ValueError):
    """Unparseable or structurally broken diagram input.

    Carries the 1-based line number of the offending input line when the
    error arose from a text file.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Dart:
    """One of the four edge-germs at a crossing.

    ``forward`` means the dart leaves ``vertex`` in the direction the curve
    is listed; the edge-reversal involution pairs it with the backward dart
    at the next vertex along the curve.
    """

    vertex: str
    curve: str
    forward: bool

    def __repr__(self) -> str:  # compact, used in error messages and tests
        arrow = ">" if self.forward else "<"
        return f"{self.vertex}{arrow}{self.curve}"


@dataclass(frozen=True)
class Region:
    """A face of the traced surface: a disk with ``corner_count`` corners."""

    index: int
    darts: tuple[Dart, ...]

    @property
    def corner_count(self) -> int:
        return len(self.darts)

    @property
    def name(self) -> str:
        return f"r{self.index}"


@dataclass(frozen=True)
class Quadrant:
    """One of the four sectors at a vertex, in rotation order."""

    vertex: str
    region: int
    position: int  # 0..3, counterclockwise from the alpha-forward dart


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


class HeegaardDiagram:
    """A validated-on-construction combinatorial map with curve labels.

    Immutable by convention: all attributes are set during construction and
    never mutated afterwards, so instances are safe to share freely.

    Construction derives the rotation system, traces the faces, and computes
    the genus.  Structural defects (a vertex missing a sign, a vertex not on
    exactly one curve of each family, ...) raise :class:`DiagramError`;
    semantic defects (genus mismatch, disconnected complement, ...) are
    reported by :func:`validate_diagram` instead.
    """

    def __init__(
        self,
        alpha: Sequence[tuple[str, Sequence[str]]],
        beta: Sequence[tuple[str, Sequence[str]]],
        signs: dict[str, int],
    ):
        if not alpha:
            raise DiagramError("no alpha curves")
        if not beta:
            raise DiagramError("no beta curves")
        self.alpha: tuple[tuple[str, tuple[str, ...]], ...] = tuple(
            (name, tuple(vs)) for name, vs in alpha
        )
        self.beta: tuple[tuple[str, tuple[str, ...]], ...] = tuple(
            (name, tuple(vs)) for name, vs in beta
        )
        self.signs: dict[str, int] = dict(signs)

        names = [n for n, _ in self.alpha] + [n for n, _ in self.beta]
        dup = _first_duplicate(names)
        if dup is not None:
            raise DiagramError(f"duplicate curve name {dup!r}")

        # Vertex -> (curve name, position) per family; also fixes the
        # canonical vertex order (order of first appearance in the alpha
        # family).
        self.vertex_alpha: dict[str, tuple[str, int]] = {}
        self.vertex_beta: dict[str, tuple[str, int]] = {}
        order: list[str] = []
        for name, vs in self.alpha:
            if not vs:
                raise DiagramError(f"alpha curve {name!r} has no vertices")
            for pos, v in enumerate(vs):
                if v in self.vertex_alpha:
                    raise DiagramError(f"vertex {v!r} listed twice in the alpha family")
                self.vertex_alpha[v] = (name, pos)
                order.append(v)
        for name, vs in self.beta:
            if not vs:
                raise DiagramError(f"beta curve {name!r} has no vertices")
            for pos, v in enumerate(vs):
                if v in self.vertex_beta:
                    raise DiagramError(f"vertex {v!r} listed twice in the beta family")
                self.vertex_beta[v] = (name, pos)
        for v in self.vertex_alpha:
            if v not in self.vertex_beta:
                raise DiagramError(f"vertex {v!r} is not on any beta curve")
        for v in self.vertex_beta:
            if v not in self.vertex_alpha:
                raise DiagramError(f"vertex {v!r} is not on any alpha curve")
        self.vertices: tuple[str, ...] = tuple(order)

        for v in self.vertices:
            if v not in self.signs:
                raise DiagramError(f"missing sign for vertex {v!r}")
        for v in self.signs:
            if v not in self.vertex_alpha:
                raise DiagramError(f"sign given for unknown vertex {v!r}")
        if any(s not in (1, -1) for s in self.signs.values()):
            raise DiagramError("signs must be +1 or -1")

        self.curve_vertices: dict[str, tuple[str, ...]] = {
            name: vs for name, vs in self.alpha + self.beta
        }
        self.curve_family: dict[str, str] = {}
        for name, _ in self.alpha:
            self.curve_family[name] = ALPHA
        for name, _ in self.beta:
            self.curve_family[name] = BETA

        self._derive()

    # -- construction helpers -------------------------------------------

    def _derive(self) -> None:
        # Rotation system: counterclockwise dart order at every vertex.
        self.rotation: dict[str, tuple[Dart, Dart, Dart, Dart]] = {}
        for v in self.vertices:
            ac, _ = self.vertex_alpha[v]
            bc, _ = self.vertex_beta[v]
            af = Dart(v, ac, True)
            ab = Dart(v, ac, False)
            bf = Dart(v, bc, True)
            bb = Dart(v, bc, False)
            if self.signs[v] == 1:
                self.rotation[v] = (af, bf, ab, bb)
            else:
                self.rotation[v] = (af, bb, ab, bf)
        self._rot_next: dict[Dart, Dart] = {}
        self._rot_prev: dict[Dart, Dart] = {}
        for v, rot in self.rotation.items():
            for i, d in enumerate(rot):
                self._rot_next[d] = rot[(i + 1) % 4]
                self._rot_prev[d] = rot[(i - 1) % 4]

        self.regions: tuple[Region, ...] = trace_faces(self)
        self.face_of: dict[Dart, int] = {}
        for r in self.regions:
            for d in r.darts:
                self.face_of[d] = r.index

        v_count = len(self.vertices)
        e_count = 2 * v_count
        f_count = len(self.regions)
        chi = v_count - e_count + f_count
        assert chi % 2 == 0, "a rotation system always traces a closed oriented surface"
        self.genus: int = (2 - chi) // 2

        # Edges, oriented along their curve; (curve, i) runs from the i-th
        # listed vertex to the next.
        self.edges: dict[str, tuple[tuple[str, str], ...]] = {}
        self.dart_edge: dict[Dart, tuple[str, int]] = {}
        for name, vs in self.alpha + self.beta:
            k = len(vs)
            self.edges[name] = tuple((vs[i], vs[(i + 1) % k]) for i in range(k))
            for i, v in enumerate(vs):
                self.dart_edge[Dart(v, name, True)] = (name, i)
                self.dart_edge[Dart(v, name, False)] = (name, (i - 1) % k)

    # -- basic combinatorial maps ----------------------------------------

    def curve_next(self, curve: str, v: str) -> str:
        vs = self.curve_vertices[curve]
        fam = self.curve_family[curve]
        _, pos = (self.vertex_alpha if fam == ALPHA else self.vertex_beta)[v]
        return vs[(pos + 1) % len(vs)]

    def curve_prev(self, curve: str, v: str) -> str:
        vs = self.curve_vertices[curve]
        fam = self.curve_family[curve]
        _, pos = (self.vertex_alpha if fam == ALPHA else self.vertex_beta)[v]
        return vs[(pos - 1) % len(vs)]

    def rev(self, d: Dart) -> Dart:
        """Edge reversal: the matching dart at the other end of d's edge."""
        if d.forward:
            return Dart(self.curve_next(d.curve, d.vertex), d.curve, False)
        return Dart(self.curve_prev(d.curve, d.vertex), d.curve, True)

    def rot_next(self, d: Dart) -> Dart:
        return self._rot_next[d]

    def rot_prev(self, d: Dart) -> Dart:
        return self._rot_prev[d]

    def phi(self, d: Dart) -> Dart:
        """Face-walk step: rotation^-1 composed with edge reversal."""
        return self._rot_prev[self.rev(d)]

    def darts(self) -> Iterator[Dart]:
        """All darts in canonical order (family, curve, position, sense)."""
        for _, curves in ((ALPHA, self.alpha), (BETA, self.beta)):
            for name, vs in curves:
                for v in vs:
                    yield Dart(v, name, True)
                    yield Dart(v, name, False)

    def family(self, d: Dart) -> str:
        return self.curve_family[d.curve]

    def quadrants_at(self, v: str) -> tuple[Quadrant, Quadrant, Quadrant, Quadrant]:
        """The four sectors at v in rotation order.

        Sector ``i`` lies counterclockwise between rotation dart ``i`` and
        dart ``i+1``; it belongs to the region whose boundary walk contains
        dart ``i``.
        """
        if v not in self.vertex_alpha:
            raise DiagramError(f"unknown vertex {v!r}")
        rot = self.rotation[v]
        return tuple(
            Quadrant(v, self.face_of[rot[i]], i) for i in range(4)
        )  # type: ignore[return-value]

    def edge_sides(self, curve: str, i: int) -> tuple[int, int]:
        """(left region, right region) of oriented edge i of ``curve``."""
        tail, _ = self.edges[curve][i]
        fwd = Dart(tail, curve, True)
        return self.face_of[fwd], self.face_of[self.rev(fwd)]

    def mirror(self) -> "HeegaardDiagram":
        """The diagram with the opposite surface orientation (all signs flipped)."""
        return HeegaardDiagram(
            self.alpha, self.beta, {v: -s for v, s in self.signs.items()}
        )

    def region_census(self) -> tuple[int, ...]:
        return tuple(sorted(r.corner_count for r in self.regions))

    def euler_char(self) -> int:
        return 2 - 2 * self.genus

    def __repr__(self) -> str:
        return (
            f"HeegaardDiagram(genus={self.genus}, vertices={len(self.vertices)}, "
            f"regions={self.region_census()})"
        )


def trace_faces(d: HeegaardDiagram) -> tuple[Region, ...]:
    """Trace the faces of the rotation system.

    Faces are the orbits of (rotation^-1 . edge-reversal); every dart lies in
    exactly one face.  Region ids are assigned in order of first discovery
    when darts are iterated canonically, which makes them stable across runs
    and across re-serialization.
    """
    seen: set[Dart] = set()
    regions: list[Region] = []
    for start in d.darts():
        if start in seen:
            continue
        orbit = [start]
        seen.add(start)
        cur = d.phi(start)
        while cur != start:
            orbit.append(cur)
            seen.add(cur)
            cur = d.phi(cur)
        regions.append(Region(len(regions), tuple(orbit)))
    return tuple(regions)


def validate_diagram(d: HeegaardDiagram) -> list[Violation]:
    """Check the semantic invariants; returns an ordered, deterministic report.

    An empty report means the diagram is a genuine Heegaard diagram for our
    purposes: curve counts match the traced genus, the traced surface is
    connected, and the complement of each curve family is connected.
    """
    out: list[Violation] = []
    if len(d.alpha) != len(d.beta):
        out.append(
            Violation(
                "curve-count",
                f"curve count mismatch: {len(d.alpha)} alpha vs {len(d.beta)} beta",
            )
        )
    if d.genus != len(d.alpha):
        out.append(
            Violation(
                "genus-mismatch",
                f"traced genus {d.genus} != curve count {len(d.alpha)}",
            )
        )
    if not _surface_connected(d):
        out.append(Violation("disconnected", "traced surface is disconnected"))
    for family, code in ((ALPHA, "alpha-complement"), (BETA, "beta-complement")):
        if not _complement_connected(d, family):
            out.append(
                Violation(code, f"complement of the {family} curves is disconnected")
            )
    # Exactness cross-check: sum over regions of (1 - c/4) must equal chi.
    total = sum(Fraction(4 - r.corner_count, 4) for r in d.regions)
    if total != d.euler_char():
        out.append(
            Violation(
                "corner-sum",
                f"sum of (1 - corners/4) = {total} != chi = {d.euler_char()}",
            )
        )
    return out


def _surface_connected(d: HeegaardDiagram) -> bool:
    verts = list(d.vertices)
    if not verts:
        return True
    seen = {verts[0]}
    stack = [verts[0]]
    while stack:
        v = stack.pop()
        for dart in d.rotation[v]:
            w = d.rev(dart).vertex
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(verts)


def _complement_connected(d: HeegaardDiagram, cut_family: str) -> bool:
    """Connectivity of the surface cut along all curves of ``cut_family``.

    The pieces are the regions, glued across edges of the *other* family.
    """
    if not d.regions:
        return True
    parent = list(range(len(d.regions)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for name, edges in d.edges.items():
        if d.curve_family[name] == cut_family:
            continue
        for i in range(len(edges)):
            a, b = d.edge_sides(name, i)
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    return len({find(i) for i in range(len(d.regions))}) == 1


# ---------------------------------------------------------------------------
# Text format


def parse_diagram(text: str) -> HeegaardDiagram:
    """Parse the line-oriented diagram format.

    Lines: ``# comment``, ``alpha <name>: v1 v2 ... vk`` (cyclic),
    ``beta <name>: ...``, ``sign <vertex>: +|-``.  Every vertex needs exactly
    one sign line.  Raises :class:`DiagramError` with a line number on the
    first defect.
    """
    alpha: list[tuple[str, list[str]]] = []
    beta: list[tuple[str, list[str]]] = []
    signs: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        head_tokens = head.split()
        if len(head_tokens) != 2 or not _:
            raise DiagramError(f"unknown token {line.split()[0]!r}", lineno)
        kind, name = head_tokens
        body = rest.split()
        if kind in (ALPHA, BETA):
            if not body:
                raise DiagramError(f"curve {name!r} has no vertices", lineno)
            (alpha if kind == ALPHA else beta).append((name, body))
        elif kind == "sign":
            if name in signs:
                raise DiagramError(f"duplicate sign for vertex {name!r}", lineno)
            if len(body) != 1 or body[0] not in _SIGN_TOKENS:
                raise DiagramError(f"sign for {name!r} must be + or -", lineno)
            signs[name] = _SIGN_TOKENS[body[0]]
        else:
            raise DiagramError(f"unknown token {kind!r}", lineno)
    return HeegaardDiagram(alpha, beta, signs)


def serialize_diagram(d: HeegaardDiagram) -> str:
    """Emit the diagram in canonical form; ``parse . serialize`` is identity."""
    lines: list[str] = []
    for name, vs in d.alpha:
        lines.append(f"alpha {name}: {' '.join(vs)}")
    for name, vs in d.beta:
        lines.append(f"beta {name}: {' '.join(vs)}")
    for v in d.vertices:
        lines.append(f"sign {v}: {'+' if d.signs[v] == 1 else '-'}")
    return "\n".join(lines) + "\n"


def _first_duplicate(items: Sequence[str]) -> str | None:
    seen: set[str] = set()
    for x in items:
        if x in seen:
            return x
        seen.add(x)
    return None
