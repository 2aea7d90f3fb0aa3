"""Generators, domains and their boundary algebra.

A domain is an integer vector indexed by the regions of a diagram (a
relative 2-chain).  Its boundary along the alpha and beta curves, and the
vertex boundary of that 1-chain, decide whether the domain connects one
generator to another.  Enumeration of connecting domains is exact: a
particular solution of the small integer linear system plus an echelonized
kernel basis, walked exhaustively inside the coefficient box.

Sign convention (fixed): with the counterclockwise surface orientation an
edge oriented along its curve's listed direction gets the coefficient
(left region) - (right region), and ``connects(A, x, y)`` demands the vertex
boundary of the alpha part be y - x and of the beta part be x - y.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from hdindex.diagram import ALPHA, BETA, DiagramError, HeegaardDiagram


@dataclass(frozen=True)
class Domain:
    """Integer coefficients on the regions, in canonical region order."""

    coeffs: tuple[int, ...]

    def __getitem__(self, region: int) -> int:
        return self.coeffs[region]

    def __add__(self, other: "Domain") -> "Domain":
        _same_length(self, other)
        return Domain(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Domain") -> "Domain":
        _same_length(self, other)
        return Domain(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, k: int) -> "Domain":
        return Domain(tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __neg__(self) -> "Domain":
        return Domain(tuple(-a for a in self.coeffs))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coeffs) if c != 0)

    def format(self) -> str:
        """Compact text form ``r<k>:<int>,...``; omitted regions are 0."""
        parts = [f"r{i}:{c}" for i, c in enumerate(self.coeffs) if c != 0]
        return ",".join(parts) if parts else "0"

    @staticmethod
    def zero(d: HeegaardDiagram) -> "Domain":
        return Domain((0,) * len(d.regions))

    @staticmethod
    def parse(d: HeegaardDiagram, text: str) -> "Domain":
        """Parse ``r<k>:<int>`` pairs separated by commas; ``0`` is the zero domain."""
        coeffs = [0] * len(d.regions)
        text = text.strip()
        if text in ("", "0"):
            return Domain(tuple(coeffs))
        for part in text.split(","):
            part = part.strip()
            name, sep, value = part.partition(":")
            if not name.startswith("r") or not sep:
                raise DiagramError(f"bad domain term {part!r}")
            try:
                idx = int(name[1:])
                c = int(value)
            except ValueError:
                raise DiagramError(f"bad domain term {part!r}") from None
            if not 0 <= idx < len(coeffs):
                raise DiagramError(f"unknown region {name!r}")
            coeffs[idx] += c
        return Domain(tuple(coeffs))


@dataclass(frozen=True)
class Generator:
    """One intersection point per alpha curve, forming a matching with the betas."""

    points: tuple[str, ...]  # indexed by alpha-curve position

    def format(self) -> str:
        return ",".join(self.points)

    @staticmethod
    def parse(d: HeegaardDiagram, text: str) -> "Generator":
        pts = tuple(p.strip() for p in text.split(","))
        g = Generator(pts)
        check_generator(d, g)
        return g


@dataclass(frozen=True)
class BoundaryChain:
    """Per-edge coefficients of the boundary of a domain, split by family.

    Keys are (curve name, edge index); edge i runs from the curve's i-th
    listed vertex to the next one.
    """

    alpha_part: Mapping[tuple[str, int], int]
    beta_part: Mapping[tuple[str, int], int]


def check_generator(d: HeegaardDiagram, g: Generator) -> None:
    """Raise DiagramError unless g is a valid generator of d."""
    if len(g.points) != len(d.alpha):
        raise DiagramError(
            f"generator needs {len(d.alpha)} points, got {len(g.points)}"
        )
    betas_used: set[str] = set()
    for i, (aname, _) in enumerate(d.alpha):
        v = g.points[i]
        if v not in d.vertex_alpha:
            raise DiagramError(f"unknown vertex {v!r} in generator")
        if d.vertex_alpha[v][0] != aname:
            raise DiagramError(f"vertex {v!r} is not on alpha curve {aname!r}")
        bname = d.vertex_beta[v][0]
        if bname in betas_used:
            raise DiagramError(
                f"generator uses beta curve {bname!r} twice (not a matching)"
            )
        betas_used.add(bname)


def boundary_chain(d: HeegaardDiagram, a: Domain) -> BoundaryChain:
    """The 1-chain boundary of ``a`` along both curve families."""
    _check_domain(d, a)
    alpha_part: dict[tuple[str, int], int] = {}
    beta_part: dict[tuple[str, int], int] = {}
    for name, edges in d.edges.items():
        target = alpha_part if d.curve_family[name] == ALPHA else beta_part
        for i in range(len(edges)):
            left, right = d.edge_sides(name, i)
            target[(name, i)] = a[left] - a[right]
    return BoundaryChain(alpha_part, beta_part)


def vertex_boundary(
    d: HeegaardDiagram, chain: BoundaryChain, family: str
) -> dict[str, int]:
    """Boundary of the 1-chain restricted to one family, as a 0-chain.

    At each vertex: incoming edge coefficient minus outgoing, summed along
    the single curve of that family through the vertex.
    """
    if family not in (ALPHA, BETA):
        raise ValueError(f"family must be {ALPHA!r} or {BETA!r}")
    part = chain.alpha_part if family == ALPHA else chain.beta_part
    out: dict[str, int] = {v: 0 for v in d.vertices}
    for (name, i), c in part.items():
        if c == 0:
            continue
        tail, head = d.edges[name][i]
        out[head] += c
        out[tail] -= c
    return out


def connects(d: HeegaardDiagram, a: Domain, x: Generator, y: Generator) -> bool:
    """True iff ``a`` is a strip class from x to y.

    Demands vertex_boundary(alpha part) = y - x and
    vertex_boundary(beta part) = x - y as 0-chains.
    """
    check_generator(d, x)
    check_generator(d, y)
    ch = boundary_chain(d, a)
    want_alpha = {v: 0 for v in d.vertices}
    for v in y.points:
        want_alpha[v] += 1
    for v in x.points:
        want_alpha[v] -= 1
    if vertex_boundary(d, ch, ALPHA) != want_alpha:
        return False
    want_beta = {v: -c for v, c in want_alpha.items()}
    return vertex_boundary(d, ch, BETA) == want_beta


def compose(
    d: HeegaardDiagram,
    a: Domain,
    x: Generator,
    y: Generator,
    b: Domain,
    z: Generator,
) -> Domain:
    """Sum of a in pi2(x,y) and b in pi2(y,z); the result lies in pi2(x,z)."""
    if not connects(d, a, x, y):
        raise DiagramError("first domain does not connect x to y")
    if not connects(d, b, y, z):
        raise DiagramError("second domain does not connect y to z")
    return a + b


def is_positive(a: Domain) -> bool:
    return all(c >= 0 for c in a.coeffs)


def sigma_class(d: HeegaardDiagram) -> Domain:
    """The class of the full surface: every coefficient 1."""
    return Domain((1,) * len(d.regions))


def enumerate_generators(d: HeegaardDiagram) -> list[Generator]:
    """All matchings, by backtracking over alpha curves in canonical order."""
    n = len(d.alpha)
    out: list[Generator] = []
    chosen: list[str] = []
    used_beta: set[str] = set()

    def rec(i: int) -> None:
        if i == n:
            out.append(Generator(tuple(chosen)))
            return
        _, vs = d.alpha[i]
        for v in vs:
            bname = d.vertex_beta[v][0]
            if bname in used_beta:
                continue
            chosen.append(v)
            used_beta.add(bname)
            rec(i + 1)
            chosen.pop()
            used_beta.discard(bname)

    rec(0)
    return out


# ---------------------------------------------------------------------------
# Integer linear algebra: the boundary matrix, its kernel, and enumeration.


def _boundary_matrix(d: HeegaardDiagram) -> list[list[int]]:
    """Rows: (family, vertex) pairs in canonical order; columns: regions.

    M . A gives the stacked vertex boundaries (alpha block then beta block).
    """
    rows: list[list[int]] = []
    nreg = len(d.regions)
    for family in (ALPHA, BETA):
        lookup = d.vertex_alpha if family == ALPHA else d.vertex_beta
        for v in d.vertices:
            row = [0] * nreg
            curve, pos = lookup[v]
            k = len(d.curve_vertices[curve])
            for e, s in (((pos - 1) % k, 1), (pos, -1)):
                left, right = d.edge_sides(curve, e)
                row[left] += s
                row[right] -= s
            rows.append(row)
    return rows


def _target_vector(d: HeegaardDiagram, x: Generator, y: Generator) -> list[int]:
    xs = set(x.points)
    ys = set(y.points)
    t: list[int] = []
    for sgn in (1, -1):  # alpha block wants y - x, beta block x - y
        for v in d.vertices:
            t.append(sgn * (int(v in ys) - int(v in xs)))
    return t


def _kernel_basis(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Integer kernel basis, in row-echelon form with positive pivots.

    Row-reduces [M^T | I] over the integers; transpose rows whose M^T part
    vanished carry kernel vectors in the identity part.
    """
    nrows = len(rows)
    aug = [
        [rows[r][c] for r in range(nrows)] + [int(i == c) for i in range(ncols)]
        for c in range(ncols)
    ]
    pivot_row = 0
    for col in range(nrows):
        while pivot_row < len(aug):
            nz = [r for r in range(pivot_row, len(aug)) if aug[r][col] != 0]
            if not nz:
                break
            r0 = min(nz, key=lambda r: abs(aug[r][col]))
            aug[pivot_row], aug[r0] = aug[r0], aug[pivot_row]
            done = True
            for r in range(pivot_row + 1, len(aug)):
                if aug[r][col] != 0:
                    q = aug[r][col] // aug[pivot_row][col]
                    aug[r] = [a - q * b for a, b in zip(aug[r], aug[pivot_row])]
                    if aug[r][col] != 0:
                        done = False
            if done:
                pivot_row += 1
                break
    kernel = [
        row[nrows:] for row in aug[pivot_row:] if all(a == 0 for a in row[:nrows])
    ]
    return _row_echelon(kernel)


def _row_echelon(rows: list[list[int]]) -> list[list[int]]:
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    cols = len(rows[0])
    out: list[list[int]] = []
    col = 0
    while rows and col < cols:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            base = nz[0]
            for r in nz[1:]:
                q = r[col] // base[col]
                for i in range(cols):
                    r[i] -= q * base[i]
            nz = [r for r in nz if r[col] != 0]
        piv = nz[0]
        if piv[col] < 0:
            piv[:] = [-a for a in piv]
        out.append(piv)
        rows = [r for r in rows if r is not piv and any(r)]
        col += 1
    # reduce entries above pivots so the basis is canonical
    for i in reversed(range(len(out))):
        pc = next(c for c in range(cols) if out[i][c] != 0)
        for j in range(i):
            q = out[j][pc] // out[i][pc]
            if q:
                for c in range(cols):
                    out[j][c] -= q * out[i][c]
    return out


def _particular_solution(
    rows: list[list[int]], target: list[int], ncols: int
) -> list[int] | None:
    """One integer solution of M x = t, or None if the system is unsolvable.

    Gaussian elimination over the rationals, then a walk along the kernel to
    clear denominators if the free-variable slice came out non-integral.
    """
    m = [[Fraction(a) for a in r] + [Fraction(t)] for r, t in zip(rows, target)]
    nrows = len(m)
    piv_cols: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        m[r] = [a / m[r][c] for a in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if m[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(piv_cols):
        x[c] = m[i][ncols]
    if all(v.denominator == 1 for v in x):
        return [int(v) for v in x]
    return _integer_point_in_coset(rows, ncols, x)


def _integer_point_in_coset(rows, ncols, x_frac) -> list[int] | None:
    """Search x + ker for an integer point by bounded denominators walk."""
    basis = _kernel_basis(rows, ncols)
    den = 1
    for v in x_frac:
        den = den * v.denominator // _gcd(den, v.denominator)
    # Multipliers only matter modulo den; exhaustive over the small torus.
    from itertools import product as _product

    for ts in _product(range(den), repeat=len(basis)):
        cand = list(x_frac)
        for t, vec in zip(ts, basis):
            if t:
                for i in range(ncols):
                    cand[i] += t * vec[i]
        if all(v.denominator == 1 for v in cand):
            return [int(v) for v in cand]
    return None


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def periodic_domain_basis(d: HeegaardDiagram) -> list[Domain]:
    """Integer basis of the lattice of domains with vanishing vertex boundary.

    The full surface class always lies in the span.
    """
    rows = _boundary_matrix(d)
    return [Domain(tuple(v)) for v in _kernel_basis(rows, len(d.regions))]


def find_domains(
    d: HeegaardDiagram,
    x: Generator,
    y: Generator,
    max_coeff: int = 4,
    positive_only: bool = True,
) -> list[Domain]:
    """All domains connecting x to y with coefficients in the given box.

    The box is 0..max_coeff when positive_only, else -max_coeff..max_coeff.
    A particular solution plus the kernel lattice is walked exhaustively:
    the echelonized basis gives each multiplier a finite pivot-driven range,
    an over-approximation that the final membership filter tightens.
    Results are sorted lexicographically in canonical region order.
    """
    if max_coeff < 0:
        raise ValueError("max_coeff must be >= 0")
    check_generator(d, x)
    check_generator(d, y)
    nreg = len(d.regions)
    rows = _boundary_matrix(d)
    x0 = _particular_solution(rows, _target_vector(d, x, y), nreg)
    if x0 is None:
        return []
    basis = _kernel_basis(rows, nreg)
    lo = 0 if positive_only else -max_coeff
    hi = max_coeff
    pivots = [next(c for c in range(nreg) if vec[c] != 0) for vec in basis]

    results: set[tuple[int, ...]] = set()

    def rec(i: int, current: list[int]) -> None:
        if i == len(basis):
            if all(lo <= c <= hi for c in current):
                results.add(tuple(current))
            return
        vec, pc = basis[i], pivots[i]
        # Rows after i have later pivots, hence zeros at column pc, so the
        # pivot coordinate is final once t is chosen: bracketing it inside
        # the box is sound and complete.
        step = vec[pc]
        base = current[pc]
        if step > 0:
            t_min = -((base - lo) // step)
            t_max = (hi - base) // step
        else:
            t_min = -((hi - base) // -step)
            t_max = (base - lo) // -step
        for t in range(t_min, t_max + 1):
            rec(i + 1, [c + t * v for c, v in zip(current, vec)])

    rec(0, list(x0))
    doms = [Domain(c) for c in sorted(results)]
    return [a for a in doms if connects(d, a, x, y)]


def _check_domain(d: HeegaardDiagram, a: Domain) -> None:
    if len(a.coeffs) != len(d.regions):
        raise DiagramError(
            f"domain has {len(a.coeffs)} coefficients, diagram has "
            f"{len(d.regions)} regions"
        )


def _same_length(a: Domain, b: Domain) -> None:
    if len(a.coeffs) != len(b.coeffs):
        raise ValueError("domains live on different diagrams")
