"""Exact evaluation of the index quantities of a domain.

All results are ``fractions.Fraction`` values with denominators 1, 2 or 4;
no floating point enters anywhere.  The quantities:

* ``euler_measure``      e(A)  = sum of n_i (1 - c_i/4) over the regions,
* ``point_multiplicity`` n_p(A) = mean of the four quadrant coefficients,
* ``generator_multiplicity``   n_x(A) = sum over the tuple,
* ``maslov_index``       mu(A) = e + n_x + n_y,
* ``embedded_euler_char`` chi  = g - n_x - n_y + e,
* ``chi_with_double_points``   chi + 2(d_plus - d_minus),
* ``analytic_index``     g - chi(S) + 2 e(A),
* ``branch_budget``      g - chi(S)  (a g-fold cover of the disk).

Regions traced from a diagram are disks with right-angle corners, so the
Euler measure needs no obtuse-corner correction term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from hdindex.diagram import DiagramError, HeegaardDiagram
from hdindex.domains import Domain, Generator, check_generator, connects


@dataclass(frozen=True)
class IndexReport:
    """The index quantities of one (domain, generator pair) triple."""

    g: int
    e: Fraction
    n_x: Fraction
    n_y: Fraction
    mu: Fraction
    chi_emb: Fraction

    def as_dict(self) -> dict[str, str]:
        """Flat key/value record; rationals rendered p/q in lowest terms."""
        return {
            "g": str(self.g),
            "e": str(self.e),
            "n_x": str(self.n_x),
            "n_y": str(self.n_y),
            "mu": str(self.mu),
            "chi_emb": str(self.chi_emb),
        }

    def as_text(self) -> str:
        return "\n".join(f"{k} = {v}" for k, v in self.as_dict().items())


def euler_measure(d: HeegaardDiagram, a: Domain) -> Fraction:
    """e(A): each region contributes coefficient times (1 - corners/4)."""
    return sum(
        (Fraction(4 - r.corner_count, 4) * a[r.index] for r in d.regions),
        start=Fraction(0),
    )


def point_multiplicity(d: HeegaardDiagram, a: Domain, v: str) -> Fraction:
    """n_p(A): the mean of A's coefficients on the four quadrants at v."""
    quads = d.quadrants_at(v)
    return Fraction(sum(a[q.region] for q in quads), 4)


def generator_multiplicity(d: HeegaardDiagram, a: Domain, x: Generator) -> Fraction:
    """n_x(A): the sum of the point multiplicities over the tuple."""
    check_generator(d, x)
    return sum(
        (point_multiplicity(d, a, v) for v in x.points), start=Fraction(0)
    )


def maslov_index(
    d: HeegaardDiagram,
    a: Domain,
    x: Generator,
    y: Generator,
    force: bool = False,
) -> Fraction:
    """mu(A) = e(A) + n_x(A) + n_y(A).

    Rejects domains that do not connect x to y unless ``force`` is set;
    with ``force`` the same expression is evaluated off the strip classes,
    which is occasionally useful for exploration.
    """
    _require_connects(d, a, x, y, force)
    return (
        euler_measure(d, a)
        + generator_multiplicity(d, a, x)
        + generator_multiplicity(d, a, y)
    )


def embedded_euler_char(
    d: HeegaardDiagram,
    a: Domain,
    x: Generator,
    y: Generator,
    force: bool = False,
) -> Fraction:
    """chi forced on an embedded representative: g - n_x - n_y + e."""
    _require_connects(d, a, x, y, force)
    return (
        d.genus
        - generator_multiplicity(d, a, x)
        - generator_multiplicity(d, a, y)
        + euler_measure(d, a)
    )


def chi_with_double_points(
    d: HeegaardDiagram,
    a: Domain,
    x: Generator,
    y: Generator,
    d_plus: int,
    d_minus: int,
    force: bool = False,
) -> Fraction:
    """chi of a representative with signed transverse double points.

    Equals embedded_euler_char plus 2 (d_plus - d_minus).
    """
    if d_plus < 0 or d_minus < 0:
        raise ValueError("double point counts must be nonnegative")
    return embedded_euler_char(d, a, x, y, force) + 2 * (d_plus - d_minus)


def analytic_index(g: int, chi_s: Fraction | int, e: Fraction | int) -> Fraction:
    """Index of the linearized operator at a source of Euler characteristic chi_s."""
    return Fraction(g) - Fraction(chi_s) + 2 * Fraction(e)


def branch_budget(g: int, chi_s: Fraction | int) -> Fraction:
    """Branch points a g-fold cover of the disk with chi(S) = chi_s must have.

    Riemann-Hurwitz over the disk (chi = 1): returns g - chi_s.  The caller
    checks nonnegativity and integrality where those are required.
    """
    return Fraction(g) - Fraction(chi_s)


def index_report(
    d: HeegaardDiagram,
    a: Domain,
    x: Generator,
    y: Generator,
    force: bool = False,
) -> IndexReport:
    _require_connects(d, a, x, y, force)
    e = euler_measure(d, a)
    n_x = generator_multiplicity(d, a, x)
    n_y = generator_multiplicity(d, a, y)
    return IndexReport(
        g=d.genus,
        e=e,
        n_x=n_x,
        n_y=n_y,
        mu=e + n_x + n_y,
        chi_emb=d.genus - n_x - n_y + e,
    )


def _require_connects(
    d: HeegaardDiagram, a: Domain, x: Generator, y: Generator, force: bool
) -> None:
    if force:
        check_generator(d, x)
        check_generator(d, y)
        return
    if not connects(d, a, x, y):
        raise DiagramError(
            f"domain {a.format()} does not connect {x.format()} to {y.format()}"
            " (pass force=True to evaluate anyway)"
        )
