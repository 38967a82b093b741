"""System-level invariants of Pfaffian systems.

A PfaffianSystem is an ordered list of degree-1 generator forms on an
n-dimensional chart.  This module computes congruence modulo the system
(as a wedge test), Frobenius integrability, the derived system and derived
flag over the rational-function field, the characteristic data at a point,
genders in both the mod-system and the absolute convention, Darboux
classes, and flag-system detection.

Symbolic ranks are generic ranks (ranks on the dense open set where the
pivot polynomials of the elimination do not vanish); the pivots are kept
so callers can report where the rank can drop.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exactalg import (
    Matrix,
    PfaffkitError,
    Polynomial,
    Scalar,
    default_names,
    nullspace,
    pivot_polynomials,
    rank_of,
    rat,
)
from .exterior import DifferentialForm, dx, wedge_all


class DegeneratePointError(PfaffkitError):
    """The generators fail to be pointwise independent where they must be."""


class UndefinedClassError(PfaffkitError):
    """Darboux class requested where the form vanishes."""


def _as_point(point: Sequence[Scalar], nvars: int) -> tuple[Fraction, ...]:
    pt = tuple(rat(c) for c in point)
    if len(pt) != nvars:
        raise PfaffkitError(f"point of length {len(pt)} on a {nvars}-dimensional chart")
    return pt


class PfaffianSystem:
    """Ordered generators of a Pfaffian system on one chart."""

    __slots__ = ("nvars", "generators", "generic_rank", "_pivots")

    def __init__(self, nvars: int, generators: Sequence[DifferentialForm]):
        gens = tuple(generators)
        for g in gens:
            if g.degree != 1:
                raise PfaffkitError("generators must be degree-1 forms")
            if g.nvars != nvars:
                raise PfaffkitError("generator on a different chart")
        if len(gens) > nvars:
            raise PfaffkitError("more generators than chart dimensions")
        if gens:
            m = Matrix([g.coefficient_vector() for g in gens])
            rank = rank_of(m)
            pivots = pivot_polynomials(m)
        else:
            rank = 0
            pivots = []
        if rank < len(gens):
            raise PfaffkitError(
                f"generators are dependent over the function field "
                f"(generic rank {rank} < {len(gens)})")
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "generic_rank", rank)
        object.__setattr__(self, "_pivots", tuple(pivots))

    def __setattr__(self, name, value):
        raise AttributeError("PfaffianSystem is immutable")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def coefficient_matrix(self) -> Matrix:
        return Matrix([g.coefficient_vector() for g in self.generators])

    def coefficient_matrix_at(self, point: Sequence[Scalar]) -> Matrix:
        pt = _as_point(point, self.nvars)
        return Matrix([[c.evaluate(pt) for c in g.coefficient_vector()]
                       for g in self.generators])

    def rank_drop_pivots(self) -> list[Polynomial]:
        """Non-constant elimination pivots; their zero loci are the points
        where the generator matrix can lose rank."""
        return [p for p in self._pivots if isinstance(p, Polynomial) and not p.is_constant]

    def check_independent_at(self, point: Sequence[Scalar]) -> None:
        if not self.generators:
            return
        pt = _as_point(point, self.nvars)
        if rank_of(self.coefficient_matrix_at(pt)) < self.rank:
            culprit = None
            for p in self._pivots:
                if isinstance(p, Polynomial) and p.evaluate(pt) == 0:
                    culprit = p
                    break
            detail = f" (vanishing pivot: {culprit.render()})" if culprit is not None else ""
            raise DegeneratePointError(
                f"generators are dependent at {tuple(str(c) for c in pt)}{detail}")

    def generators_wedge(self) -> DifferentialForm:
        """The r-form given by wedging all generators (scalar 1 if r=0)."""
        return wedge_all(self.generators, self.nvars)

    def contains_form(self, form: DifferentialForm) -> bool:
        """Membership of a 1-form in the function-field span of the
        generators."""
        if form.degree != 1 or form.nvars != self.nvars:
            raise PfaffkitError("membership test needs a 1-form on the same chart")
        if form.is_zero:
            return True
        if not self.generators:
            return False
        rows = [g.coefficient_vector() for g in self.generators]
        stacked = Matrix(rows + [form.coefficient_vector()])
        return rank_of(stacked) == self.rank

    def same_span(self, other: PfaffianSystem) -> bool:
        if self.rank != other.rank:
            return False
        return all(self.contains_form(g) for g in other.generators)

    def render(self, names: Sequence[str] | None = None, style: str = "dx") -> list[str]:
        return [g.render(names, style) for g in self.generators]

    def __repr__(self) -> str:
        return f"PfaffianSystem(n={self.nvars}, rank={self.rank})"


@dataclass(frozen=True)
class DerivedFlag:
    """Descending derived flag [P, P1, ..., P_mu] with P_mu stable."""
    systems: tuple[PfaffianSystem, ...]
    ranks: tuple[int, ...]
    terminal_integrable: bool

    @property
    def length(self) -> int:
        return len(self.systems) - 1


@dataclass(frozen=True)
class CharacteristicData:
    """Pointwise characteristic data: covector rank of the characteristic
    system and a basis of the contravariant characteristic subspace."""
    base_point: tuple[Fraction, ...]
    covector_rank: int
    characteristic_space: tuple[tuple[Fraction, ...], ...]


def congruent_zero_mod(system: PfaffianSystem, form: DifferentialForm,
                       at: Sequence[Scalar] | None = None) -> bool:
    """Wedge test for the congruence ``form == 0`` modulo the system:
    the wedge of every generator with the form must vanish (identically,
    or at the given point)."""
    if form.nvars != system.nvars:
        raise PfaffkitError("form on a different chart")
    if at is not None:
        system.check_independent_at(at)
        total = system.generators_wedge().evaluate_at(at).wedge(form.evaluate_at(at))
    else:
        total = system.generators_wedge().wedge(form)
    return total.is_zero


def is_frobenius_integrable(system: PfaffianSystem) -> bool:
    """True when every generator's exterior derivative vanishes modulo the
    system, identically on the chart."""
    return all(congruent_zero_mod(system, g.exterior_derivative())
               for g in system.generators)


def derived_system(system: PfaffianSystem) -> PfaffianSystem:
    """Subsystem of combinations whose differentials vanish modulo the
    system, computed over the rational-function field.

    Solves the kernel of the stacked wedge-coefficient matrix: a
    coefficient vector c works exactly when the wedge of all generators
    with the 2-form sum(c_i * d(gen_i)) vanishes.  Kernel vectors are
    cleared to polynomial entries, so the returned generators again have
    polynomial coefficients.
    """
    r = system.rank
    if r == 0:
        return system
    big = system.generators_wedge()
    wedge_rows = [g.exterior_derivative().wedge(big) for g in system.generators]
    indices = sorted({idx for row in wedge_rows for idx in row.terms})
    if not indices:
        return system  # every differential already vanishes mod the system
    columns = [[row.coefficient(idx) for idx in indices] for row in wedge_rows]
    m = Matrix([[columns[i][j] for i in range(r)] for j in range(len(indices))])
    kernel = nullspace(m)
    new_gens: list[DifferentialForm] = []
    for coeffs in kernel:
        form = DifferentialForm.zero(system.nvars, 1)
        for c, g in zip(coeffs, system.generators):
            form = form + g * c
        new_gens.append(form)
    return PfaffianSystem(system.nvars, new_gens)


def derived_flag(system: PfaffianSystem) -> DerivedFlag:
    """Iterate the derived system until the rank stabilizes; the terminal
    entry equals its own derived system and is integrable or zero."""
    systems = [system]
    ranks = [system.rank]
    while True:
        nxt = derived_system(systems[-1])
        if nxt.rank == systems[-1].rank:
            break
        systems.append(nxt)
        ranks.append(nxt.rank)
    terminal = systems[-1]
    return DerivedFlag(tuple(systems), tuple(ranks),
                       terminal_integrable=is_frobenius_integrable(terminal))


def is_flag_system(system: PfaffianSystem) -> bool:
    """True when the derived-flag ranks descend by exactly one each step,
    down to zero or to an integrable terminal.  Integrable systems are
    trivially flags (flag of length zero)."""
    flag = derived_flag(system)
    return all(a - b == 1 for a, b in zip(flag.ranks, flag.ranks[1:]))


def annihilator_basis_at(system: PfaffianSystem, point: Sequence[Scalar]) -> list[tuple[Fraction, ...]]:
    """Deterministic basis of the tangent subspace annihilated by the
    generators at the point (reduced-echelon kernel pattern)."""
    pt = _as_point(point, system.nvars)
    system.check_independent_at(pt)
    if not system.generators:
        basis = []
        for i in range(system.nvars):
            v = [Fraction(0)] * system.nvars
            v[i] = Fraction(1)
            basis.append(tuple(v))
        return basis
    return [tuple(v) for v in nullspace(system.coefficient_matrix_at(pt))]


def restricted_skew_forms(system: PfaffianSystem, point: Sequence[Scalar],
                          basis: Sequence[Sequence[Fraction]]) -> list[list[list[Fraction]]]:
    """Matrices of the generator differentials at the point, restricted to
    the given basis of the annihilator."""
    pt = _as_point(point, system.nvars)
    out = []
    for g in system.generators:
        dg = g.exterior_derivative().evaluate_at(pt)
        m = [[dg.evaluate_on_vectors([v, w]) for w in basis] for v in basis]
        out.append(m)
    return out


def characteristic_data_at(system: PfaffianSystem, point: Sequence[Scalar]) -> CharacteristicData:
    """Pointwise characteristic system data.

    The covector span is generated by the generator values together with
    all interior products of annihilator vectors into the generator
    differentials.  The contravariant characteristic space is computed
    independently as the joint radical of the restricted differentials,
    and the two are checked to annihilate each other exactly.
    """
    pt = _as_point(point, system.nvars)
    basis = annihilator_basis_at(system, pt)
    covectors: list[list[Fraction]] = []
    for g in system.generators:
        covectors.append([c.evaluate(pt) for c in g.coefficient_vector()])
    for g in system.generators:
        dg = g.exterior_derivative().evaluate_at(pt)
        for v in basis:
            contracted = dg.interior_product(list(v))
            covectors.append([c.constant_value() for c in contracted.coefficient_vector()])
    covector_rank = rank_of(Matrix(covectors)) if covectors else 0

    skews = restricted_skew_forms(system, pt, basis)
    m = len(basis)
    rows: list[list[Fraction]] = []
    for B in skews:
        for a in range(m):
            rows.append([B[a][b] for b in range(m)])
    radical = nullspace(Matrix(rows)) if rows else [
        [Fraction(1) if i == j else Fraction(0) for j in range(m)] for i in range(m)]
    char_vectors = []
    for coords in radical:
        ambient = [Fraction(0)] * system.nvars
        for c, v in zip(coords, basis):
            for i in range(system.nvars):
                ambient[i] += c * v[i]
        char_vectors.append(tuple(ambient))
    # mutual annihilation check
    for vec in char_vectors:
        for cov in covectors:
            assert sum(a * b for a, b in zip(cov, vec)) == 0, \
                "characteristic vector not annihilated by the covector span"
    assert covector_rank + len(char_vectors) == system.nvars, \
        "characteristic rank and space dimension do not complement"
    return CharacteristicData(pt, covector_rank, tuple(char_vectors))


def gender_of_form_at(system: PfaffianSystem, form: DifferentialForm,
                      point: Sequence[Scalar], mod_system: bool = True) -> int:
    """Smallest h such that the (h+1)-st wedge power of the form vanishes
    at the point, either modulo the system (wedged with all generators) or
    absolutely."""
    pt = _as_point(point, system.nvars)
    system.check_independent_at(pt)
    value = form.evaluate_at(pt)
    if value.is_zero:
        return 0
    gens = system.generators_wedge().evaluate_at(pt) if mod_system else None
    h = 0
    power = value
    while True:
        test = gens.wedge(power) if mod_system else power
        if test.is_zero:
            return h
        h += 1
        power = power.wedge(value)
        if power.degree > system.nvars and not power.is_zero:
            raise AssertionError("wedge power failed to terminate")


def system_gender_at(system: PfaffianSystem, point: Sequence[Scalar],
                     mod_system: bool = True, sample_sections: int = 0,
                     sample_seed: int = 0) -> int:
    """Gender of the generator differential family at the point.

    This takes the fixed generator family.  With ``sample_sections`` > 0 an
    exploratory mode also samples that many random polynomial-coefficient
    sections and takes the maximum over their differentials (deterministic
    for a fixed seed).
    """
    pt = _as_point(point, system.nvars)
    best = 0
    for g in system.generators:
        best = max(best, gender_of_form_at(system, g.exterior_derivative(), pt, mod_system))
    if sample_sections > 0 and system.generators:
        rng = random.Random(sample_seed)
        n = system.nvars
        for _ in range(sample_sections):
            section = DifferentialForm.zero(n, 1)
            for g in system.generators:
                coeff = Polynomial.constant(n, rng.randint(-2, 2))
                for v in range(n):
                    if rng.random() < 0.3:
                        coeff = coeff + Polynomial.variable(n, v) * rng.randint(-2, 2)
                section = section + g * coeff
            if not section.evaluate_at(pt).is_zero:
                best = max(best, gender_of_form_at(
                    system, section.exterior_derivative(), pt, mod_system))
    return best


def darboux_class_at(form: DifferentialForm, point: Sequence[Scalar]) -> int:
    """Darboux class of a 1-form at a point: with h the largest power for
    which (d form)^h is nonzero there, the class is 2h+1 when
    form ^ (d form)^h is also nonzero, else 2h."""
    if form.degree != 1:
        raise PfaffkitError("Darboux class is defined for 1-forms")
    pt = _as_point(point, form.nvars)
    value = form.evaluate_at(pt)
    if value.is_zero:
        raise UndefinedClassError(
            f"form vanishes at {tuple(str(c) for c in pt)}; class undefined")
    d_value = form.exterior_derivative().evaluate_at(pt)
    h = 0
    power = DifferentialForm.scalar(form.nvars, 1)
    while True:
        nxt = power.wedge(d_value)
        if nxt.is_zero:
            break
        power = nxt
        h += 1
    if not value.wedge(power).is_zero:
        return 2 * h + 1
    return 2 * h


def darboux_model(rank: int, gender: int, extra: int = 0) -> PfaffianSystem:
    """Model system {dy1, ..., dy^(r-1), dz^(h+1) + sum p^i dz^i} on the
    chart (y1..y^(r-1), z1..z^(h+1), p1..p^h, w1..w^extra)."""
    if rank < 1 or gender < 1:
        raise PfaffkitError("model needs rank >= 1 and gender >= 1")
    n = (rank - 1) + (2 * gender + 1) + extra
    z0 = rank - 1
    p0 = z0 + gender + 1
    gens = [dx(n, i) for i in range(rank - 1)]
    last = dx(n, z0 + gender)
    for i in range(gender):
        last = last + Polynomial.variable(n, p0 + i) * dx(n, z0 + i)
    gens.append(last)
    return PfaffianSystem(n, gens)


def darboux_model_names(rank: int, gender: int, extra: int = 0) -> tuple[str, ...]:
    names = [f"y{i + 1}" for i in range(rank - 1)]
    names += [f"z{i + 1}" for i in range(gender + 1)]
    names += [f"p{i + 1}" for i in range(gender)]
    names += [f"w{i + 1}" for i in range(extra)]
    return tuple(names)
