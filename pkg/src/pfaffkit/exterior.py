"""Exterior algebra of differential forms with polynomial coefficients.

A degree-k form on an n-dimensional chart is a map from strictly
increasing k-tuples of coordinate indices to nonzero polynomial
coefficients.  Wedge monomials are normalized by sorting indices with the
permutation sign, and the interior product contracts the first slot.
Forms are immutable; all operations return new values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .exactalg import (
    DimensionMismatchError,
    PfaffkitError,
    Polynomial,
    Scalar,
    default_names,
    rat,
)


class DegreeError(PfaffkitError):
    """Operation applied to a form of unsuitable degree."""


def sort_index_tuple(indices: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Sort coordinate indices, returning (sorted tuple, permutation sign);
    sign is 0 when an index repeats."""
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return tuple(idx), 0
    return tuple(idx), sign


class DifferentialForm:
    """Degree-homogeneous exterior form with Polynomial coefficients."""

    __slots__ = ("nvars", "degree", "terms")

    def __init__(self, nvars: int, degree: int,
                 terms: Mapping[tuple[int, ...], Polynomial | Scalar] | None = None):
        if degree < 0:
            raise DegreeError("form degree must be nonnegative")
        clean: dict[tuple[int, ...], Polynomial] = {}
        if terms:
            for idx, coeff in terms.items():
                idx = tuple(idx)
                if len(idx) != degree:
                    raise DegreeError(f"index {idx} does not match degree {degree}")
                if any(not 0 <= i < nvars for i in idx):
                    raise DimensionMismatchError(f"index {idx} out of range for {nvars} coordinates")
                if any(a >= b for a, b in zip(idx, idx[1:])):
                    raise ValueError(f"index {idx} is not strictly increasing")
                if not isinstance(coeff, Polynomial):
                    coeff = Polynomial.constant(nvars, coeff)
                if coeff.nvars != nvars:
                    raise DimensionMismatchError("coefficient on a different chart")
                if not coeff.is_zero:
                    acc = clean.get(idx)
                    coeff = coeff if acc is None else acc + coeff
                    if coeff.is_zero:
                        clean.pop(idx, None)
                    else:
                        clean[idx] = coeff
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("DifferentialForm is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(nvars: int, degree: int) -> DifferentialForm:
        return DifferentialForm(nvars, degree)

    @staticmethod
    def scalar(nvars: int, value: Polynomial | Scalar) -> DifferentialForm:
        """Degree-0 form (a function)."""
        return DifferentialForm(nvars, 0, {(): value})

    @staticmethod
    def one_form(nvars: int, coeffs: Sequence[Polynomial | Scalar]) -> DifferentialForm:
        if len(coeffs) != nvars:
            raise DimensionMismatchError("coefficient vector length mismatch")
        return DifferentialForm(nvars, 1, {(i,): c for i, c in enumerate(coeffs)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, indices: Sequence[int]) -> Polynomial:
        return self.terms.get(tuple(indices), Polynomial.zero(self.nvars))

    def coefficient_vector(self) -> list[Polynomial]:
        """For a 1-form: the length-n list of coefficients."""
        if self.degree != 1:
            raise DegreeError("coefficient_vector is only defined for 1-forms")
        return [self.coefficient((i,)) for i in range(self.nvars)]

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Polynomial]]:
        return sorted(self.terms.items())

    # -- linear structure ---------------------------------------------------

    def _check(self, other: DifferentialForm) -> None:
        if self.nvars != other.nvars:
            raise DimensionMismatchError("forms on charts of different dimension")
        if self.degree != other.degree:
            raise DegreeError("sum of forms of different degree")

    def __add__(self, other: DifferentialForm) -> DifferentialForm:
        self._check(other)
        terms = dict(self.terms)
        for idx, c in other.terms.items():
            s = terms.get(idx)
            s = c if s is None else s + c
            if s.is_zero:
                terms.pop(idx, None)
            else:
                terms[idx] = s
        return DifferentialForm(self.nvars, self.degree, terms)

    def __neg__(self) -> DifferentialForm:
        return DifferentialForm(self.nvars, self.degree,
                                {i: -c for i, c in self.terms.items()})

    def __sub__(self, other: DifferentialForm) -> DifferentialForm:
        return self + (-other)

    def __mul__(self, scalar: Polynomial | Scalar) -> DifferentialForm:
        if isinstance(scalar, DifferentialForm):
            raise TypeError("use wedge() for products of forms")
        if not isinstance(scalar, Polynomial):
            scalar = Polynomial.constant(self.nvars, scalar)
        return DifferentialForm(self.nvars, self.degree,
                                {i: c * scalar for i, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, DifferentialForm)
                and self.nvars == other.nvars
                and self.degree == other.degree
                and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((self.nvars, self.degree, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return not self.is_zero

    # -- exterior operations ------------------------------------------------

    def wedge(self, other: DifferentialForm) -> DifferentialForm:
        if self.nvars != other.nvars:
            raise DimensionMismatchError("wedge of forms on different charts")
        degree = self.degree + other.degree
        if degree > self.nvars:
            return DifferentialForm.zero(self.nvars, degree)
        terms: dict[tuple[int, ...], Polynomial] = {}
        for i1, c1 in self.terms.items():
            for i2, c2 in other.terms.items():
                idx, sign = sort_index_tuple(i1 + i2)
                if sign == 0:
                    continue
                c = c1 * c2 * sign
                acc = terms.get(idx)
                c = c if acc is None else acc + c
                if c.is_zero:
                    terms.pop(idx, None)
                else:
                    terms[idx] = c
        return DifferentialForm(self.nvars, degree, terms)

    def wedge_power(self, exponent: int) -> DifferentialForm:
        """Wedge product of the form with itself ``exponent`` times."""
        if exponent < 1:
            raise DegreeError("wedge_power needs a positive exponent")
        out = self
        for _ in range(exponent - 1):
            out = out.wedge(self)
        return out

    def exterior_derivative(self) -> DifferentialForm:
        terms: dict[tuple[int, ...], Polynomial] = {}
        for idx, coeff in self.terms.items():
            for i in range(self.nvars):
                dc = coeff.partial_derivative(i)
                if dc.is_zero:
                    continue
                new_idx, sign = sort_index_tuple((i,) + idx)
                if sign == 0:
                    continue
                c = dc * sign
                acc = terms.get(new_idx)
                c = c if acc is None else acc + c
                if c.is_zero:
                    terms.pop(new_idx, None)
                else:
                    terms[new_idx] = c
        return DifferentialForm(self.nvars, self.degree + 1, terms)

    def interior_product(self, vector: Sequence[Polynomial | Scalar]) -> DifferentialForm:
        """Contraction i(v) in the first slot; v may have polynomial
        components so characteristic generators can be formed symbolically."""
        if self.degree == 0:
            raise DegreeError("interior product of a degree-0 form")
        if len(vector) != self.nvars:
            raise DimensionMismatchError("vector length does not match the chart")
        comps = [c if isinstance(c, Polynomial) else Polynomial.constant(self.nvars, c)
                 for c in vector]
        terms: dict[tuple[int, ...], Polynomial] = {}
        for idx, coeff in self.terms.items():
            for pos, i in enumerate(idx):
                vc = comps[i]
                if vc.is_zero:
                    continue
                rest = idx[:pos] + idx[pos + 1:]
                c = coeff * vc * ((-1) ** pos)
                acc = terms.get(rest)
                c = c if acc is None else acc + c
                if c.is_zero:
                    terms.pop(rest, None)
                else:
                    terms[rest] = c
        return DifferentialForm(self.nvars, self.degree - 1, terms)

    def evaluate_at(self, point: Sequence[Scalar]) -> DifferentialForm:
        """Evaluate all coefficients at a rational point; the result has
        constant coefficients on the same chart."""
        if len(point) != self.nvars:
            raise DimensionMismatchError("point length does not match the chart")
        terms = {idx: Polynomial.constant(self.nvars, c.evaluate(point))
                 for idx, c in self.terms.items()}
        return DifferentialForm(self.nvars, self.degree, terms)

    def evaluate_on_vectors(self, vectors: Sequence[Sequence[Scalar]]) -> Fraction:
        """Value of a constant-coefficient k-form on k rational vectors."""
        if len(vectors) != self.degree:
            raise DegreeError(f"need {self.degree} vectors, got {len(vectors)}")
        vecs = [[rat(c) for c in v] for v in vectors]
        total = Fraction(0)
        for idx, coeff in self.terms.items():
            total += coeff.constant_value() * _det([[v[i] for i in idx] for v in vecs])
        return total

    # -- rendering ------------------------------------------------------------

    def render(self, names: Sequence[str] | None = None, style: str = "dx") -> str:
        """Canonical text form.

        ``style="dx"`` gives the compact notation ``dx1 + x4*dx5``;
        ``style="d()"`` gives the input-language notation
        ``d(x1) + x4*d(x5)``.
        """
        if self.is_zero:
            return "0"
        names = names or default_names(self.nvars)
        if style == "dx":
            base = [f"d{names[i]}" for i in range(self.nvars)]
            joiner = "^"
        else:
            base = [f"d({names[i]})" for i in range(self.nvars)]
            joiner = "^"
        pieces: list[str] = []
        for idx, coeff in self.sorted_terms():
            mono = joiner.join(base[i] for i in idx) if idx else ""
            text = coeff.render(names)
            negate = False
            if len(coeff.terms) == 1:
                lead = next(iter(coeff.terms.values()))
                if lead < 0:
                    negate = True
                    text = (-coeff).render(names)
                body_coeff = text
                if mono:
                    if body_coeff == "1":
                        body = mono
                    else:
                        body = f"{body_coeff}*{mono}"
                else:
                    body = body_coeff
            else:
                body = f"({text})*{mono}" if mono else f"({text})"
            if not pieces:
                pieces.append(f"-{body}" if negate else body)
            else:
                pieces.append(f"- {body}" if negate else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"DifferentialForm({self.render()})"


def _det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    if n == 0:
        return Fraction(1)
    work = [row[:] for row in rows]
    det = Fraction(1)
    for c in range(n):
        piv = None
        for r in range(c, n):
            if work[r][c]:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            det = -det
        det *= work[c][c]
        inv = 1 / work[c][c]
        for r in range(c + 1, n):
            if work[r][c]:
                f = work[r][c] * inv
                for k in range(c, n):
                    work[r][k] -= f * work[c][k]
    return det


# -- module-level conveniences -------------------------------------------------

def dx(nvars: int, index: int) -> DifferentialForm:
    """The coordinate 1-form dx_index."""
    return DifferentialForm(nvars, 1, {(index,): Polynomial.one(nvars)})


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    return a.wedge(b)


def wedge_all(forms: Sequence[DifferentialForm], nvars: int) -> DifferentialForm:
    """Wedge of a list of forms; the empty product is the scalar 1."""
    out = DifferentialForm.scalar(nvars, 1)
    for f in forms:
        out = out.wedge(f)
    return out


def exterior_derivative(a: DifferentialForm) -> DifferentialForm:
    return a.exterior_derivative()


def interior_product(vector: Sequence[Polynomial | Scalar], a: DifferentialForm) -> DifferentialForm:
    return a.interior_product(vector)


def evaluate_at(a: DifferentialForm, point: Sequence[Scalar]) -> DifferentialForm:
    return a.evaluate_at(point)
