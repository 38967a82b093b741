"""Exact rational scalars, sparse multivariate polynomials, rational
functions, and linear algebra over both fields.

Everything here is exact: scalars are `fractions.Fraction`, polynomials are
sparse exponent-vector maps with Fraction coefficients, and elimination is
fraction-free (Bareiss) so that polynomial matrices never leave the
polynomial ring mid-computation.  All values are immutable after
construction and all operations are pure, so they are safe to share across
threads.

Term order is graded lexicographic throughout; it fixes leading terms,
normalization signs and rendering order, which is what makes reports
byte-reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence, Union

Rational = Fraction

Scalar = Union[int, Fraction]


class PfaffkitError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(PfaffkitError):
    """Operands live on charts of different dimension."""


class ExactDivisionError(PfaffkitError):
    """A division that was required to be exact is not."""


def rat(value: Scalar | str) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def _is_scalar(value) -> bool:
    return isinstance(value, (int, Fraction))


def grlex_key(expo: tuple[int, ...]) -> tuple:
    return (sum(expo), expo)


def default_names(nvars: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(nvars))


class Polynomial:
    """Sparse multivariate polynomial over the rationals.

    Terms are stored as a map from exponent vectors (tuples of length
    ``nvars``) to nonzero Fraction coefficients.  Instances are treated as
    immutable; no method mutates ``self``.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], Scalar] | None = None):
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for expo, coeff in terms.items():
                expo = tuple(expo)
                if len(expo) != nvars:
                    raise DimensionMismatchError(
                        f"exponent vector {expo} does not have length {nvars}")
                if any(e < 0 for e in expo):
                    raise ValueError(f"negative exponent in {expo}")
                c = rat(coeff)
                if c:
                    acc = clean.get(expo)
                    c = c if acc is None else acc + c
                    if c:
                        clean[expo] = c
                    elif expo in clean:
                        del clean[expo]
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(nvars: int, value: Scalar) -> Polynomial:
        return Polynomial(nvars, {(0,) * nvars: rat(value)})

    @staticmethod
    def zero(nvars: int) -> Polynomial:
        return Polynomial(nvars)

    @staticmethod
    def one(nvars: int) -> Polynomial:
        return Polynomial.constant(nvars, 1)

    @staticmethod
    def variable(nvars: int, index: int) -> Polynomial:
        if not 0 <= index < nvars:
            raise DimensionMismatchError(f"variable index {index} out of range for {nvars} variables")
        expo = tuple(1 if i == index else 0 for i in range(nvars))
        return Polynomial(nvars, {expo: Fraction(1)})

    # -- basic queries -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self.is_zero:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, index: int) -> int:
        if self.is_zero:
            return -1
        return max(e[index] for e in self.terms)

    def variables_used(self) -> tuple[int, ...]:
        used = set()
        for expo in self.terms:
            for i, e in enumerate(expo):
                if e:
                    used.add(i)
        return tuple(sorted(used))

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in descending graded-lex order (leading term first)."""
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def leading_term(self) -> tuple[tuple[int, ...], Fraction]:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        expo = max(self.terms, key=grlex_key)
        return expo, self.terms[expo]

    # -- arithmetic --------------------------------------------------------

    def _check_same_chart(self, other: Polynomial) -> None:
        if self.nvars != other.nvars:
            raise DimensionMismatchError(
                f"polynomials on charts of dimension {self.nvars} and {other.nvars}")

    def __add__(self, other: Polynomial | Scalar) -> Polynomial:
        if not isinstance(other, Polynomial):
            if not _is_scalar(other):
                return NotImplemented
            other = Polynomial.constant(self.nvars, other)
        self._check_same_chart(other)
        terms = dict(self.terms)
        for expo, coeff in other.terms.items():
            c = terms.get(expo, Fraction(0)) + coeff
            if c:
                terms[expo] = c
            elif expo in terms:
                del terms[expo]
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Polynomial | Scalar) -> Polynomial:
        if not isinstance(other, Polynomial):
            if not _is_scalar(other):
                return NotImplemented
            other = Polynomial.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> Polynomial:
        return (-self) + other

    def __mul__(self, other: Polynomial | Scalar) -> Polynomial:
        if not isinstance(other, Polynomial):
            if not _is_scalar(other):
                return NotImplemented
            c = rat(other)
            if not c:
                return Polynomial.zero(self.nvars)
            return Polynomial(self.nvars, {e: k * c for e, k in self.terms.items()})
        self._check_same_chart(other)
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                c = terms.get(expo, Fraction(0)) + c1 * c2
                if c:
                    terms[expo] = c
                elif expo in terms:
                    del terms[expo]
        return Polynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> Polynomial:
        if exponent < 0:
            raise ValueError("negative power of a polynomial")
        result = Polynomial.one(self.nvars)
        base = self
        n = exponent
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other: Polynomial | Scalar) -> Polynomial:
        """Exact division; raises ExactDivisionError if the quotient is
        not a polynomial."""
        if not isinstance(other, Polynomial):
            c = rat(other)
            if not c:
                raise ZeroDivisionError("polynomial division by zero")
            return self * (1 / c)
        self._check_same_chart(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_constant:
            return self * (1 / other.constant_value())
        quotient = Polynomial.zero(self.nvars)
        rem = self
        div_expo, div_coeff = other.leading_term()
        while not rem.is_zero:
            rem_expo, rem_coeff = rem.leading_term()
            t_expo = tuple(a - b for a, b in zip(rem_expo, div_expo))
            if any(e < 0 for e in t_expo):
                raise ExactDivisionError(f"{other} does not divide {self} exactly")
            t = Polynomial(self.nvars, {t_expo: rem_coeff / div_coeff})
            quotient = quotient + t
            rem = rem - t * other
        return quotient

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return not self.is_zero

    # -- calculus & evaluation --------------------------------------------

    def partial_derivative(self, index: int) -> Polynomial:
        if not 0 <= index < self.nvars:
            raise DimensionMismatchError(f"derivative index {index} out of range")
        terms: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in self.terms.items():
            e = expo[index]
            if e == 0:
                continue
            new = list(expo)
            new[index] = e - 1
            terms[tuple(new)] = coeff * e
        return Polynomial(self.nvars, terms)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.nvars:
            raise DimensionMismatchError(
                f"point of length {len(point)} on a {self.nvars}-dimensional chart")
        pt = [rat(c) for c in point]
        total = Fraction(0)
        for expo, coeff in self.terms.items():
            value = coeff
            for c, e in zip(pt, expo):
                if e:
                    value *= c ** e
            total += value
        return total

    def substitute(self, assignments: Mapping[int, Scalar]) -> Polynomial:
        """Substitute constants for the given variables (same chart)."""
        result: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in self.terms.items():
            value = coeff
            new = list(expo)
            for idx, const in assignments.items():
                e = expo[idx]
                if e:
                    value *= rat(const) ** e
                new[idx] = 0
            if value:
                key = tuple(new)
                acc = result.get(key, Fraction(0)) + value
                if acc:
                    result[key] = acc
                elif key in result:
                    del result[key]
        return Polynomial(self.nvars, result)

    def reindex(self, index_map: Mapping[int, int], new_nvars: int) -> Polynomial:
        """Move the polynomial to a chart with ``new_nvars`` coordinates.

        ``index_map`` sends old variable indices to new ones; any variable
        actually used must be mapped.
        """
        terms: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in self.terms.items():
            new = [0] * new_nvars
            for i, e in enumerate(expo):
                if not e:
                    continue
                if i not in index_map:
                    raise DimensionMismatchError(
                        f"variable {i} is used but not mapped to the new chart")
                new[index_map[i]] += e
            terms[tuple(new)] = coeff
        return Polynomial(new_nvars, terms)

    # -- rendering ---------------------------------------------------------

    def render(self, names: Sequence[str] | None = None) -> str:
        if self.is_zero:
            return "0"
        names = names or default_names(self.nvars)
        pieces: list[str] = []
        for expo, coeff in self.sorted_terms():
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}"
                for i, e in enumerate(expo) if e)
            mag = abs(coeff)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            if not pieces:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f"- {body}" if coeff < 0 else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({self.render()})"


# -- polynomial gcd ---------------------------------------------------------

def _integer_normalize(p: Polynomial) -> Polynomial:
    """Scale so coefficients are coprime integers and the graded-lex
    leading coefficient is positive."""
    if p.is_zero:
        return p
    denom_lcm = 1
    for c in p.terms.values():
        denom_lcm = denom_lcm * c.denominator // _gcd_int(denom_lcm, c.denominator)
    scaled = {e: c * denom_lcm for e, c in p.terms.items()}
    num_gcd = 0
    for c in scaled.values():
        num_gcd = _gcd_int(num_gcd, abs(c.numerator))
    lead = scaled[max(scaled, key=grlex_key)]
    sign = -1 if lead < 0 else 1
    return Polynomial(p.nvars, {e: c / (sign * num_gcd) for e, c in scaled.items()})


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _as_univariate(p: Polynomial, main: int) -> dict[int, Polynomial]:
    """View p as a univariate polynomial in variable ``main`` whose
    coefficients are polynomials with that variable zeroed out."""
    coeffs: dict[int, dict[tuple[int, ...], Fraction]] = {}
    for expo, coeff in p.terms.items():
        d = expo[main]
        reduced = list(expo)
        reduced[main] = 0
        coeffs.setdefault(d, {})[tuple(reduced)] = coeff
    return {d: Polynomial(p.nvars, t) for d, t in coeffs.items()}


def _from_univariate(coeffs: Mapping[int, Polynomial], main: int, nvars: int) -> Polynomial:
    terms: dict[tuple[int, ...], Fraction] = {}
    for d, poly in coeffs.items():
        for expo, coeff in poly.terms.items():
            new = list(expo)
            new[main] += d
            terms[tuple(new)] = coeff
    return Polynomial(nvars, terms)


def _uni_degree(coeffs: Mapping[int, Polynomial]) -> int:
    return max((d for d, c in coeffs.items() if not c.is_zero), default=-1)


def _uni_mul_poly(coeffs: dict[int, Polynomial], p: Polynomial) -> dict[int, Polynomial]:
    return {d: c * p for d, c in coeffs.items()}


def _uni_sub(a: dict[int, Polynomial], b: dict[int, Polynomial], nvars: int) -> dict[int, Polynomial]:
    out = dict(a)
    for d, c in b.items():
        out[d] = out.get(d, Polynomial.zero(nvars)) - c
    return {d: c for d, c in out.items() if not c.is_zero}


def _uni_shift(coeffs: dict[int, Polynomial], k: int) -> dict[int, Polynomial]:
    return {d + k: c for d, c in coeffs.items()}


def _pseudo_rem(a: dict[int, Polynomial], b: dict[int, Polynomial], nvars: int) -> dict[int, Polynomial]:
    """Pseudo-remainder of univariate polynomials over a polynomial ring."""
    da, db = _uni_degree(a), _uni_degree(b)
    lead_b = b[db]
    rem = dict(a)
    while True:
        dr = _uni_degree(rem)
        if dr < db:
            return rem
        lead_r = rem[dr]
        rem = _uni_sub(_uni_mul_poly(rem, lead_b), _uni_shift(_uni_mul_poly(b, lead_r), dr - db), nvars)


def _content(coeffs: dict[int, Polynomial], nvars: int) -> Polynomial:
    g = Polynomial.zero(nvars)
    for d in sorted(coeffs):
        g = poly_gcd(g, coeffs[d])
        if g.is_constant and not g.is_zero:
            break
    return g


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Gcd in Q[x1..xn], normalized to coprime integer coefficients with
    positive graded-lex leading coefficient.  Primitive pseudo-remainder
    sequence; fine at the small sizes this package deals with."""
    if a.nvars != b.nvars:
        raise DimensionMismatchError("gcd of polynomials on different charts")
    nvars = a.nvars
    if a.is_zero:
        return _integer_normalize(b)
    if b.is_zero:
        return _integer_normalize(a)
    if a.is_constant or b.is_constant:
        return Polynomial.one(nvars)
    used = sorted(set(a.variables_used()) | set(b.variables_used()))
    main = used[0]
    ua, ub = _as_univariate(a, main), _as_univariate(b, main)
    if _uni_degree(ua) < _uni_degree(ub):
        ua, ub = ub, ua
    cont_a, cont_b = _content(ua, nvars), _content(ub, nvars)
    cont = poly_gcd(cont_a, cont_b)
    pa = {d: c / cont_a for d, c in ua.items()}
    pb = {d: c / cont_b for d, c in ub.items()}
    while True:
        rem = _pseudo_rem(pa, pb, nvars)
        if not rem:
            break
        if _uni_degree(rem) == 0:
            pb = {0: Polynomial.one(nvars)}
            break
        rem_cont = _content(rem, nvars)
        pa, pb = pb, {d: c / rem_cont for d, c in rem.items()}
    result = _from_univariate(pb, main, nvars) * cont
    return _integer_normalize(result)


def poly_lcm(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero or b.is_zero:
        return Polynomial.zero(a.nvars)
    return _integer_normalize((a * b) / poly_gcd(a, b))


class RationalFunction:
    """Element of the fraction field of Q[x1..xn].

    Normalized so numerator and denominator have no common factor and the
    denominator has coprime integer coefficients with positive graded-lex
    leading coefficient.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.one(num.nvars)
        if num.nvars != den.nvars:
            raise DimensionMismatchError("numerator and denominator on different charts")
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero:
            den = Polynomial.one(num.nvars)
        else:
            g = poly_gcd(num, den)
            if not (g.is_constant and g.constant_value() == 1):
                num, den = num / g, den / g
            normal_den = _integer_normalize(den)
            # division of den by its normalized form is a rational scale
            scale = den.leading_term()[1] / normal_den.leading_term()[1]
            num, den = num / scale, normal_den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @staticmethod
    def from_scalar(nvars: int, value: Scalar) -> RationalFunction:
        return RationalFunction(Polynomial.constant(nvars, value))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self) -> bool:
        return not self.is_zero

    def _coerce(self, other) -> RationalFunction | None:
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if _is_scalar(other):
            return RationalFunction.from_scalar(self.nvars, other)
        return None

    def __add__(self, other) -> RationalFunction:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> RationalFunction:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> RationalFunction:
        return (-self) + other

    def __mul__(self, other) -> RationalFunction:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RationalFunction:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other) -> RationalFunction:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, Polynomial)):
            other = self._coerce(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def render(self, names: Sequence[str] | None = None) -> str:
        if self.den == Polynomial.one(self.nvars):
            return self.num.render(names)
        return f"({self.num.render(names)}) / ({self.den.render(names)})"

    def __repr__(self) -> str:
        return f"RationalFunction({self.render()})"


# -- matrices ----------------------------------------------------------------

class Matrix:
    """Immutable rectangular matrix over Fraction, Polynomial or
    RationalFunction entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        grid = tuple(tuple(row) for row in entries)
        rows = len(grid)
        cols = len(grid[0]) if rows else 0
        if any(len(row) != cols for row in grid):
            raise DimensionMismatchError("ragged matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", grid)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    def __getitem__(self, pair):
        i, j = pair
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.entries == other.entries

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"


RationalMatrix = Matrix
FunctionMatrix = Matrix


def _is_polynomial_matrix(m: Matrix) -> bool:
    return any(isinstance(e, Polynomial) for row in m.entries for e in row)


def _is_function_matrix(m: Matrix) -> bool:
    return any(isinstance(e, RationalFunction) for row in m.entries for e in row)


def _clear_function_rows(m: Matrix) -> list[list[Polynomial]]:
    """Scale each row by the lcm of its denominators; spans are unchanged."""
    nvars = None
    for row in m.entries:
        for e in row:
            if isinstance(e, (RationalFunction, Polynomial)):
                nvars = e.nvars
                break
        if nvars is not None:
            break
    if nvars is None:
        raise ValueError("cannot infer chart dimension from a scalar matrix")
    out: list[list[Polynomial]] = []
    for row in m.entries:
        frs = []
        for e in row:
            if isinstance(e, RationalFunction):
                frs.append(e)
            elif isinstance(e, Polynomial):
                frs.append(RationalFunction(e))
            else:
                frs.append(RationalFunction.from_scalar(nvars, e))
        common = Polynomial.one(nvars)
        for f in frs:
            common = poly_lcm(common, f.den)
        out.append([f.num * (common / f.den) for f in frs])
    return out


def bareiss_echelon(rows: list[list], steps_out: list | None = None):
    """Fraction-free Bareiss elimination to row echelon form.

    Works over any integral domain whose elements support ``*``, ``-``,
    truth testing and exact ``/``.  Returns (echelon rows, pivot column
    list, pivot value list).  If ``steps_out`` is a list, a snapshot of the
    working matrix is appended after every elimination step, which lets
    tests check the fraction-free property directly.
    """
    work = [list(row) for row in rows]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    pivot_cols: list[int] = []
    pivot_vals: list = []
    prev_pivot = None
    pr = 0
    for pc in range(ncols):
        found = None
        for i in range(pr, nrows):
            if work[i][pc]:
                found = i
                break
        if found is None:
            continue
        if found != pr:
            work[pr], work[found] = work[found], work[pr]
        pivot = work[pr][pc]
        for i in range(pr + 1, nrows):
            for j in range(pc + 1, ncols):
                value = pivot * work[i][j] - work[i][pc] * work[pr][j]
                if prev_pivot is not None:
                    value = value / prev_pivot
                work[i][j] = value
            work[i][pc] = work[i][pc] - work[i][pc]  # exact zero of the domain
        if steps_out is not None:
            steps_out.append([row[:] for row in work])
        pivot_cols.append(pc)
        pivot_vals.append(pivot)
        prev_pivot = pivot
        pr += 1
        if pr == nrows:
            break
    return work, pivot_cols, pivot_vals


def rank_of(m: Matrix) -> int:
    """Exact rank; for polynomial or rational-function entries this is the
    generic rank (rank on the dense open set where pivots do not vanish)."""
    if _is_function_matrix(m):
        rows = _clear_function_rows(m)
    elif _is_polynomial_matrix(m):
        rows = [list(r) for r in m.entries]
    else:
        rows = [[rat(e) for e in r] for r in m.entries]
    _, pivot_cols, _ = bareiss_echelon(rows)
    return len(pivot_cols)


def pivot_polynomials(m: Matrix) -> list[Polynomial]:
    """Pivot entries of the fraction-free echelon form of a polynomial
    matrix; their vanishing loci are where the generic rank can drop."""
    if _is_function_matrix(m):
        rows = _clear_function_rows(m)
    else:
        rows = [list(r) for r in m.entries]
    _, _, pivot_vals = bareiss_echelon(rows)
    return list(pivot_vals)


def _clear_vector(vec: list[RationalFunction]) -> list[Polynomial]:
    """Scale a function-field vector to polynomial entries with no common
    polynomial factor, coprime integer coefficients overall, and a positive
    leading coefficient on the first nonzero entry."""
    nvars = vec[0].nvars
    common = Polynomial.one(nvars)
    for f in vec:
        common = poly_lcm(common, f.den)
    polys = [f.num * (common / f.den) for f in vec]
    g = Polynomial.zero(nvars)
    for p in polys:
        g = poly_gcd(g, p)
        if g.is_constant and not g.is_zero:
            break
    if not g.is_zero and not (g.is_constant and g.constant_value() == 1):
        polys = [p / g for p in polys]
    denom_lcm = 1
    for p in polys:
        for c in p.terms.values():
            denom_lcm = denom_lcm * c.denominator // _gcd_int(denom_lcm, c.denominator)
    num_gcd = 0
    for p in polys:
        for c in p.terms.values():
            num_gcd = _gcd_int(num_gcd, abs((c * denom_lcm).numerator))
    scale = Fraction(denom_lcm, num_gcd) if num_gcd else Fraction(1)
    for p in reversed(polys):
        if not p.is_zero:
            if p.leading_term()[1] * scale < 0:
                scale = -scale
            break
    return [p * scale for p in polys]


def nullspace(m: Matrix) -> list[list]:
    """Basis of the right kernel, via fraction-free elimination.

    Over the rationals the basis follows the reduced-echelon pattern (each
    vector has a 1 in one free column and 0 in the others).  Over
    polynomial or rational-function entries the kernel is computed over
    the function field and each basis vector is cleared to polynomial
    entries with no common factor.  Deterministic given the term order.
    """
    basis, _ = nullspace_with_free_columns(m)
    return basis


def nullspace_with_free_columns(m: Matrix) -> tuple[list[list], list[int]]:
    """Kernel basis together with the free-column index owned by each
    basis vector (the column where that vector carries the pattern 1)."""
    ncols = m.cols
    if m.rows == 0:
        basis = []
        for f in range(ncols):
            vec = [Fraction(0)] * ncols
            vec[f] = Fraction(1)
            basis.append(vec)
        return basis, list(range(ncols))
    functional = _is_function_matrix(m) or _is_polynomial_matrix(m)
    if functional:
        rows = _clear_function_rows(m)
        nvars = rows[0][0].nvars
        lift = lambda p: RationalFunction(p)
        zero = RationalFunction.from_scalar(nvars, 0)
        one = RationalFunction.from_scalar(nvars, 1)
    else:
        rows = [[rat(e) for e in r] for r in m.entries]
        lift = lambda c: c
        zero, one = Fraction(0), Fraction(1)
    echelon, pivot_cols, _ = bareiss_echelon(rows)
    rank = len(pivot_cols)
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for f in free_cols:
        vec = [zero] * ncols
        vec[f] = one
        for i in range(rank - 1, -1, -1):
            pc = pivot_cols[i]
            s = zero
            for j in range(pc + 1, ncols):
                if echelon[i][j] and vec[j]:
                    s = s + lift(echelon[i][j]) * vec[j]
            vec[pc] = -s / lift(echelon[i][pc])
        basis.append(vec)
    # rank-nullity, checked on every call
    assert rank + len(basis) == ncols, "rank-nullity violation"
    if functional:
        return [_clear_vector(v) for v in basis], free_cols
    return basis, free_cols
