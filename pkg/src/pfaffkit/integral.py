"""Pointwise integral-element machinery.

At a non-degenerate point the system determines the annihilator subspace
of the tangent space together with one skew-symmetric bilinear form per
generator (the restriction of its differential).  Integral elements are
the subspaces isotropic for all of these forms at once; this module builds
ascending chains of them, their polar spaces and enlarged characters, the
chain-relative characters, and runs a backtracking search for the largest
integral element.

Character conventions.  Two chain-relative figures are reported side by
side and never conflated:

* ``character_chain``: annihilator dimension minus the terminal chain
  dimension (the dimension-count convention), and
* ``first_character``: annihilator dimension minus the first polar-space
  dimension (the independent-conditions convention; this is the figure
  that matches the rank-drop lemma for the derived system on every input,
  including gender-2 normal forms where the two conventions differ).

Both equal the classical character on systems where a chain from the
given seed stalls after one step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .exactalg import (
    Matrix,
    PfaffkitError,
    Polynomial,
    Scalar,
    nullspace_with_free_columns,
    rat,
)
from .pfaffian import (
    PfaffianSystem,
    _as_point,
    annihilator_basis_at,
    restricted_skew_forms,
)


class ChainError(PfaffkitError):
    """A vector cannot be used where the chain construction needs it."""


class NotIntegralError(PfaffkitError):
    """A subspace that had to be an integral element is not."""


class SearchLimitError(PfaffkitError):
    """The exhaustive search refuses to run above its size limit."""


#: Component values for the deterministic candidate stream, in the fixed
#: enumeration order used everywhere (denominators at most 2).
STREAM_GRID: tuple[Fraction, ...] = (
    Fraction(-2), Fraction(-1), Fraction(-1, 2), Fraction(0),
    Fraction(1, 2), Fraction(1), Fraction(2),
)
_GRID_SET = frozenset(STREAM_GRID)


@dataclass(frozen=True)
class PointFrame:
    """Annihilator basis and restricted skew forms at a base point."""

    system: PfaffianSystem
    base_point: tuple[Fraction, ...]
    annihilator_basis: tuple[tuple[Fraction, ...], ...]
    free_columns: tuple[int, ...]
    skew_forms: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @property
    def dim_sigma(self) -> int:
        return len(self.annihilator_basis)

    def to_sigma(self, vector: Sequence[Scalar]) -> tuple[Fraction, ...]:
        """Coordinates of an ambient vector in the annihilator basis;
        raises ChainError when the vector is outside the annihilator."""
        v = [rat(c) for c in vector]
        if len(v) != self.system.nvars:
            raise ChainError("vector length does not match the chart")
        coords = tuple(v[f] for f in self.free_columns)
        rebuilt = self.from_sigma(coords)
        if list(rebuilt) != v:
            raise ChainError(
                "vector is not annihilated by the system at the base point")
        return coords

    def from_sigma(self, coords: Sequence[Fraction]) -> tuple[Fraction, ...]:
        n = self.system.nvars
        out = [Fraction(0)] * n
        for c, basis_vec in zip(coords, self.annihilator_basis):
            if c:
                for i in range(n):
                    out[i] += c * basis_vec[i]
        return tuple(out)

    def pairing(self, form_index: int, v: Sequence[Fraction], w: Sequence[Fraction]) -> Fraction:
        """Value of the restricted differential of generator ``form_index``
        on two vectors in annihilator coordinates."""
        B = self.skew_forms[form_index]
        total = Fraction(0)
        for a, va in enumerate(v):
            if va:
                row = B[a]
                for b, wb in enumerate(w):
                    if wb:
                        total += va * row[b] * wb
        return total

    def pairings(self, v: Sequence[Fraction], w: Sequence[Fraction]) -> list[Fraction]:
        return [self.pairing(i, v, w) for i in range(len(self.skew_forms))]


def point_frame(system: PfaffianSystem, point: Sequence[Scalar]) -> PointFrame:
    """Build the pointwise frame; degenerate points raise."""
    pt = _as_point(point, system.nvars)
    system.check_independent_at(pt)
    if system.generators:
        kernel, free_cols = nullspace_with_free_columns(system.coefficient_matrix_at(pt))
        basis = [tuple(v) for v in kernel]
    else:
        basis = [tuple(Fraction(1) if i == j else Fraction(0) for j in range(system.nvars))
                 for i in range(system.nvars)]
        free_cols = list(range(system.nvars))
    skews = restricted_skew_forms(system, pt, basis)
    for B in skews:
        for a in range(len(basis)):
            assert B[a][a] == 0
            for b in range(a):
                assert B[a][b] == -B[b][a], "restricted differential is not skew"
    return PointFrame(
        system=system,
        base_point=pt,
        annihilator_basis=tuple(tuple(v) for v in basis),
        free_columns=tuple(free_cols),
        skew_forms=tuple(tuple(tuple(row) for row in B) for B in skews),
    )


def is_in_involution(frame: PointFrame, v: Sequence[Scalar], w: Sequence[Scalar]) -> bool:
    """True when all restricted differentials vanish on the pair (ambient
    vectors, both required to lie in the annihilator)."""
    vs = frame.to_sigma(v)
    ws = frame.to_sigma(w)
    return all(x == 0 for x in frame.pairings(vs, ws))


def _sigma_rref(vectors: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Reduced row echelon form of a list of annihilator-coordinate
    vectors; canonical for a subspace."""
    rows = [list(v) for v in vectors]
    m = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(m):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        scale = rows[r][c]
        rows[r] = [x / scale for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return [row for row in rows[:r]]


def _span_key(vectors: Sequence[Sequence[Fraction]]) -> tuple:
    return tuple(tuple(row) for row in _sigma_rref(vectors))


def _independent_of(vector: Sequence[Fraction], rref_rows: list[list[Fraction]]) -> bool:
    v = list(vector)
    for row in rref_rows:
        pivot_col = next(i for i, x in enumerate(row) if x == 1)
        if v[pivot_col]:
            f = v[pivot_col]
            v = [x - f * y for x, y in zip(v, row)]
    return any(x != 0 for x in v)


def _polar_constraints(frame: PointFrame, chain_vectors: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """One linear constraint row per (chain vector, skew form)."""
    rows = []
    m = frame.dim_sigma
    for v in chain_vectors:
        for B in frame.skew_forms:
            row = [sum(v[a] * B[a][b] for a in range(m) if v[a]) for b in range(m)]
            if any(row):
                rows.append(row)
    return rows


def _polar_basis_from_constraints(rows: list[list[Fraction]], m: int) -> list[tuple[Fraction, ...]]:
    if not rows:
        basis = []
        for i in range(m):
            v = [Fraction(0)] * m
            v[i] = Fraction(1)
            basis.append(tuple(v))
        return basis
    kernel, _ = nullspace_with_free_columns(Matrix(rows))
    return [tuple(v) for v in kernel]


class IntegralChain:
    """Ascending chain of integral elements at a point frame.

    ``vectors`` are in annihilator coordinates; ``polar_dims`` records the
    enlarged characters, the dimension of the polar space after each step.
    """

    __slots__ = ("frame", "vectors", "polar_dims", "_polar_basis", "_rref")

    def __init__(self, frame: PointFrame, vectors: Sequence[Sequence[Fraction]] = ()):
        vecs = [tuple(v) for v in vectors]
        rref: list[list[Fraction]] = []
        for idx, v in enumerate(vecs):
            if not _independent_of(v, rref):
                raise ChainError(f"chain vector {idx} depends on the earlier ones")
            rref = _sigma_rref(rref + [list(v)])
        for a in range(len(vecs)):
            for b in range(a + 1, len(vecs)):
                vals = frame.pairings(vecs[a], vecs[b])
                for i, x in enumerate(vals):
                    if x != 0:
                        raise NotIntegralError(
                            f"vectors {a} and {b} are not in involution "
                            f"(form {i} pairs to {x})")
        polar_dims: list[int] = []
        for k in range(1, len(vecs) + 1):
            rows = _polar_constraints(frame, vecs[:k])
            basis = _polar_basis_from_constraints(rows, frame.dim_sigma)
            polar_dims.append(len(basis))
            if k == len(vecs):
                final_basis = basis
        if not vecs:
            final_basis = _polar_basis_from_constraints([], frame.dim_sigma)
        # polar spaces shrink, so consecutive drops are monotone by less choice
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "vectors", tuple(vecs))
        object.__setattr__(self, "polar_dims", tuple(polar_dims))
        object.__setattr__(self, "_polar_basis", tuple(final_basis))
        object.__setattr__(self, "_rref", tuple(tuple(r) for r in rref))

    def __setattr__(self, name, value):
        raise AttributeError("IntegralChain is immutable")

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    @property
    def polar_basis(self) -> tuple[tuple[Fraction, ...], ...]:
        """Basis (annihilator coordinates) of the polar space of the
        current top element; the whole annihilator for the empty chain."""
        return self._polar_basis

    def ambient_vectors(self) -> list[tuple[Fraction, ...]]:
        return [self.frame.from_sigma(v) for v in self.vectors]

    @property
    def exhausted(self) -> bool:
        return len(self._polar_basis) == self.dimension


def new_chain(frame: PointFrame) -> IntegralChain:
    return IntegralChain(frame)


def candidate_stream(m: int) -> Iterator[tuple[Fraction, ...]]:
    """Deterministic stream of annihilator-coordinate vectors: the basis
    vectors first, then all grid combinations with entries from
    STREAM_GRID in lexicographic order (zero vector skipped)."""
    for i in range(m):
        v = [Fraction(0)] * m
        v[i] = Fraction(1)
        yield tuple(v)
    for combo in itertools.product(STREAM_GRID, repeat=m):
        if any(combo):
            yield combo


def _in_polar(constraints: list[list[Fraction]], v: Sequence[Fraction]) -> bool:
    for row in constraints:
        if sum(r * x for r, x in zip(row, v) if x) != 0:
            return False
    return True


def extend_chain(chain: IntegralChain, vector: Sequence[Scalar] | None = None) -> IntegralChain | None:
    """Append one vector to the chain.

    With an explicit ambient ``vector`` the vector must lie in the current
    polar space and outside the current span; violations raise ChainError
    naming the failed condition.  With no vector the first admissible
    candidate from the deterministic stream is used (falling back to a
    polar-basis vector if the grid holds none).  Returns None when the
    polar space equals the current span, so the chain is exhausted.
    """
    frame = chain.frame
    constraints = _polar_constraints(frame, chain.vectors)
    if vector is not None:
        coords = frame.to_sigma(vector)
        if not _in_polar(constraints, coords):
            raise ChainError("vector is not in the polar space of the chain")
        if not _independent_of(coords, [list(r) for r in chain._rref]):
            raise ChainError("vector lies in the span of the chain")
        return IntegralChain(frame, list(chain.vectors) + [coords])
    if chain.exhausted:
        return None
    rref = [list(r) for r in chain._rref]
    for cand in candidate_stream(frame.dim_sigma):
        if _in_polar(constraints, cand) and _independent_of(cand, rref):
            return IntegralChain(frame, list(chain.vectors) + [cand])
    for cand in chain.polar_basis:
        if _independent_of(cand, rref):
            return IntegralChain(frame, list(chain.vectors) + [cand])
    raise AssertionError("polar space exceeds span but no candidate found")


def polar_space(frame: PointFrame, element: Sequence[Sequence[Scalar]]) -> list[tuple[Fraction, ...]]:
    """Ambient basis of the polar space of an integral element (given as
    ambient vectors).  Raises NotIntegralError identifying the violating
    pair and form index when the element is not integral."""
    coords = [frame.to_sigma(v) for v in element]
    for a in range(len(coords)):
        for b in range(a, len(coords)):
            for i, x in enumerate(frame.pairings(coords[a], coords[b])):
                if x != 0:
                    raise NotIntegralError(
                        f"element vectors {a} and {b} pair to {x} under form {i}")
    rows = _polar_constraints(frame, coords)
    basis = _polar_basis_from_constraints(rows, frame.dim_sigma)
    return [frame.from_sigma(v) for v in basis]


def characteristic_element_of(frame: PointFrame, element: Sequence[Sequence[Scalar]]) -> list[tuple[Fraction, ...]]:
    """Ambient basis of the largest subspace of the element that is in
    involution with the whole element (kernel of all restricted forms)."""
    coords = [frame.to_sigma(v) for v in element]
    if not coords:
        return []
    m = frame.dim_sigma
    # v = sum c_k coords[k]; conditions: pairing(v, coords[j]) = 0 for all j, forms
    rows = []
    for j, w in enumerate(coords):
        for B in range(len(frame.skew_forms)):
            row = [frame.pairing(B, ck, w) for ck in coords]
            if any(row):
                rows.append(row)
    if rows:
        kernel, _ = nullspace_with_free_columns(Matrix(rows))
    else:
        kernel = [[Fraction(1) if i == j else Fraction(0) for j in range(len(coords))]
                  for i in range(len(coords))]
    out = []
    for comb in kernel:
        v = [Fraction(0)] * m
        for c, ck in zip(comb, coords):
            for i in range(m):
                v[i] += c * ck[i]
        out.append(frame.from_sigma(v))
    return out


def are_conjugate(frame: PointFrame, element_e: Sequence[Sequence[Scalar]],
                  element_f: Sequence[Sequence[Scalar]]) -> bool:
    """Two subspaces are conjugate when their characteristic elements are
    in involution vector by vector."""
    ce = characteristic_element_of(frame, element_e)
    cf = characteristic_element_of(frame, element_f)
    for v in ce:
        for w in cf:
            if not is_in_involution(frame, v, w):
                return False
    return True


def _single_form_bound(frame: PointFrame) -> int:
    """Upper bound for any common isotropic subspace: for each skew form
    of rank 2s on an m-space, isotropic subspaces have dimension at most
    m - s."""
    m = frame.dim_sigma
    bound = m
    for B in frame.skew_forms:
        rows = [list(map(Fraction, row)) for row in B]
        rank = len(_sigma_rref(rows))
        bound = min(bound, m - rank // 2)
    return bound


def max_integral_dimension(frame: PointFrame, search_limit: int = 8) -> tuple[int, list[tuple[Fraction, ...]]]:
    """Largest integral element found by exhaustive backtracking over the
    candidate stream, with polar-dimension pruning.

    Returns (dimension, ambient witness basis).  The witness is re-checked
    exactly before returning.  Refuses (raises SearchLimitError) when the
    annihilator dimension exceeds ``search_limit``.
    """
    m = frame.dim_sigma
    if m > search_limit:
        raise SearchLimitError(
            f"annihilator dimension {m} exceeds the search limit {search_limit}")
    upper = _single_form_bound(frame)
    best: dict = {"dim": 0, "vectors": []}
    seen: set = set()

    def candidates(constraints, rref):
        for cand in _polar_basis_from_constraints(constraints, m):
            if _independent_of(cand, rref):
                yield cand
        free = len(rref[0]) if rref else m
        for cand in candidate_stream(m):
            if _in_polar(constraints, cand) and _independent_of(cand, rref):
                yield cand

    def dfs(vectors: list, rref: list) -> bool:
        k = len(vectors)
        if k > best["dim"]:
            best["dim"] = k
            best["vectors"] = list(vectors)
            if k == upper:
                return True
        constraints = _polar_constraints(frame, vectors)
        polar_dim = m - len(_sigma_rref(constraints)) if constraints else m
        if polar_dim <= best["dim"]:
            return False
        for cand in candidates(constraints, rref):
            key = _span_key(vectors + [cand])
            if key in seen:
                continue
            seen.add(key)
            if dfs(vectors + [cand], _sigma_rref(rref + [list(cand)])):
                return True
        return False

    dfs([], [])
    witness_coords = best["vectors"]
    witness = [frame.from_sigma(v) for v in witness_coords]
    _verify_witness(frame, witness)
    return best["dim"], witness


def _verify_witness(frame: PointFrame, witness: Sequence[Sequence[Fraction]]) -> None:
    """Independent exactness check: the witness must be annihilated by all
    generators at the point and isotropic for all generator differentials,
    checked against the forms themselves rather than the frame data."""
    system = frame.system
    pt = frame.base_point
    for v in witness:
        for g in system.generators:
            value = sum(c.evaluate(pt) * x for c, x in zip(g.coefficient_vector(), v))
            assert value == 0, "witness vector not annihilated by a generator"
    for a in range(len(witness)):
        for b in range(a + 1, len(witness)):
            for g in system.generators:
                dg = g.exterior_derivative().evaluate_at(pt)
                assert dg.evaluate_on_vectors([witness[a], witness[b]]) == 0, \
                    "witness pair not isotropic for a generator differential"


@dataclass(frozen=True)
class CharacterReport:
    """Chain-relative and maximal character data at one point."""

    base_point: tuple[Fraction, ...]
    nvars: int
    rank: int
    dim_sigma: int
    seed_vectors: tuple[tuple[Fraction, ...], ...]
    chain_vectors: tuple[tuple[Fraction, ...], ...]
    enlarged_characters: tuple[int, ...]
    rho_chain: int
    character_chain: int
    first_character: int
    rho_max: int
    character_min: int
    witness: tuple[tuple[Fraction, ...], ...]

    def polar_increments(self) -> list[int]:
        """Successive drops of the enlarged characters, starting from the
        annihilator dimension."""
        dims = [self.dim_sigma] + list(self.enlarged_characters)
        return [a - b for a, b in zip(dims, dims[1:])]


def character_report(system: PfaffianSystem, point: Sequence[Scalar],
                     seed_vectors: Sequence[Sequence] | None = None,
                     search_limit: int = 8) -> CharacterReport:
    """Build a chain from the seeds (ambient vectors, possibly with
    polynomial components evaluated at the point), extend it with the
    deterministic stream until exhausted, and report the chain-relative
    figures next to the exhaustive maximum."""
    pt = _as_point(point, system.nvars)
    frame = point_frame(system, pt)
    chain = new_chain(frame)
    seeds_used: list[tuple[Fraction, ...]] = []
    if seed_vectors:
        for seed in seed_vectors:
            ambient = tuple(
                c.evaluate(pt) if isinstance(c, Polynomial) else rat(c)
                for c in seed)
            chain = extend_chain(chain, ambient)
            seeds_used.append(ambient)
    while True:
        nxt = extend_chain(chain)
        if nxt is None:
            break
        chain = nxt
    rho_chain = chain.dimension
    n, r = system.nvars, system.rank
    dim_sigma = frame.dim_sigma
    s_list = chain.polar_dims
    first_char = dim_sigma - s_list[0] if s_list else 0
    rho_max, witness = max_integral_dimension(frame, search_limit)
    assert rho_max >= rho_chain
    report = CharacterReport(
        base_point=pt,
        nvars=n,
        rank=r,
        dim_sigma=dim_sigma,
        seed_vectors=tuple(seeds_used),
        chain_vectors=tuple(chain.ambient_vectors()),
        enlarged_characters=tuple(s_list),
        rho_chain=rho_chain,
        character_chain=n - r - rho_chain,
        first_character=first_char,
        rho_max=rho_max,
        character_min=n - r - rho_max,
        witness=tuple(tuple(v) for v in witness),
    )
    return report


def singular_char2_predicate(report: CharacterReport) -> bool | None:
    """Singularity test for chain-relative character 2: the enlarged
    character before the terminal step is at most 1.  The step before the
    first one counts the whole annihilator.  Returns None (not applicable)
    when the chain-relative character is not 2."""
    if report.character_chain != 2:
        return None
    dims = [report.dim_sigma] + list(report.enlarged_characters)
    return dims[report.rho_chain - 1] <= 1 if report.rho_chain >= 1 else None


def systatic_indicator(report: CharacterReport) -> bool:
    """Arithmetic indicator: the annihilator dimension equals twice the
    terminal chain dimension."""
    return report.nvars - report.rank == 2 * report.rho_chain
