"""Sparse multivariate polynomials over Q(i, sqrt(3)).

A polynomial carries an ordered tuple of variable names and a dict mapping
exponent tuples to nonzero FieldScalar coefficients.  Two polynomials are
equal iff they share the variable tuple and the term dict.  Terms are kept
canonical (no zero coefficients); printing and leading-term extraction use
the graded lexicographic order so output is deterministic.

Besides ring arithmetic the module provides the structural operations the
rest of the repository needs: formal partial derivatives, exact polynomial
map composition, the conjugation swap (exchange paired variables and
conjugate coefficients), the j-rotation endomorphism, exact division, and
exact determinants / linear solves over the coefficient field.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from .scalars import ONE, ZERO, FieldScalar, j_power

Exponents = tuple[int, ...]
CoeffLike = Union[FieldScalar, int, Fraction]


class VariableMismatchError(ValueError):
    """Operands are defined over different variable tuples."""


class NonDivisibleError(ArithmeticError):
    """Exact division failed; the claimed divisibility does not hold."""


def _grlex_key(e: Exponents) -> tuple[int, Exponents]:
    return (sum(e), e)


class MPoly:
    """Sparse polynomial over Q(i, sqrt(3)) in named variables."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exponents, FieldScalar] | None = None):
        self.variables: tuple[str, ...] = tuple(variables)
        clean: dict[Exponents, FieldScalar] = {}
        if terms:
            nvars = len(self.variables)
            for exps, coeff in terms.items():
                if len(exps) != nvars:
                    raise ValueError(f"exponent tuple {exps} does not match variables {self.variables}")
                if coeff:
                    clean[tuple(exps)] = coeff
        self.terms: dict[Exponents, FieldScalar] = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(variables: Sequence[str]) -> "MPoly":
        return MPoly(variables)

    @staticmethod
    def const(variables: Sequence[str], value: CoeffLike) -> "MPoly":
        coeff = FieldScalar.coerce(value)
        if not coeff:
            return MPoly(variables)
        return MPoly(variables, {(0,) * len(tuple(variables)): coeff})

    @staticmethod
    def var(variables: Sequence[str], name: str) -> "MPoly":
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatchError(f"unknown variable {name!r} in {variables}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return MPoly(variables, {exps: ONE})

    @staticmethod
    def variables_ring(variables: Sequence[str]) -> dict[str, "MPoly"]:
        """Convenience: name -> generator polynomial for each variable."""
        return {name: MPoly.var(variables, name) for name in tuple(variables)}

    # -- basic queries ------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Total degree; the zero polynomial has degree -1 by convention."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def leading(self) -> tuple[Exponents, FieldScalar]:
        """Leading (exponents, coefficient) in graded-lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=_grlex_key)
        return exps, self.terms[exps]

    def coefficient(self, exps: Exponents) -> FieldScalar:
        return self.terms.get(tuple(exps), ZERO)

    def constant_term(self) -> FieldScalar:
        return self.terms.get((0,) * len(self.variables), ZERO)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self.terms.items())))

    def _check_same_ring(self, other: "MPoly") -> None:
        if self.variables != other.variables:
            raise VariableMismatchError(
                f"variable lists differ: {self.variables} vs {other.variables}"
            )

    # -- ring arithmetic ----------------------------------------------------

    def __add__(self, other: "MPoly | CoeffLike") -> "MPoly":
        if not isinstance(other, MPoly):
            other = MPoly.const(self.variables, other)
        self._check_same_ring(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            acc = out.get(exps)
            new = coeff if acc is None else acc + coeff
            if new:
                out[exps] = new
            elif acc is not None:
                del out[exps]
        return MPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MPoly | CoeffLike") -> "MPoly":
        if not isinstance(other, MPoly):
            other = MPoly.const(self.variables, other)
        return self + (-other)

    def __rsub__(self, other: CoeffLike) -> "MPoly":
        return MPoly.const(self.variables, other) + (-self)

    def __mul__(self, other: "MPoly | CoeffLike") -> "MPoly":
        if not isinstance(other, MPoly):
            scalar = FieldScalar.coerce(other)
            if not scalar:
                return MPoly(self.variables)
            return MPoly(self.variables, {e: c * scalar for e, c in self.terms.items()})
        self._check_same_ring(other)
        out: dict[Exponents, FieldScalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                acc = out.get(exps)
                new = prod if acc is None else acc + prod
                if new:
                    out[exps] = new
                elif acc is not None:
                    del out[exps]
        return MPoly(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result = MPoly.const(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- calculus and endomorphisms ------------------------------------------

    def diff(self, name: str) -> "MPoly":
        """Formal partial derivative with respect to one variable."""
        try:
            idx = self.variables.index(name)
        except ValueError:
            raise VariableMismatchError(f"unknown variable {name!r}") from None
        out: dict[Exponents, FieldScalar] = {}
        for exps, coeff in self.terms.items():
            k = exps[idx]
            if k == 0:
                continue
            new = list(exps)
            new[idx] = k - 1
            out[tuple(new)] = coeff * k
        return MPoly(self.variables, out)

    def subs(self, images: Mapping[str, "MPoly"]) -> "MPoly":
        """Exact composition f(images); one image per variable of f.

        All images must live over a common target variable tuple, which
        becomes the variable tuple of the result.
        """
        missing = [v for v in self.variables if v not in images]
        if missing:
            raise VariableMismatchError(f"no image supplied for variables {missing}")
        imgs = [images[v] for v in self.variables]
        target = imgs[0].variables if imgs else self.variables
        for g in imgs:
            if g.variables != target:
                raise VariableMismatchError("images live over different variable tuples")
        result = MPoly.zero(target)
        # Cache powers of each image as they are needed.
        pow_cache: list[dict[int, MPoly]] = [
            {0: MPoly.const(target, 1), 1: g} for g in imgs
        ]

        def image_power(i: int, k: int) -> MPoly:
            cache = pow_cache[i]
            if k not in cache:
                cache[k] = image_power(i, k - 1) * cache[1]
            return cache[k]

        for exps, coeff in self.terms.items():
            term = MPoly.const(target, coeff)
            for i, k in enumerate(exps):
                if k:
                    term = term * image_power(i, k)
            result = result + term
        return result

    def conj_swap(self, pairing: Iterable[tuple[str, str]]) -> "MPoly":
        """Exchange paired variables and conjugate every coefficient.

        The pairing must cover all variables; a variable may pair with
        itself.  This realizes complex conjugation on polynomial models
        whose variables come in conjugate pairs.
        """
        perm: dict[str, str] = {}
        for u, v in pairing:
            perm[u] = v
            perm[v] = u
        uncovered = [v for v in self.variables if v not in perm]
        if uncovered:
            raise VariableMismatchError(f"pairing does not cover variables {uncovered}")
        index_map = [self.variables.index(perm[v]) for v in self.variables]
        out: dict[Exponents, FieldScalar] = {}
        for exps, coeff in self.terms.items():
            new = [0] * len(exps)
            for i, e in enumerate(exps):
                new[index_map[i]] = e
            out[tuple(new)] = coeff.conj()
        return MPoly(self.variables, out)

    def swap_variables(self, pairing: Iterable[tuple[str, str]]) -> "MPoly":
        """Exchange paired variables without touching coefficients.

        This is the reflection symmetry of the function (Z <-> Zb as formal
        variables); conj_swap additionally conjugates coefficients and is
        complex conjugation of the function instead.
        """
        perm: dict[str, str] = {}
        for u, v in pairing:
            perm[u] = v
            perm[v] = u
        uncovered = [v for v in self.variables if v not in perm]
        if uncovered:
            raise VariableMismatchError(f"pairing does not cover variables {uncovered}")
        index_map = [self.variables.index(perm[v]) for v in self.variables]
        out: dict[Exponents, FieldScalar] = {}
        for exps, coeff in self.terms.items():
            new = [0] * len(exps)
            for i, e in enumerate(exps):
                new[index_map[i]] = e
            out[tuple(new)] = coeff
        return MPoly(self.variables, out)

    def rotate_j(self, weights: Mapping[str, int]) -> "MPoly":
        """Substitute v -> j**w(v) * v for each variable (default weight 0)."""
        w = [weights.get(v, 0) for v in self.variables]
        out: dict[Exponents, FieldScalar] = {}
        for exps, coeff in self.terms.items():
            phase = sum(wi * ei for wi, ei in zip(w, exps)) % 3
            out[exps] = coeff * j_power(phase)
        return MPoly(self.variables, out)

    # -- evaluation ----------------------------------------------------------

    def evaluate_exact(self, point: Mapping[str, CoeffLike]) -> FieldScalar:
        vals = [FieldScalar.coerce(point[v]) for v in self.variables]
        total = ZERO
        for exps, coeff in self.terms.items():
            term = coeff
            for val, k in zip(vals, exps):
                for _ in range(k):
                    term = term * val
            total = total + term
        return total

    def evaluate(self, point: Mapping[str, "complex | np.ndarray"]):
        """Numeric evaluation; accepts scalars or numpy arrays per variable."""
        vals = [point[v] for v in self.variables]
        total = None
        for exps, coeff in self.terms.items():
            term = coeff.to_complex()
            for val, k in zip(vals, exps):
                if k:
                    term = term * val**k
            total = term if total is None else total + term
        if total is None:
            shapes = [np.shape(v) for v in vals if np.shape(v)]
            return np.zeros(shapes[0], dtype=complex) if shapes else 0j
        return total

    # -- canonical text -------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponents, FieldScalar]]:
        return sorted(self.terms.items(), key=lambda item: _grlex_key(item[0]), reverse=True)

    def _monomial_str(self, exps: Exponents) -> str:
        factors = []
        for name, k in zip(self.variables, exps):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        return "*".join(factors)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks: list[str] = []
        for exps, coeff in self.sorted_terms():
            mono = self._monomial_str(exps)
            cs = str(coeff)
            compound = ("+" in cs[1:]) or ("-" in cs[1:])
            if not mono:
                body = f"({cs})" if compound else cs
            elif compound:
                body = f"({cs})*{mono}"
            elif cs == "1":
                body = mono
            elif cs == "-1":
                body = f"-{mono}"
            else:
                body = f"{cs}*{mono}"
            if not chunks:
                chunks.append(body)
            elif body.startswith("-"):
                chunks.append(f" - {body[1:]}")
            else:
                chunks.append(f" + {body}")
        return "".join(chunks)

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"MPoly({self})"


# -- exact division -----------------------------------------------------------


def divide_exact(f: MPoly, g: MPoly) -> MPoly:
    """Return q with f = q*g, or raise NonDivisibleError.

    Single-divisor division in graded-lex order: when f is genuinely a
    multiple of g the leading term of every intermediate remainder is
    divisible by the leading term of g, so the algorithm never gets stuck;
    a stuck state certifies non-divisibility.
    """
    f._check_same_ring(g)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    g_exps, g_coeff = g.leading()
    g_coeff_inv = g_coeff.inverse()
    quotient = MPoly.zero(f.variables)
    remainder = f
    while remainder:
        r_exps, r_coeff = remainder.leading()
        q_exps = tuple(a - b for a, b in zip(r_exps, g_exps))
        if any(e < 0 for e in q_exps):
            raise NonDivisibleError(f"({f}) is not divisible by ({g})")
        t = MPoly(f.variables, {q_exps: r_coeff * g_coeff_inv})
        quotient = quotient + t
        remainder = remainder - t * g
    return quotient


def try_divide(f: MPoly, g: MPoly) -> MPoly | None:
    try:
        return divide_exact(f, g)
    except NonDivisibleError:
        return None


# -- exact determinants ---------------------------------------------------------


def det_cofactor(matrix: Sequence[Sequence[MPoly]]) -> MPoly:
    """Naive cofactor expansion; the oracle for small matrices."""
    n = len(matrix)
    for row in matrix:
        if len(row) != n:
            raise ValueError("matrix is not square")
    variables = matrix[0][0].variables

    def expand(rows: tuple[int, ...], cols: tuple[int, ...]) -> MPoly:
        if len(rows) == 1:
            return matrix[rows[0]][cols[0]]
        total = MPoly.zero(variables)
        r = rows[0]
        rest = rows[1:]
        for i, c in enumerate(cols):
            minor = expand(rest, cols[:i] + cols[i + 1 :])
            term = matrix[r][c] * minor
            total = total + (term if i % 2 == 0 else -term)
        return total

    idx = tuple(range(n))
    return expand(idx, idx)


def det_fraction_free(matrix: Sequence[Sequence[MPoly]]) -> MPoly:
    """Exact determinant by Bareiss fraction-free elimination.

    Intermediate entries are genuine minors of the input, so every division
    performed is exact in the polynomial ring; row swaps handle zero pivots.
    """
    n = len(matrix)
    for row in matrix:
        if len(row) != n:
            raise ValueError("matrix is not square")
    variables = matrix[0][0].variables
    m = [list(row) for row in matrix]
    sign = 1
    denom = MPoly.const(variables, 1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot_row = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if pivot_row is None:
                return MPoly.zero(variables)
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        trivial_denom = _is_one(denom)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                numerator = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = numerator if trivial_denom else divide_exact(numerator, denom)
            m[i][k] = MPoly.zero(variables)
        denom = m[k][k]
    result = m[n - 1][n - 1]
    return result if sign == 1 else -result


def _is_one(p: MPoly) -> bool:
    return len(p.terms) == 1 and p.constant_term() == ONE


# -- exact linear algebra over the field ----------------------------------------


def solve_field_linear(
    rows: Sequence[Sequence[FieldScalar]], rhs: Sequence[FieldScalar]
) -> list[FieldScalar] | None:
    """Solve A x = b exactly over Q(i, sqrt(3)).

    Returns one solution (free unknowns set to zero) or None when the
    system is inconsistent.
    """
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    a = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, nrows) if a[i][col]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = a[r][col].inverse()
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][col]:
                factor = a[i][col]
                a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
        pivots.append((r, col))
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if a[i][ncols]:
            return None
    solution = [ZERO] * ncols
    for row, col in pivots:
        solution[col] = a[row][ncols]
    return solution


def poly_matrix(variables: Sequence[str], entries: Sequence[Sequence["MPoly | CoeffLike"]]) -> list[list[MPoly]]:
    """Coerce a nested sequence of polynomials/constants to a matrix."""
    out: list[list[MPoly]] = []
    for row in entries:
        out.append(
            [e if isinstance(e, MPoly) else MPoly.const(variables, e) for e in row]
        )
    return out


GammaTable = dict[tuple[str, str], MPoly]


def monomials_up_to(
    variables: Sequence[str], bound: int, weight: Callable[[Exponents], int] | None = None
) -> list[Exponents]:
    """All exponent tuples with weighted degree <= bound, in graded-lex order."""
    variables = tuple(variables)
    weight = weight or (lambda e: sum(e))
    out: list[Exponents] = []

    def rec(prefix: list[int], pos: int) -> None:
        if pos == len(variables):
            e = tuple(prefix)
            if weight(e) <= bound:
                out.append(e)
            return
        for k in range(bound + 1):
            prefix.append(k)
            if weight(tuple(prefix + [0] * (len(variables) - pos - 1))) <= bound:
                rec(prefix, pos + 1)
            prefix.pop()

    rec([], 0)
    out.sort(key=_grlex_key)
    return out
