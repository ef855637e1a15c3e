"""Exact linear algebra over the rationals extended by symbolic constants.

Entries are either plain Fractions (the fast path) or canonical expressions
in declared constants, treated as independent transcendentals: any entry
whose zero test succeeds is a valid pivot, and an Unknown zero test raises
SymbolicPivotAmbiguity.  Rows are sparse dicts keyed by column index.
"""

from __future__ import annotations

from fractions import Fraction

from . import expr as ex
from .errors import SymbolicPivotAmbiguity

__all__ = ["fe_add", "fe_mul", "fe_div", "fe_neg", "fe_is_zero", "fe_expr",
           "sparse_rref", "nullspace", "rank", "in_span", "solve_dense"]

FE = Fraction | ex.Expr


def fe_expr(a: FE) -> ex.Expr:
    return ex.rat(a) if isinstance(a, Fraction) else a


def _demote(e: ex.Expr) -> FE:
    return e.value if isinstance(e, ex.Rat) else e


def fe_add(a: FE, b: FE) -> FE:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return _demote(ex.expand(ex.add(fe_expr(a), fe_expr(b))))


def fe_mul(a: FE, b: FE) -> FE:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return _demote(ex.expand(ex.mul(fe_expr(a), fe_expr(b))))


def fe_neg(a: FE) -> FE:
    return -a if isinstance(a, Fraction) else _demote(ex.neg(a))


def fe_div(a: FE, b: FE) -> FE:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    return _demote(ex.expand(ex.div(fe_expr(a), fe_expr(b))))


def fe_is_zero(a: FE, where: str = "entry") -> bool:
    if isinstance(a, Fraction):
        return a == 0
    z = ex.is_zero(a)
    if z is ex.UNKNOWN:
        raise SymbolicPivotAmbiguity(a)
    return z


def _axpy(row: dict, pivot_row: dict, factor: FE) -> dict:
    """row + factor * pivot_row, dropping zero entries."""
    out = dict(row)
    for c, v in pivot_row.items():
        nv = fe_add(out.get(c, Fraction(0)), fe_mul(factor, v))
        if fe_is_zero(nv):
            out.pop(c, None)
        else:
            out[c] = nv
    return out


def _clean(row: dict) -> dict:
    return {c: v for c, v in row.items() if not fe_is_zero(v)}


def sparse_rref(rows: list[dict], ncols: int) -> dict[int, dict]:
    """Reduced row echelon form; returns {pivot column: normalized row}.

    Pivot columns are chosen in increasing index order; plain-rational
    entries are preferred as pivots within a column to keep symbolic
    denominators out of the elimination where possible.
    """
    pivots: dict[int, dict] = {}
    pending = [_clean(r) for r in rows]
    pending = [r for r in pending if r]
    progress = True
    while pending:
        # reduce every pending row against current pivots, then promote one
        reduced = []
        for row in pending:
            while True:
                hit = None
                for c in sorted(row):
                    if c in pivots:
                        hit = c
                        break
                if hit is None:
                    break
                row = _axpy(row, pivots[hit], fe_neg(row[hit]))
            if row:
                reduced.append(row)
        if not reduced:
            break
        # promote the row whose leading column is smallest; prefer rational pivots
        def sort_key(r):
            lead = min(r)
            rational = isinstance(r[lead], Fraction)
            return (lead, 0 if rational else 1, len(r))
        reduced.sort(key=sort_key)
        row = reduced[0]
        lead = min(row)
        inv = fe_div(Fraction(1), row[lead])
        row = {c: fe_mul(inv, v) for c, v in row.items()}
        row[lead] = Fraction(1)
        # eliminate the new pivot column from existing pivot rows
        for pc, prow in list(pivots.items()):
            if lead in prow:
                pivots[pc] = _axpy(prow, row, fe_neg(prow[lead]))
        pivots[lead] = row
        pending = reduced[1:]
    return pivots


def nullspace(rows: list[dict], ncols: int) -> list[dict]:
    """Basis of {x : A x = 0}, one sparse vector per free column."""
    pivots = sparse_rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = {f: Fraction(1)}
        for pc, prow in pivots.items():
            if f in prow:
                vec[pc] = fe_neg(prow[f])
        basis.append(vec)
    return basis


def rank(rows: list[dict], ncols: int) -> int:
    return len(sparse_rref(rows, ncols))


def in_span(vectors: list[dict], candidate: dict, ncols: int) -> bool:
    """True iff candidate is a linear combination of the vectors."""
    base = rank(vectors, ncols)
    return rank(vectors + [candidate], ncols) == base


def solve_dense(matrix: list[list[ex.Expr]], rhs: list[ex.Expr]) -> list[ex.Expr] | None:
    """Solve a small dense square system with expression entries exactly.

    Returns None when the matrix is singular (a pivot cannot be found).
    """
    n = len(matrix)
    aug = [list(row) + [r] for row, r in zip(matrix, rhs)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            z = ex.is_zero(aug[r][col])
            if z is ex.UNKNOWN:
                raise SymbolicPivotAmbiguity(aug[r][col])
            if z is False:
                piv = r
                break
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = ex.div(ex.ONE, aug[col][col])
        aug[col] = [ex.mul(inv, v) for v in aug[col]]
        for r in range(n):
            if r != col:
                f = aug[r][col]
                if ex.is_zero(f) is not True:
                    aug[r] = [ex.sub(a, ex.mul(f, b)) for a, b in zip(aug[r], aug[col])]
    return [row[n] for row in aug]
