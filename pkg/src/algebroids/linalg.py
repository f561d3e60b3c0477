"""Exact linear algebra over the scalar fraction field.

Systems are solved by normalized Gaussian elimination with pivoting on
symbolic nonzero-ness: an entry is a usable pivot iff it is not identically
zero, with constant and short entries preferred to limit expression swell.
Pointwise (numeric) pivoting would be unsound at poles.

Rows are kept sparse (dict column -> Scalar) because the geometric systems
assembled elsewhere touch only a handful of unknowns per equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ShapeError, SingularMatrixError
from .scalars import Poly, Scalar

Matrix = list[list[Scalar]]


def identity_matrix(size: int, nvars: int) -> Matrix:
    one = Scalar.one(nvars)
    zero = Scalar.zero(nvars)
    return [[one if i == j else zero for j in range(size)] for i in range(size)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if not a or not b or len(a[0]) != len(b):
        raise ShapeError("incompatible matrix shapes")
    nvars = a[0][0].nvars
    out = []
    for row in a:
        out_row = []
        for j in range(len(b[0])):
            acc = Scalar.zero(nvars)
            for k, x in enumerate(row):
                if not x.is_zero() and not b[k][j].is_zero():
                    acc = acc + x * b[k][j]
            out_row.append(acc)
        out.append(out_row)
    return out


def mat_vec(a: Matrix, v: list[Scalar]) -> list[Scalar]:
    return [row[0] for row in mat_mul(a, [[x] for x in v])]


def _pivot_quality(s: Scalar) -> tuple:
    # Prefer constants, then fewer terms.
    return (0 if s.is_constant() else 1, s.term_count())


def invert_matrix(m: Matrix) -> Matrix:
    """Exact inverse by Gauss-Jordan; raises if symbolically singular."""
    size = len(m)
    if any(len(row) != size for row in m):
        raise ShapeError("inverse requires a square matrix")
    nvars = m[0][0].nvars
    a = [list(row) for row in m]
    inv = identity_matrix(size, nvars)
    for col in range(size):
        best = None
        for r in range(col, size):
            if not a[r][col].is_zero():
                if best is None or _pivot_quality(a[r][col]) < _pivot_quality(a[best][col]):
                    best = r
        if best is None:
            raise SingularMatrixError("matrix is symbolically singular")
        if best != col:
            a[col], a[best] = a[best], a[col]
            inv[col], inv[best] = inv[best], inv[col]
        piv = a[col][col]
        a[col] = [x / piv for x in a[col]]
        inv[col] = [x / piv for x in inv[col]]
        for r in range(size):
            if r == col:
                continue
            f = a[r][col]
            if f.is_zero():
                continue
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


@dataclass
class LinearSolution:
    """Full solution set of an affine system A x = b over the scalar field.

    status is "unique", "affine" or "infeasible".  For feasible systems,
    ``particular`` has every free unknown set to zero and ``kernel_basis``
    holds one vector per free unknown.  For infeasible systems ``witness``
    is a nonzero scalar c arising from a reduced equation 0 = c.
    """

    status: str
    nunknowns: int
    particular: list[Scalar] | None = None
    kernel_basis: list[list[Scalar]] = field(default_factory=list)
    witness: Scalar | None = None
    pivot_columns: list[int] = field(default_factory=list)


def _poly_quality(p: Poly) -> tuple:
    return (0 if p.is_constant() else 1, len(p.terms), p.total_degree())


def _clear_row(
    coeffs: dict[int, Scalar], rhs: Scalar, nvars: int
) -> tuple[dict[int, Poly], Poly]:
    """Multiply a row through by its distinct denominators so every entry
    is a polynomial; scaling a row does not change the solution set."""
    items = [(c, v) for c, v in coeffs.items() if not v.is_zero()]
    dens: list[Poly] = []
    for value in [v for _, v in items] + [rhs]:
        if not value.den.is_one() and not any(d == value.den for d in dens):
            dens.append(value.den)

    def cleared(value: Scalar) -> Poly:
        poly = value.num
        skipped = False
        for d in dens:
            if not skipped and d == value.den:
                skipped = True
                continue
            poly = poly * d
        return poly

    return {c: cleared(v) for c, v in items}, cleared(rhs)


def solve_affine(
    rows: list[tuple[dict[int, Scalar], Scalar]], nunknowns: int, nvars: int
) -> LinearSolution:
    """Solve A x = b given as sparse rows (coefficient dict, right side).

    Forward elimination is fraction-free (one-step Bareiss): rows are
    cleared to polynomial entries and every update

        new = (pivot * entry - entry_in_pivot_column * pivot_row_entry)
              / previous_pivot

    divides exactly, so intermediate entries are minors of the original
    matrix and never grow into nested fractions.  The resulting triangular
    system is then solved over the fraction field.
    """
    work: list[tuple[dict[int, Poly], Poly]] = []
    for coeffs, rhs in rows:
        cleared = _clear_row(coeffs, rhs, nvars)
        if cleared[0] or not cleared[1].is_zero():
            work.append(cleared)
    pivots: list[tuple[int, dict[int, Poly], Poly]] = []  # col, coeffs, rhs
    prev = Poly.one(nvars)

    def bareiss_update(coeffs, rhs, pivot, pcoeffs, prhs, col):
        f = coeffs.get(col)
        new_coeffs: dict[int, Poly] = {}
        if f is None or f.is_zero():
            for c, v in coeffs.items():
                nv = (pivot * v).divide_exact(prev)
                if not nv.is_zero():
                    new_coeffs[c] = nv
            new_rhs = (pivot * rhs).divide_exact(prev)
        else:
            for c in set(coeffs) | set(pcoeffs):
                if c == col:
                    continue
                a = coeffs.get(c)
                b = pcoeffs.get(c)
                term = pivot * a if a is not None else Poly.zero(nvars)
                if b is not None:
                    term = term - f * b
                if term.is_zero():
                    continue
                nv = term.divide_exact(prev)
                if not nv.is_zero():
                    new_coeffs[c] = nv
            new_rhs = (pivot * rhs - f * prhs).divide_exact(prev)
        return new_coeffs, new_rhs

    while True:
        # global pivot selection on simplicity: constants first, then short
        # low-degree entries, with a deterministic tie-break.  Keeping the
        # running pivot constant for as long as possible stops the minor
        # degrees from growing.
        best = None
        for i, (coeffs, _) in enumerate(work):
            for c, p in coeffs.items():
                if p.is_zero():
                    continue
                key = (_poly_quality(p), c, i)
                if best is None or key < best[0]:
                    best = (key, i, c)
        if best is None:
            break
        _, row_index, col = best
        pcoeffs, prhs = work.pop(row_index)
        pivot = pcoeffs[col]
        # full Jordan reduction, applied to prior pivot rows as well, keeps
        # every row a minor and makes the final read-off a single division
        work = [
            row
            for row in (
                bareiss_update(coeffs, rhs, pivot, pcoeffs, prhs, col)
                for coeffs, rhs in work
            )
            if row[0] or not row[1].is_zero()
        ]
        pivots = [
            (pcol, *bareiss_update(coeffs, rhs, pivot, pcoeffs, prhs, col))
            for pcol, coeffs, rhs in pivots
        ]
        pivots.append((col, pcoeffs, prhs))
        prev = pivot
    for coeffs, rhs in work:
        if not any(not v.is_zero() for v in coeffs.values()) and not rhs.is_zero():
            return LinearSolution(
                status="infeasible", nunknowns=nunknowns, witness=Scalar(rhs)
            )
    zero = Scalar.zero(nvars)
    one = Scalar.one(nvars)
    pivot_cols = {col for col, _, _ in pivots}
    free_cols = [c for c in range(nunknowns) if c not in pivot_cols]
    particular = [zero] * nunknowns
    basis = [[zero] * nunknowns for _ in free_cols]
    free_index = {fc: k for k, fc in enumerate(free_cols)}
    for fc in free_cols:
        basis[free_index[fc]][fc] = one
    for col, coeffs, rhs in pivots:
        own = Scalar(coeffs[col])
        particular[col] = Scalar(rhs) / own
        for c, v in coeffs.items():
            if c != col and c in free_index:
                basis[free_index[c]][col] = -(Scalar(v) / own)
    return LinearSolution(
        status="unique" if not free_cols else "affine",
        nunknowns=nunknowns,
        particular=particular,
        kernel_basis=basis,
        pivot_columns=sorted(pivot_cols),
    )


def kernel_basis(matrix: Matrix, nvars: int) -> list[list[Scalar]]:
    """Basis of the right null space of a dense matrix over the field."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows = []
    zero = Scalar.zero(nvars)
    for row in matrix:
        coeffs = {j: v for j, v in enumerate(row) if not v.is_zero()}
        rows.append((coeffs, zero))
    sol = solve_affine(rows, ncols, nvars)
    return sol.kernel_basis
