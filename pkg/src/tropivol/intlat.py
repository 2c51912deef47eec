"""Exact integer-lattice algebra: Smith normal form, kernels, cokernels and
fixed sublattices of finite matrix groups.

All arithmetic is on Python ints, so nothing overflows.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import ArityError, ClosureError, DomainError


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ArityError("negative matrix shape")
        if len(self.entries) != self.rows * self.cols:
            raise ArityError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ArityError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        cols = [list(c) for c in columns]
        for c in cols:
            if len(c) != rows:
                raise ArityError("ragged columns")
        return cls.from_rows([[c[i] for c in cols] for i in range(rows)], cols=len(cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def columns(self) -> list[list[int]]:
        return [[self[i, j] for i in range(self.rows)] for j in range(self.cols)]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix.from_rows(self.columns(), cols=self.rows)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ArityError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        a, b = self.to_rows(), other.to_rows()
        out = [[sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
               for i in range(self.rows)]
        return IntMatrix.from_rows(out, cols=other.cols)

    def apply(self, v: Sequence[int]) -> list[int]:
        if len(v) != self.cols:
            raise ArityError("vector length does not match matrix columns")
        return [sum(self[i, j] * v[j] for j in range(self.cols)) for i in range(self.rows)]

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ArityError("shape mismatch")
        return IntMatrix(self.rows, self.cols,
                         tuple(x - y for x, y in zip(self.entries, other.entries)))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def key(self) -> tuple[int, ...]:
        return self.entries


def hstack(mats: Sequence[IntMatrix], rows: int) -> IntMatrix:
    cols = []
    for m in mats:
        if m.rows != rows:
            raise ArityError("hstack row mismatch")
        cols.extend(m.columns())
    return IntMatrix.from_columns(cols, rows)


def vstack(mats: Sequence[IntMatrix], cols: int) -> IntMatrix:
    rows = []
    for m in mats:
        if m.cols != cols:
            raise ArityError("vstack column mismatch")
        rows.extend(m.to_rows())
    return IntMatrix.from_rows(rows, cols=cols)


class SmithForm(NamedTuple):
    d: list[int]
    U: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x != 0)


def _pick_pivot(A, t, m, n):
    best = None
    for i in range(t, m):
        row = A[i]
        for j in range(t, n):
            x = row[j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return best


def smith_normal_form(m: IntMatrix) -> SmithForm:
    """Return ``d, U, V`` (and ``U^-1``) with ``U @ m @ V`` diagonal.

    Pivots are chosen as the smallest nonzero absolute value in the
    remaining block, ties broken by row-major position.
    """
    rows, cols = m.rows, m.cols
    A = m.to_rows()
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    Ui = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, k):
        if i != k:
            A[i], A[k] = A[k], A[i]
            U[i], U[k] = U[k], U[i]
            for r in Ui:
                r[i], r[k] = r[k], r[i]

    def swap_cols(j, k):
        if j != k:
            for r in A:
                r[j], r[k] = r[k], r[j]
            for r in V:
                r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        A[dst] = [x + q * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]
        for r in Ui:
            r[src] -= q * r[dst]

    def add_col(dst, src, q):
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    for t in range(min(rows, cols)):
        while True:
            piv = _pick_pivot(A, t, rows, cols)
            if piv is None:
                break
            _, pi, pj = piv
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if A[i][t]:
                    q = A[i][t] // p
                    add_row(i, t, -q)
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, cols):
                if A[t][j]:
                    q = A[t][j] // p
                    add_col(j, t, -q)
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
            for r in Ui:
                r[t] = -r[t]

    d = [A[i][i] for i in range(min(rows, cols))]
    return SmithForm(d, IntMatrix.from_rows(U, cols=rows), IntMatrix.from_rows(V, cols=cols),
                     IntMatrix.from_rows(Ui, cols=rows))


def rank(m: IntMatrix) -> int:
    return smith_normal_form(m).rank


class Cokernel(NamedTuple):
    torsion: list[int]
    free_rank: int


def cokernel_invariants(m: IntMatrix) -> Cokernel:
    """Invariant factors > 1 of Z^rows / m(Z^cols), and its free rank."""
    snf = smith_normal_form(m)
    return Cokernel([x for x in snf.d if x > 1], m.rows - snf.rank)


def _hermite_rows(vectors: list[list[int]]) -> list[list[int]]:
    # Row echelon form over Z with positive pivots and reduced entries above pivots.
    B = [list(v) for v in vectors]
    if not B:
        return B
    n = len(B[0])
    out_row = 0
    for col in range(n):
        while True:
            nz = [i for i in range(out_row, len(B)) if B[i][col]]
            if not nz:
                break
            k = min(nz, key=lambda i: (abs(B[i][col]), i))
            B[out_row], B[k] = B[k], B[out_row]
            done = True
            for i in range(out_row + 1, len(B)):
                if B[i][col]:
                    q = B[i][col] // B[out_row][col]
                    B[i] = [x - q * y for x, y in zip(B[i], B[out_row])]
                    done = done and B[i][col] == 0
            if done:
                break
        if out_row < len(B) and B[out_row][col]:
            if B[out_row][col] < 0:
                B[out_row] = [-x for x in B[out_row]]
            p = B[out_row][col]
            for i in range(out_row):
                q = B[i][col] // p
                if q:
                    B[i] = [x - q * y for x, y in zip(B[i], B[out_row])]
            out_row += 1
    return [r for r in B if any(r)]


def kernel_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of {x : m x = 0}, in Hermite (echelon) form."""
    snf = smith_normal_form(m)
    vcols = snf.V.columns()
    kernel = [vcols[j] for j in range(m.cols) if j >= len(snf.d) or snf.d[j] == 0]
    basis = _hermite_rows(kernel)
    return IntMatrix.from_columns(basis, m.cols)


def image_basis(m: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of the column lattice m(Z^cols), in Hermite form."""
    snf = smith_normal_form(m)
    ucols = snf.U_inv.columns()
    gens = [[snf.d[j] * x for x in ucols[j]] for j in range(len(snf.d)) if snf.d[j]]
    return IntMatrix.from_columns(_hermite_rows(gens), m.rows)


def determinant(m: IntMatrix) -> int:
    if m.rows != m.cols:
        raise ArityError("determinant of a non-square matrix")
    n = m.rows
    A = m.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class GroupAction:
    """A finite group of invertible integer matrices acting on Z^rank.

    ``elements`` is an exhaustive list; closure is validated on construction.
    """
    rank: int
    generators: tuple[IntMatrix, ...]
    elements: tuple[IntMatrix, ...]

    def __post_init__(self):
        index = {}
        for g in self.elements:
            if (g.rows, g.cols) != (self.rank, self.rank):
                raise ArityError(f"group element is {g.rows}x{g.cols}, expected {self.rank}x{self.rank}")
            if abs(determinant(g)) != 1:
                raise DomainError("group element is not invertible over Z")
            index[g.key()] = len(index)
        if len(index) != len(self.elements):
            raise ClosureError("duplicate group elements")
        if IntMatrix.identity(self.rank).key() not in index:
            raise ClosureError("element list does not contain the identity")
        for g in self.generators:
            if g.key() not in index:
                raise ClosureError("generator missing from element list")
        for g in self.elements:
            for h in self.elements:
                if (g @ h).key() not in index:
                    raise ClosureError("element list is not closed under multiplication")
        object.__setattr__(self, "_index", index)

    @classmethod
    def generated_by(cls, rank: int, generators: Iterable[IntMatrix], limit: int = 5000) -> GroupAction:
        gens = tuple(generators)
        for g in gens:
            if (g.rows, g.cols) != (rank, rank):
                raise ArityError(f"generator is {g.rows}x{g.cols}, expected {rank}x{rank}")
            if abs(determinant(g)) != 1:
                raise DomainError("generator is not invertible over Z")
        ident = IntMatrix.identity(rank)
        seen = {ident.key(): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = s @ g
                    if h.key() not in seen:
                        seen[h.key()] = h
                        nxt.append(h)
                        if len(seen) > limit:
                            raise ClosureError(f"generated group exceeds {limit} elements")
            frontier = nxt
        elements = sorted(seen.values(), key=lambda g: (g.key() != ident.key(), g.key()))
        return cls(rank, gens, tuple(elements))

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, g: IntMatrix) -> int:
        try:
            return self._index[g.key()]
        except KeyError:
            raise ClosureError("matrix is not an element of the group") from None

    def identity_index(self) -> int:
        return self.index_of(IntMatrix.identity(self.rank))

    def check_subgroup(self, subgroup: Sequence[int]) -> None:
        idx = set(subgroup)
        for i in idx:
            if not 0 <= i < self.order:
                raise ClosureError(f"subgroup index {i} out of range")
        if self.identity_index() not in idx:
            raise ClosureError("subgroup does not contain the identity")
        for i in idx:
            for j in idx:
                if self.index_of(self.elements[i] @ self.elements[j]) not in idx:
                    raise ClosureError("subgroup is not closed under multiplication")

    def trace_matrix(self) -> IntMatrix:
        out = IntMatrix.zeros(self.rank, self.rank)
        for g in self.elements:
            out = IntMatrix(self.rank, self.rank, tuple(x + y for x, y in zip(out.entries, g.entries)))
        return out

    def fixed_lattice(self, subgroup: Sequence[int] | None = None) -> IntMatrix:
        """Basis (columns) of the sublattice fixed by the given elements."""
        idx = range(self.order) if subgroup is None else subgroup
        ident = IntMatrix.identity(self.rank)
        blocks = [self.elements[i] - ident for i in idx]
        if not blocks:
            return ident
        return kernel_basis(vstack(blocks, self.rank))


def fixed_space_rank(a: GroupAction, subgroup: Sequence[int]) -> int:
    """dim over Q of the common fixed space of the listed elements."""
    a.check_subgroup(subgroup)
    ident = IntMatrix.identity(a.rank)
    stacked = vstack([a.elements[i] - ident for i in sorted(set(subgroup))], a.rank)
    return a.rank - rank(stacked)
