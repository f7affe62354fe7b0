"""
Exact integer linear algebra for moment-cone data.

All values are Python ints (arbitrary precision). Determinant, rank and
rational solves go through sympy's DomainMatrix, and the Smith normal form
with its unimodular transforms comes from sympy's smith_normal_decomp.
"""

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy.core.intfunc import igcdex
from sympy.polys.domains import ZZ, QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from contact_pi1.src.errors import BadDimension, InvalidInputError, NotPrimitive, NotSquare, ZeroVector
from contact_pi1.utils.logger import get_logger

IntVector = Tuple[int, ...]

logger = get_logger("lattice")


@dataclass(frozen=True)
class IntMatrix:
    """Row-major integer matrix. Zero rows or columns are allowed."""

    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0 or self.rows * self.cols != len(self.entries):
            raise BadDimension(
                f"{self.rows}x{self.cols} matrix cannot hold {len(self.entries)} entries"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in row) for row in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(row) != cols for row in rows):
            raise BadDimension("rows have different lengths")
        return cls(len(rows), cols, tuple(x for row in rows for x in row))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: Optional[int] = None) -> "IntMatrix":
        columns = [tuple(int(x) for x in column) for column in columns]
        if rows is None:
            rows = len(columns[0]) if columns else 0
        if any(len(column) != rows for column in columns):
            raise BadDimension("columns have different lengths")
        return cls.from_rows([[column[i] for column in columns] for i in range(rows)], cols=len(columns))

    @classmethod
    def identity(cls, size: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(size)] for i in range(size)], cols=size)

    @classmethod
    def diagonal_matrix(cls, values: Sequence[int]) -> "IntMatrix":
        size = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(size)] for i in range(size)], cols=size)

    def __getitem__(self, key: Tuple[int, int]) -> int:
        i, j = key
        return self.entries[i * self.cols + j]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def row(self, i: int) -> IntVector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> IntVector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> List[IntVector]:
        return [self.column(j) for j in range(self.cols)]

    def diagonal(self) -> IntVector:
        return tuple(self[i, i] for i in range(min(self.rows, self.cols)))

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.column(j) for j in range(self.cols)], cols=self.rows)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise BadDimension(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
            other_columns = other.columns()
            return IntMatrix.from_rows(
                [[dot(self.row(i), column) for column in other_columns] for i in range(self.rows)],
                cols=other.cols,
            )
        vector = tuple(other)
        if len(vector) != self.cols:
            raise BadDimension(f"cannot apply {self.rows}x{self.cols} matrix to a vector of length {len(vector)}")
        return tuple(dot(self.row(i), vector) for i in range(self.rows))


@dataclass(frozen=True)
class SmithDecomposition:
    """U·A·V = S with U, V unimodular and S diagonal with d1 | d2 | ..."""

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix

    @property
    def invariants(self) -> IntVector:
        return self.S.diagonal()

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariants if d != 0)


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group Z^free_rank + Z/t1 + Z/t2 + ... with t1 | t2 | ..."""

    free_rank: int = 0
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        if self.free_rank < 0:
            raise InvalidInputError(f"negative free rank {self.free_rank}")
        if any(t < 2 for t in self.torsion):
            raise InvalidInputError(f"torsion entries must be at least 2, got {self.torsion}")
        for smaller, larger in zip(self.torsion, self.torsion[1:]):
            if larger % smaller:
                raise InvalidInputError(f"torsion {self.torsion} is not a divisibility chain")

    @classmethod
    def trivial(cls) -> "AbelianGroup":
        return cls()

    @classmethod
    def free(cls, rank: int) -> "AbelianGroup":
        return cls(free_rank=rank)

    @classmethod
    def cyclic(cls, order: int) -> "AbelianGroup":
        """Z/order; order 0 gives Z and order 1 the trivial group."""
        return cls.from_orders([order])

    @classmethod
    def from_orders(cls, orders: Iterable[int], free_rank: int = 0) -> "AbelianGroup":
        """Canonical form of Z^free_rank + sum of Z/o for o in orders (o = 0 means Z)."""
        orders = [abs(int(o)) for o in orders]
        if not orders:
            return cls(free_rank=free_rank)
        quotient = cokernel(IntMatrix.diagonal_matrix(orders))
        return cls(free_rank=quotient.free_rank + free_rank, torsion=quotient.torsion)

    def direct_sum(self, other: "AbelianGroup") -> "AbelianGroup":
        return AbelianGroup.from_orders(self.torsion + other.torsion, self.free_rank + other.free_rank)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_cyclic(self) -> bool:
        return self.free_rank + len(self.torsion) <= 1

    @property
    def order(self) -> Optional[int]:
        if not self.is_finite:
            return None
        return reduce(lambda a, b: a * b, self.torsion, 1)

    def render(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.render()

    @classmethod
    def parse(cls, text: str) -> "AbelianGroup":
        """Inverse of render(); accepts any order of summands."""
        text = text.strip()
        if text == "0":
            return cls.trivial()
        orders: List[int] = []
        free_rank = 0
        for part in text.split("+"):
            part = part.strip().replace(" ", "")
            if part == "Z":
                free_rank += 1
            elif part.startswith("Z^"):
                free_rank += int(part[2:])
            elif part.startswith("Z/"):
                orders.append(int(part[2:]))
            else:
                raise InvalidInputError(f"cannot parse group summand '{part}'")
        return cls.from_orders(orders, free_rank)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def gcd_all(xs: Iterable[int]) -> int:
    """gcd of absolute values; 0 for an empty or all-zero list."""
    return reduce(math.gcd, (abs(int(x)) for x in xs), 0)


def primitive_part(v: Sequence[int]) -> Tuple[IntVector, int]:
    """Split v = g·p with p primitive, direction preserved."""
    g = gcd_all(v)
    if g == 0:
        raise ZeroVector("cannot take the primitive part of the zero vector", vector=tuple(v))
    return tuple(int(x) // g for x in v), g


def is_primitive(v: Sequence[int]) -> bool:
    return gcd_all(v) == 1


def _domain_matrix(A: IntMatrix, domain) -> DomainMatrix:
    return DomainMatrix([[domain(x) for x in row] for row in A.to_rows()], (A.rows, A.cols), domain)


def det(A: IntMatrix) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    if not A.is_square:
        raise NotSquare(f"determinant of a {A.rows}x{A.cols} matrix", shape=(A.rows, A.cols))
    if A.rows == 0:
        return 1
    return int(_domain_matrix(A, ZZ).det())


def rank(A: IntMatrix) -> int:
    """Rank over the rationals."""
    if A.rows == 0 or A.cols == 0:
        return 0
    return int(_domain_matrix(A, QQ).rank())


def solve_exact(A: IntMatrix, rhs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    """Solve A·x = rhs over the rationals for a nonsingular square A."""
    if not A.is_square:
        raise NotSquare(f"cannot solve with a {A.rows}x{A.cols} matrix", shape=(A.rows, A.cols))
    b = DomainMatrix(
        [[QQ(Fraction(value).numerator, Fraction(value).denominator)] for value in rhs],
        (len(rhs), 1), QQ,
    )
    solution = _domain_matrix(A, QQ).lu_solve(b).to_Matrix()
    return tuple(Fraction(int(e.p), int(e.q)) for e in solution)


def _int_matrix(dM: DomainMatrix) -> IntMatrix:
    rows, cols = dM.shape
    values = dM.to_Matrix()
    return IntMatrix.from_rows([[int(values[i, j]) for j in range(cols)] for i in range(rows)], cols=cols)


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """
    Smith normal form with transforms, from sympy's smith_normal_decomp over ZZ.

    The diagonal is made nonnegative (row signs of S and U flipped) and zero
    invariants are moved after the nonzero ones.

    Args:
        A: Integer matrix

    Returns:
        SmithDecomposition with U·A·V = S
    """
    m, n = A.rows, A.cols
    decomposition = smith_normal_decomp(_domain_matrix(A, ZZ))
    S, U, V = (_int_matrix(part).to_rows() for part in decomposition)

    for i in range(min(m, n)):
        if S[i][i] < 0:
            S[i] = [-x for x in S[i]]
            U[i] = [-x for x in U[i]]

    diagonal = [S[i][i] for i in range(min(m, n))]
    order = [i for i, d in enumerate(diagonal) if d] + [i for i, d in enumerate(diagonal) if not d]
    if order != list(range(len(order))):
        row_order = order + list(range(len(order), m))
        column_order = order + list(range(len(order), n))
        S = [[S[i][j] for j in column_order] for i in row_order]
        U = [U[i] for i in row_order]
        V = [[row[j] for j in column_order] for row in V]

    return SmithDecomposition(
        S=IntMatrix.from_rows(S, cols=n),
        U=IntMatrix.from_rows(U, cols=m),
        V=IntMatrix.from_rows(V, cols=n),
    )


def cokernel(A: IntMatrix) -> AbelianGroup:
    """Z^rows modulo the column span of A."""
    snf = smith_normal_form(A)
    torsion = tuple(d for d in snf.invariants if d > 1)
    return AbelianGroup(free_rank=A.rows - snf.rank, torsion=torsion)


def kernel_basis(A: IntMatrix) -> List[IntVector]:
    """Basis of the saturated lattice {x in Z^cols : A·x = 0}."""
    snf = smith_normal_form(A)
    return [_positive_leading(snf.V.column(j)) for j in range(snf.rank, A.cols)]


def _positive_leading(v: Sequence[int]) -> IntVector:
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def _hermite_column(vector: Sequence[int]) -> List[List[int]]:
    """Unimodular H (as rows) with H·vector = (g, 0, ..., 0), g = gcd >= 0."""
    size = len(vector)
    H = IntMatrix.identity(size).to_rows()
    v = [int(x) for x in vector]
    for i in range(1, size):
        a, b = v[0], v[i]
        if b == 0:
            continue
        x, y, g = (int(value) for value in igcdex(a, b))
        # [[x, y], [-b/g, a/g]] has determinant 1
        row0 = [x * p + y * q for p, q in zip(H[0], H[i])]
        rowi = [(-b // g) * p + (a // g) * q for p, q in zip(H[0], H[i])]
        H[0], H[i] = row0, rowi
        v[0], v[i] = g, 0
    if v[0] < 0:
        H[0] = [-x for x in H[0]]
    return H


def complete_to_unimodular(R: Sequence[int]) -> IntMatrix:
    """
    Unimodular A with A·R equal to the last standard basis vector.

    Args:
        R: Primitive integer vector of length n+1

    Returns:
        A with det A = +1 (for n+1 >= 2) and A·R = e_{n+1}
    """
    R = tuple(int(x) for x in R)
    if gcd_all(R) != 1:
        raise NotPrimitive(f"{R} is not primitive (gcd {gcd_all(R)})", vector=R)
    size = len(R)
    if R == tuple(int(i == size - 1) for i in range(size)):
        return IntMatrix.identity(size)

    H = _hermite_column(R)
    rows = H[1:] + H[:1]
    if size >= 2 and det(IntMatrix.from_rows(rows)) < 0:
        rows[0] = [-x for x in rows[0]]
    A = IntMatrix.from_rows(rows)
    logger.debug(f"Completed {R} to a unimodular matrix")
    return A


def unimodular_inverse(A: IntMatrix) -> IntMatrix:
    """Integer inverse of a matrix with determinant +1 or -1."""
    d = det(A)
    if abs(d) != 1:
        raise InvalidInputError(f"matrix is not unimodular (det {d})", determinant=d)
    if A.rows == 0:
        return A
    inverse = _domain_matrix(A, QQ).inv().to_Matrix()
    return IntMatrix.from_rows(
        [[int(inverse[i, j]) for j in range(A.cols)] for i in range(A.rows)], cols=A.cols
    )


ElementaryOp = Tuple[int, int, int]


def unimodular_from_ops(size: int, ops: Sequence[ElementaryOp]) -> IntMatrix:
    """Apply row_i += c·row_j for each (i, j, c) in order, starting from the identity."""
    rows = IntMatrix.identity(size).to_rows()
    for i, j, c in ops:
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return IntMatrix.from_rows(rows, cols=size)


def random_elementary_ops(size: int, rng: random.Random, max_ops: int = 12,
                          bound: int = 3) -> List[ElementaryOp]:
    """Between 1 and max_ops row additions with nonzero coefficients in [-bound, bound]."""
    if size < 2:
        return []
    ops = []
    for _ in range(rng.randint(1, max_ops)):
        i, j = rng.sample(range(size), 2)
        c = rng.choice([x for x in range(-bound, bound + 1) if x])
        ops.append((i, j, c))
    return ops


def random_unimodular(size: int, rng: random.Random) -> IntMatrix:
    return unimodular_from_ops(size, random_elementary_ops(size, rng))
