"""Dense exact vectors and matrices over cyclotomic numbers.

Rank is computed by fraction-free (Bareiss) elimination.  Matrices whose
entries are all rational go through a plain integer path; general entries
are scaled into Z[zeta_n] and the exact division by the previous pivot is
done with its norm and adjugate (product of the other Galois conjugates).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .cyclo import Cyclotomic, _field, format_cyclo, parse_cyclo

__all__ = [
    "ExactVector",
    "ExactMatrix",
    "as_cyclo",
    "inner",
    "kron",
    "exact_rank",
    "integer_rank",
    "integer_spectrum",
    "common_conductor",
]

_ZERO = Cyclotomic.zero()
_ONE = Cyclotomic.one()


def as_cyclo(x) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, str):
        return parse_cyclo(x)
    return Cyclotomic.rational(x)


class ExactVector:
    __slots__ = ("entries",)

    def __init__(self, entries: Iterable):
        self.entries = tuple(as_cyclo(x) for x in entries)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        if not isinstance(other, ExactVector):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def scale(self, c) -> "ExactVector":
        c = as_cyclo(c)
        return ExactVector(c * x for x in self.entries)

    def __add__(self, other: "ExactVector") -> "ExactVector":
        _check_len(self, other)
        return ExactVector(a + b for a, b in zip(self.entries, other.entries))

    def __sub__(self, other: "ExactVector") -> "ExactVector":
        _check_len(self, other)
        return ExactVector(a - b for a, b in zip(self.entries, other.entries))

    def norm_sq(self) -> Cyclotomic:
        return inner(self, self)

    def to_complex(self) -> list[complex]:
        return [complex(x) for x in self.entries]

    def to_json(self) -> list[str]:
        return [format_cyclo(x) for x in self.entries]

    def __repr__(self):
        return "ExactVector(" + ", ".join(format_cyclo(x) for x in self.entries) + ")"


def _check_len(u, v):
    if len(u) != len(v):
        raise ValueError(f"shape mismatch: {len(u)} vs {len(v)}")


def inner(u: ExactVector, v: ExactVector) -> Cyclotomic:
    """sum_k conj(u_k) v_k."""
    _check_len(u, v)
    acc = _ZERO
    for a, b in zip(u.entries, v.entries):
        if a and b:
            acc = acc + a.conjugate() * b
    return acc


class ExactMatrix:
    """Row-major dense matrix of Cyclotomic entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: Sequence[Sequence]):
        data = tuple(tuple(as_cyclo(x) for x in r) for r in rows)
        if not data or any(len(r) != len(data[0]) for r in data):
            raise ValueError("matrix rows must be non-empty and of equal length")
        self.data = data
        self.rows = len(data)
        self.cols = len(data[0])

    @classmethod
    def identity(cls, n: int, scale=1) -> "ExactMatrix":
        s = as_cyclo(scale)
        return cls([[s if i == j else _ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> "ExactMatrix":
        return cls([[_ZERO] * c for _ in range(r)])

    @classmethod
    def outer(cls, u: ExactVector, v: ExactVector) -> "ExactMatrix":
        """|u><v|."""
        vc = [b.conjugate() for b in v.entries]
        return cls([[a * b for b in vc] for a in u.entries])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._same_shape(other)
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)])

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def scale(self, c) -> "ExactMatrix":
        c = as_cyclo(c)
        return ExactMatrix([[c * x for x in r] for r in self.data])

    def __matmul__(self, other):
        if isinstance(other, ExactVector):
            if self.cols != other.dim:
                raise ValueError(f"shape mismatch: {self.shape} @ {other.dim}")
            return ExactVector(_dot_sparse(r, other.entries) for r in self.data)
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        ocols = list(zip(*other.data))
        return ExactMatrix([[_dot_sparse(r, c) for c in ocols] for r in self.data])

    def adjoint(self) -> "ExactMatrix":
        return ExactMatrix([[x.conjugate() for x in col] for col in zip(*self.data)])

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(list(zip(*self.data)))

    def trace(self) -> Cyclotomic:
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        acc = _ZERO
        for i in range(self.rows):
            acc = acc + self.data[i][i]
        return acc

    def is_hermitian(self) -> bool:
        return self.rows == self.cols and self == self.adjoint()

    def scalar_multiple_of_identity(self) -> Cyclotomic | None:
        """lambda if self == lambda * I, else None."""
        if self.rows != self.cols:
            return None
        lam = self.data[0][0]
        for i, r in enumerate(self.data):
            for j, x in enumerate(r):
                if (i == j and x != lam) or (i != j and x):
                    return None
        return lam

    def to_complex(self) -> list[list[complex]]:
        return [[complex(x) for x in r] for r in self.data]

    def to_json(self) -> list[list[str]]:
        return [[format_cyclo(x) for x in r] for r in self.data]

    @classmethod
    def from_json(cls, rows) -> "ExactMatrix":
        return cls([[parse_cyclo(x) if isinstance(x, str) else x for x in r] for r in rows])

    def __repr__(self):
        return f"ExactMatrix({self.to_json()!r})"


def _dot_sparse(a: Sequence[Cyclotomic], b: Sequence[Cyclotomic]) -> Cyclotomic:
    acc = _ZERO
    for x, y in zip(a, b):
        if x and y:
            acc = acc + x * y
    return acc


def kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    rows = []
    for ra in a.data:
        for rb in b.data:
            rows.append([x * y for x in ra for y in rb])
    return ExactMatrix(rows)


# -- rank ------------------------------------------------------------------------


def common_conductor(values: Iterable[Cyclotomic]) -> int:
    n = 1
    for v in values:
        if v:
            n = math.lcm(n, v.canonical().n)
    return n


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Exact rank of an integer matrix (Bareiss fraction-free elimination)."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = None
        best = None
        for r in range(rank, nrows):
            x = m[r][c]
            if x and (best is None or abs(x) < best):
                piv, best = r, abs(x)
                if best == 1:
                    break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        prow = m[rank]
        p = prow[c]
        for r in range(rank + 1, nrows):
            row = m[r]
            f = row[c]
            if f:
                for k in range(c + 1, ncols):
                    row[k] = (p * row[k] - f * prow[k]) // prev
            else:
                for k in range(c + 1, ncols):
                    row[k] = (p * row[k]) // prev
            row[c] = 0
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def exact_rank(a: ExactMatrix) -> int:
    """Rank over Q(zeta_n) of an exact matrix."""
    flat = [x for r in a.data for x in r]
    if all(x.is_rational() for x in flat):
        dens = [x.den for x in flat]
        L = math.lcm(*dens) if dens else 1
        return integer_rank([[x.num[0] * (L // x.den) for x in r] for r in a.data])
    n = common_conductor(flat)
    return _cyclo_rank(a, n)


def _cyclo_rank(a: ExactMatrix, n: int) -> int:
    # Bareiss elimination over Z[zeta_n]: after clearing denominators every
    # entry is an algebraic integer, each step divides exactly by the
    # previous pivot, so entries stay minors of the input and never blow up.
    f = _field(n)
    phi, red = f.phi, f.red
    dens = [x.den for r in a.data for x in r if x]
    L = math.lcm(*dens) if dens else 1
    rows = []
    for r in a.data:
        row = [tuple(c * (L // x.den) for c in x.canonical().embed(n).num) if x else None for x in r]
        if any(x is not None for x in row):
            rows.append(row)

    def mul(x, y):
        raw = [0] * (2 * phi - 1)
        for i, p in enumerate(x):
            if p:
                for j, q in enumerate(y):
                    if q:
                        raw[i + j] += p * q
        out = raw[:phi]
        for k in range(phi, 2 * phi - 1):
            c = raw[k]
            if c:
                rr = red[k % n]
                for t in range(phi):
                    out[t] += c * rr[t]
        return out

    def is_rat(x):
        return not any(x[1:])

    ncols = a.cols
    nrows = len(rows)
    rank = 0
    # previous pivot as (adjugate coefficients or None, integer norm)
    prev_adj, prev_norm = None, 1
    for c in range(ncols):
        piv = None
        for r in range(rank, nrows):
            x = rows[r][c]
            if x is not None:
                if is_rat(x):
                    piv = r
                    break
                if piv is None:
                    piv = r
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        p = prow[c]

        def reduce(acc):
            # exact division of an algebraic integer by the previous pivot
            if prev_adj is not None:
                acc = mul(acc, prev_adj)
            if prev_norm != 1:
                acc = [v // prev_norm for v in acc]
            return tuple(acc) if any(acc) else None

        for r in range(rank + 1, nrows):
            row = rows[r]
            fv = row[c]
            new = [None] * ncols
            for k in range(c + 1, ncols):
                x, y = row[k], prow[k]
                acc = None
                if x is not None:
                    acc = mul(p, x)
                if fv is not None and y is not None:
                    t = mul(fv, y)
                    acc = [-v for v in t] if acc is None else [u - v for u, v in zip(acc, t)]
                if acc is not None:
                    new[k] = reduce(acc)
            rows[r] = new
        rank += 1
        pc = Cyclotomic(n, p)
        if is_rat(p):
            prev_adj, prev_norm = None, p[0]
            if prev_norm < 0:
                prev_adj, prev_norm = [-1] + [0] * (phi - 1), -prev_norm
        else:
            adj = Cyclotomic.one(n)
            for k in range(2, n):
                if math.gcd(k, n) == 1:
                    adj = adj * pc.galois(k)
            nrm = (adj * pc).to_fraction()
            adj_num = list(adj.num)
            # adj is integral; keep the norm positive
            if nrm < 0:
                adj_num, nrm = [-v for v in adj_num], -nrm
            assert adj.n == n and adj.den == 1 and nrm.denominator == 1
            prev_adj, prev_norm = adj_num, int(nrm)
    return rank


# -- integer eigenvalue multiplicities --------------------------------------------


def integer_spectrum(adj: ExactMatrix | Sequence[Sequence[int]], candidates: Iterable[int]) -> dict:
    """Exact multiplicities of integer candidate eigenvalues of a symmetric integer matrix.

    Returns a dict with ``multiplicities`` (eigenvalue -> multiplicity, only
    nonzero ones), ``dimension``, ``accounted`` and ``residual`` (dimension
    carried by eigenvalues outside the candidate list).
    """
    if isinstance(adj, ExactMatrix):
        if not all(x.is_rational() and x.den == 1 for r in adj.data for x in r):
            raise ValueError("integer_spectrum needs integer entries")
        M = [[x.num[0] for x in r] for r in adj.data]
    else:
        M = [list(map(int, r)) for r in adj]
    dim = len(M)
    if any(len(r) != dim for r in M):
        raise ValueError("adjacency matrix must be square")
    for i in range(dim):
        for j in range(i + 1, dim):
            if M[i][j] != M[j][i]:
                raise ValueError("adjacency matrix must be symmetric")
    mult = {}
    accounted = 0
    for lam in sorted(set(int(c) for c in candidates), reverse=True):
        if accounted == dim:
            # the spectrum is exhausted, remaining candidates have multiplicity 0
            break
        shifted = [[M[i][j] - (lam if i == j else 0) for j in range(dim)] for i in range(dim)]
        m = dim - integer_rank(shifted)
        if m:
            mult[lam] = m
            accounted += m
    return {
        "multiplicities": mult,
        "dimension": dim,
        "accounted": accounted,
        "residual": dim - accounted,
    }
