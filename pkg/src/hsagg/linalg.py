"""Dense matrices over GF(q): construction, arithmetic, rank, seeded random generation.

Matrices are stored as numpy arrays. For moduli small enough that a product of
two residues fits in int64 the array dtype is int64 and all operations are
vectorized; for larger moduli (up to 2^61 - 1) entries are Python ints in an
object array, which is exact but slower.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .gf import FieldSpec, f_inv, f_pow

# Largest modulus for which (q-1)^2 fits comfortably in int64.
_INT64_SAFE_MODULUS = 3_037_000_499

# Identifier of the pseudo-random generator recorded in serialized schemes.
PRNG_ID = "numpy-pcg64"


class DimensionMismatch(ValueError):
    """Raised when operand shapes or fields are incompatible."""


def _dtype_for(field: FieldSpec):
    return np.int64 if field.modulus <= _INT64_SAFE_MODULUS else object


@dataclass(frozen=True)
class Mat:
    """An immutable rows x cols matrix over GF(q)."""

    field: FieldSpec
    array: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        a = self.array
        if a.ndim != 2:
            raise DimensionMismatch("matrix array must be 2-dimensional")
        a.setflags(write=False)

    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    def entry(self, r: int, c: int) -> int:
        return int(self.array[r, c])

    def entries(self) -> list[int]:
        """Row-major flat list of entries."""
        return [int(x) for x in self.array.reshape(-1)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return (
            self.field == other.field
            and self.array.shape == other.array.shape
            and bool(np.all(self.array == other.array))
        )

    def __hash__(self):
        return hash((self.field, self.array.shape, tuple(self.entries())))


def from_rows(field: FieldSpec, rows: Sequence[Sequence[int]]) -> Mat:
    n_rows = len(rows)
    n_cols = len(rows[0]) if n_rows else 0
    a = np.empty((n_rows, n_cols), dtype=_dtype_for(field))
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise DimensionMismatch("ragged row lengths")
        for j, x in enumerate(row):
            a[i, j] = x % field.modulus
    return Mat(field, a)


def from_flat(field: FieldSpec, rows: int, cols: int, entries: Iterable[int]) -> Mat:
    data = [x % field.modulus for x in entries]
    if len(data) != rows * cols:
        raise DimensionMismatch(f"expected {rows * cols} entries, got {len(data)}")
    a = np.array(data, dtype=_dtype_for(field)).reshape(rows, cols)
    return Mat(field, a)


def zeros(field: FieldSpec, rows: int, cols: int) -> Mat:
    return Mat(field, np.zeros((rows, cols), dtype=_dtype_for(field)))


def identity(field: FieldSpec, n: int) -> Mat:
    a = np.zeros((n, n), dtype=_dtype_for(field))
    for i in range(n):
        a[i, i] = 1
    return Mat(field, a)


def _check_same_field(a: Mat, b: Mat):
    if a.field != b.field:
        raise DimensionMismatch("operands live in different fields")


def mat_add(a: Mat, b: Mat) -> Mat:
    _check_same_field(a, b)
    if a.array.shape != b.array.shape:
        raise DimensionMismatch(f"shape {a.array.shape} vs {b.array.shape}")
    return Mat(a.field, (a.array + b.array) % a.field.modulus)


def mat_neg(a: Mat) -> Mat:
    return Mat(a.field, (-a.array) % a.field.modulus)


def mat_sum(mats: Sequence[Mat]) -> Mat:
    acc = mats[0]
    for m in mats[1:]:
        acc = mat_add(acc, m)
    return acc


def mat_vec(m: Mat, v: Mat) -> Mat:
    """Matrix-vector product over GF(q); v must be a column vector."""
    _check_same_field(m, v)
    if v.cols != 1 or m.cols != v.rows:
        raise DimensionMismatch(f"cannot multiply {m.rows}x{m.cols} by {v.rows}x{v.cols}")
    q = m.field.modulus
    if m.cols == 0:
        return zeros(m.field, m.rows, 1)
    if m.array.dtype == object or q * q * m.cols < (1 << 62):
        out = (m.array @ v.array) % q
    else:
        # Sum of int64 products could overflow; reduce column by column.
        acc = np.zeros(m.rows, dtype=np.int64)
        for k in range(m.cols):
            acc = (acc + m.array[:, k] * int(v.array[k, 0])) % q
        out = acc.reshape(-1, 1)
    return Mat(m.field, np.asarray(out))


def hstack(mats: Sequence[Mat]) -> Mat:
    for m in mats[1:]:
        _check_same_field(mats[0], m)
        if m.rows != mats[0].rows:
            raise DimensionMismatch("row counts differ in hstack")
    return Mat(mats[0].field, np.hstack([m.array for m in mats]))


def vstack(mats: Sequence[Mat]) -> Mat:
    for m in mats[1:]:
        _check_same_field(mats[0], m)
        if m.cols != mats[0].cols:
            raise DimensionMismatch("column counts differ in vstack")
    return Mat(mats[0].field, np.vstack([m.array for m in mats]))


def rank(m: Mat) -> int:
    """GF(q) rank by Gaussian elimination with division by the pivot.

    Pivot rule: within the current column, the first row (top to bottom) with
    a nonzero entry is chosen, which keeps the elimination deterministic.
    """
    q = m.field.modulus
    a = np.array(m.array, copy=True)
    n_rows, n_cols = a.shape
    r = 0
    for c in range(n_cols):
        pivot = None
        for i in range(r, n_rows):
            if a[i, c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        if pivot != r:
            a[[r, pivot], :] = a[[pivot, r], :]
        inv = f_inv(m.field, int(a[r, c]))
        a[r, :] = (a[r, :] * inv) % q
        below = a[r + 1 :, c]
        nz = np.nonzero(below)[0]
        if nz.size:
            rows = nz + r + 1
            a[rows, :] = (a[rows, :] - a[rows, c : c + 1] * a[r : r + 1, :]) % q
        r += 1
        if r == n_rows:
            break
    return r


def vandermonde_block(field: FieldSpec, bases: Sequence[int], start_exp: int, rows: int) -> Mat:
    """rows x len(bases) matrix with entry (r, c) = bases[c]^(start_exp + r)."""
    if rows < 1:
        raise DimensionMismatch("rows must be >= 1")
    out = [[f_pow(field, b, start_exp + r) for b in bases] for r in range(rows)]
    return from_rows(field, out)


def _flatten_seed(seed) -> tuple[int, ...]:
    if isinstance(seed, (tuple, list)):
        out: tuple[int, ...] = ()
        for part in seed:
            out += _flatten_seed(part)
        return out
    return (int(seed) & 0xFFFFFFFFFFFFFFFF,)  # SeedSequence wants non-negative words


def generator_from_seed(seed) -> np.random.Generator:
    """Deterministic PCG64 generator; seed may be an int or a (nested) tuple of ints."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(_flatten_seed(seed))))


def random_mat(rows: int, cols: int, field: FieldSpec, seed) -> Mat:
    """Uniform random matrix over GF(q), deterministic in the seed.

    numpy's Generator.integers draws bounded integers by rejection (Lemire),
    so entries are exactly uniform on [0, q-1].
    """
    gen = generator_from_seed(seed)
    a = gen.integers(0, field.modulus, size=(rows, cols), dtype=np.uint64).astype(np.int64)
    if _dtype_for(field) is object:
        a = a.astype(object)
    return Mat(field, a)
