"""Exact dense linear algebra over prime fields.

Everything here works on numpy int64 arrays with entries reduced mod p and
produces bit-identical results for identical inputs: pivots are chosen as the
lowest column first, then the lowest row.  For p = 2 the row reduction runs on
bit-packed uint64 words, which is what makes the larger homological
computations practical; the packed path and the generic path agree entry for
entry and the tests pin that.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, PolyrepError


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


class FieldSpec:
    """A prime field F_p.  Mostly a validated wrapper around the integer p."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise PolyrepError("field order must be prime, got %r" % (p,))
        self.p = int(p)
        # inverse table, index k holds k^-1 for 1 <= k < p
        inv = [0] * p
        for k in range(1, p):
            inv[k] = pow(k, p - 2, p)
        self._inv = inv

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_%d" % self.p)
        return self._inv[a]

    def __repr__(self):
        return "FieldSpec(%d)" % self.p


def asmod(a, p: int) -> np.ndarray:
    out = np.asarray(a, dtype=np.int64) % p
    return out


def matmul(a, b, p: int) -> np.ndarray:
    """Exact product mod p.  Uses float64 BLAS when the bound allows."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[-1] != b.shape[0]:
        raise DimensionMismatch("matmul %r x %r" % (a.shape, b.shape))
    inner = a.shape[-1]
    # every partial sum must stay exactly representable in a double
    if inner * (p - 1) * (p - 1) < 2**52:
        c = np.dot(a.astype(np.float64), b.astype(np.float64))
        return np.asarray(np.rint(c), dtype=np.int64) % p
    return (a @ b) % p


# ---------------------------------------------------------------------------
# bit-packed GF(2)

def _pack2(a: np.ndarray) -> np.ndarray:
    """Rows of a 0/1 matrix into uint64 words, bit j of word w = column 64w+j."""
    rows, cols = a.shape
    nw = (cols + 63) // 64
    padded = np.zeros((rows, nw * 64), dtype=np.uint8)
    padded[:, :cols] = a.astype(np.uint8) & 1
    bits = padded.reshape(rows, nw, 8, 8)
    packed_bytes = np.packbits(bits, axis=-1, bitorder="little").reshape(rows, nw * 8)
    return packed_bytes.view(np.uint64).reshape(rows, nw)

def _unpack2(w: np.ndarray, cols: int) -> np.ndarray:
    rows, nw = w.shape
    by = w.reshape(rows, nw, 1).view(np.uint8).reshape(rows, nw * 8)
    bits = np.unpackbits(by, axis=-1, bitorder="little")
    return bits[:, :cols].astype(np.int64)


def _rref2(a: np.ndarray):
    rows, cols = a.shape
    w = _pack2(a)
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        word, bit = divmod(c, 64)
        colbits = (w[r:, word] >> np.uint64(bit)) & np.uint64(1)
        nz = np.nonzero(colbits)[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            w[[r, pr]] = w[[pr, r]]
        mask = ((w[:, word] >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        mask[r] = False
        if mask.any():
            w[mask] ^= w[r]
        pivots.append(c)
        r += 1
    return _unpack2(w, cols), pivots


def rref(a, p: int):
    """Reduced row echelon form.  Returns (R, pivot_columns)."""
    a = asmod(a, p)
    if a.ndim != 2:
        raise DimensionMismatch("rref expects a matrix")
    if a.shape[0] == 0 or a.shape[1] == 0:
        return a.copy(), []
    if p == 2:
        return _rref2(a)
    fld = FieldSpec(p)
    m = a.copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        m[r] = (m[r] * fld.inv(int(m[r, c]))) % p
        other = np.nonzero(m[:, c])[0]
        other = other[other != r]
        if other.size:
            m[other] = (m[other] - np.outer(m[other, c], m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a, p: int) -> int:
    return len(rref(a, p)[1])


def kernel_basis(a, p: int) -> np.ndarray:
    """Columns span the right kernel, canonical pivot/free-variable form."""
    a = asmod(a, p)
    rows, cols = a.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    r, piv = rref(a, p)
    free = [c for c in range(cols) if c not in set(piv)]
    out = np.zeros((cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        out[fc, j] = 1
        for i, pc in enumerate(piv):
            out[pc, j] = (-r[i, fc]) % p
    return out


def solve(a, b, p: int):
    """One solution of a x = b, or None.  b may be a matrix of column rhs."""
    a = asmod(a, p)
    b = asmod(b, p)
    single = b.ndim == 1
    if single:
        b = b[:, None]
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch("solve %r %r" % (a.shape, b.shape))
    aug = np.concatenate([a, b], axis=1)
    r, piv = rref(aug, p)
    n = a.shape[1]
    if any(c >= n for c in piv):
        return None
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = r[i, n:]
    return x[:, 0] if single else x


class Echelon:
    """Frozen echelonized spanning set supporting repeated membership tests
    and coordinate solves against the original generating columns."""

    def __init__(self, mat, p: int):
        mat = asmod(mat, p)
        self.p = p
        self.ambient = mat.shape[0]
        r, piv = rref(mat.T, p)
        self.basis = r[: len(piv)].T.copy()  # ambient x rank, rref rows as columns
        self.pivots = list(piv)
        self._pivset = set(piv)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def coords(self, v):
        """Coordinates of v in the echelon basis, or None if outside."""
        v = asmod(v, self.p)
        single = v.ndim == 1
        if single:
            v = v[:, None]
        c = v[self.pivots, :].copy()
        resid = (v - matmul(self.basis, c, self.p)) % self.p
        if np.any(resid):
            return None
        return c[:, 0] if single else c

    def contains(self, v) -> bool:
        return self.coords(v) is not None


def column_space(mat, p: int) -> np.ndarray:
    """Canonical basis (columns) of the column space."""
    e = Echelon(mat, p)
    return e.basis


def space_sum(a, b, p: int) -> np.ndarray:
    return column_space(np.concatenate([a, b], axis=1), p)


def space_intersect(a, b, p: int) -> np.ndarray:
    """Intersection of two column spaces via the kernel of [a | -b]."""
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=np.int64)
    stacked = np.concatenate([a, (-asmod(b, p)) % p], axis=1)
    k = kernel_basis(stacked, p)
    vecs = matmul(a, k[: a.shape[1], :], p)
    return column_space(vecs, p)


def spaces_equal(a, b, p: int) -> bool:
    ea, eb = Echelon(a, p), Echelon(b, p)
    if ea.dim != eb.dim or ea.pivots != eb.pivots:
        return False
    return np.array_equal(ea.basis, eb.basis)


class ExactMatrix:
    """Sparse integers-mod-p matrix used at construction and serialization
    boundaries.  Heavy arithmetic converts to dense numpy arrays."""

    __slots__ = ("p", "shape", "entries")

    def __init__(self, p: int, shape, entries=None):
        self.p = p
        self.shape = (int(shape[0]), int(shape[1]))
        self.entries = {}
        if entries:
            for (r, c), v in entries.items():
                v = int(v) % p
                if v:
                    self.entries[(int(r), int(c))] = v

    @classmethod
    def from_dense(cls, a, p: int):
        a = asmod(a, p)
        e = {}
        for r, c in zip(*np.nonzero(a)):
            e[(int(r), int(c))] = int(a[r, c])
        return cls(p, a.shape, e)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        for (r, c), v in self.entries.items():
            out[r, c] = v
        return out

    def items_sorted(self):
        return sorted(self.entries.items())

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.p == other.p
            and self.shape == other.shape
            and self.entries == other.entries
        )

    def __repr__(self):
        return "ExactMatrix(p=%d, shape=%r, nnz=%d)" % (self.p, self.shape, len(self.entries))
