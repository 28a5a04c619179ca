"""
Exact linear algebra over Z/p^k.

Z/p^k is a local ring, so every matrix has a Smith form whose diagonal
entries are powers of p. Lengths of images and kernels, solvability of
linear systems and ranks over F_p all come from that form. Matrices are
numpy arrays of dtype=object holding Python ints, so nothing overflows.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from src.hecke.core.errors import InputError

logger = logging.getLogger(__name__)


def as_matrix(rows, n_cols: Optional[int] = None) -> np.ndarray:
    """Object-dtype matrix from nested sequences; n_cols fixes the shape of empty input"""
    if isinstance(rows, np.ndarray):
        return rows.astype(object)
    rows = [list(r) for r in rows]
    if not rows:
        return np.zeros((0, n_cols or 0), dtype=object)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError("ragged matrix")
    matrix = np.empty((len(rows), width), dtype=object)
    for i, row in enumerate(rows):
        for j, value in enumerate(row):
            matrix[i, j] = int(value)
    return matrix


def zeros(n_rows: int, n_cols: int) -> np.ndarray:
    matrix = np.empty((n_rows, n_cols), dtype=object)
    matrix.fill(0)
    return matrix


def identity(n: int) -> np.ndarray:
    matrix = zeros(n, n)
    for i in range(n):
        matrix[i, i] = 1
    return matrix


def mat_mul(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    if a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    return np.dot(a, b) % modulus


def _valuation(a: int, p: int) -> int:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


@dataclass
class SmithForm:
    """U * A * V = D with D diagonal, D[t, t] = p^valuations[t]"""
    valuations: List[int]
    U: np.ndarray
    V: np.ndarray
    p: int
    k: int

    @property
    def modulus(self) -> int:
        return self.p ** self.k

    @property
    def invariant_factors(self) -> List[int]:
        return [self.p ** v for v in self.valuations]


def smith_form(matrix, p: int, k: int) -> SmithForm:
    """Smith normal form over Z/p^k with transforms"""
    mod = p ** k
    A = as_matrix(matrix) % mod
    m, n = A.shape
    U = identity(m)
    V = identity(n)
    valuations: List[int] = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                a = A[i, j]
                if a == 0:
                    continue
                v = _valuation(a, p)
                if best is None or v < best[0]:
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        if i != t:
            A[[t, i], :] = A[[i, t], :]
            U[[t, i], :] = U[[i, t], :]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]
        pv = p ** v
        inv = pow(A[t, t] // pv, -1, mod)
        A[t, :] = (A[t, :] * inv) % mod
        U[t, :] = (U[t, :] * inv) % mod
        for i in range(m):
            if i != t and A[i, t] != 0:
                f = A[i, t] // pv
                A[i, :] = (A[i, :] - f * A[t, :]) % mod
                U[i, :] = (U[i, :] - f * U[t, :]) % mod
        for j in range(n):
            if j != t and A[t, j] != 0:
                f = A[t, j] // pv
                A[:, j] = (A[:, j] - f * A[:, t]) % mod
                V[:, j] = (V[:, j] - f * V[:, t]) % mod
        valuations.append(v)
        t += 1
    return SmithForm(valuations=valuations, U=U, V=V, p=p, k=k)


def image_length(matrix, p: int, k: int) -> int:
    """Composition length of the column span of matrix in (Z/p^k)^m"""
    return sum(k - v for v in smith_form(matrix, p, k).valuations)


def kernel_length(matrix, p: int, k: int) -> int:
    A = as_matrix(matrix)
    return A.shape[1] * k - image_length(A, p, k)


def is_surjective(matrix, p: int, k: int) -> bool:
    A = as_matrix(matrix)
    return image_length(A, p, k) == A.shape[0] * k


def rank_mod_p(matrix, p: int) -> int:
    return len(smith_form(matrix, p, 1).valuations)


def solve(matrix, rhs: Sequence[int], p: int, k: int) -> Optional[List[int]]:
    """Some x with matrix @ x = rhs mod p^k, or None"""
    A = as_matrix(matrix)
    mod = p ** k
    m, n = A.shape
    if len(rhs) != m:
        raise InputError(f"right-hand side has length {len(rhs)}, expected {m}")
    form = smith_form(A, p, k)
    b = as_matrix([[int(x) % mod] for x in rhs], 1)
    c = mat_mul(form.U, b, mod)[:, 0] if m else []
    y = [0] * n
    for t, v in enumerate(form.valuations):
        pv = p ** v
        if c[t] % pv != 0:
            return None
        y[t] = c[t] // pv
    for t in range(len(form.valuations), m):
        if c[t] % mod != 0:
            return None
    if n == 0:
        return []
    x = mat_mul(form.V, as_matrix([[v] for v in y], 1), mod)[:, 0]
    return [int(v) for v in x]


def homology_length(d_in, d_out, n: int, p: int, k: int) -> int:
    """Length of ker(d_out)/im(d_in) at a term of rank n over Z/p^k"""
    out_len = image_length(d_out, p, k) if as_matrix(d_out, n).size else 0
    in_len = image_length(d_in, p, k) if as_matrix(d_in).size else 0
    return n * k - out_len - in_len
