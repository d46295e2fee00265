"""Exact linear algebra over integers and rationals.

Matrices are tuples of row tuples.  Everything here is small (matrices are
(d+1) x (d+1) with d <= 3 in practice) so clarity wins over asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = tuple[tuple, ...]
Vector = tuple


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m, p = len(a), len(b), len(b[0])
    assert len(a[0]) == m
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p))
        for i in range(n)
    )


def mat_vec(a: Matrix, v: Sequence) -> Vector:
    return tuple(sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a)))


def transpose(a: Matrix) -> Matrix:
    return tuple(tuple(a[i][j] for i in range(len(a))) for j in range(len(a[0])))


def mat_pow(a: Matrix, k: int) -> Matrix:
    result = identity(len(a))
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def determinant(a: Matrix) -> Fraction:
    """Fraction-free-ish Gaussian elimination; exact for int/Fraction entries."""
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col]:
                factor = m[r][col] * inv
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return det


def adjugate(a: Matrix) -> Matrix:
    """Adjugate matrix (transpose of cofactors); exact."""
    n = len(a)

    def minor(i, j):
        sub = tuple(
            tuple(a[r][c] for c in range(n) if c != j) for r in range(n) if r != i
        )
        return determinant(sub)

    adj = tuple(
        tuple((-1) ** (i + j) * minor(j, i) for j in range(n)) for i in range(n)
    )
    return adj


def inverse_unimodular(a: Matrix) -> Matrix:
    """Exact integer inverse of a matrix with det = +-1."""
    det = determinant(a)
    if abs(det) != 1:
        raise ValueError(f"matrix is not unimodular (det={det})")
    sign = 1 if det == 1 else -1
    adj = adjugate(a)
    return tuple(tuple(int(sign * x) for x in row) for row in adj)


def mat_inv(a: Matrix) -> Matrix:
    """Exact rational inverse."""
    det = determinant(a)
    if det == 0:
        raise ValueError("singular matrix")
    adj = adjugate(a)
    return tuple(tuple(Fraction(x) / det for x in row) for row in adj)


def charpoly(a: Matrix) -> list[int]:
    """Characteristic polynomial det(XI - A) by Faddeev-LeVerrier.

    Returns coefficients [1, c1, ..., cn] so that the polynomial is
    X^n + c1 X^(n-1) + ... + cn.  Exact integers for integer input.
    """
    n = len(a)
    af = tuple(tuple(Fraction(x) for x in row) for row in a)
    coeffs = [Fraction(1)]
    m = identity(n)
    m = tuple(tuple(Fraction(x) for x in row) for row in m)
    for k in range(1, n + 1):
        m = mat_mul(af, m)
        c = -Fraction(sum(m[i][i] for i in range(n)), k)
        coeffs.append(c)
        m = tuple(
            tuple(m[i][j] + (c if i == j else 0) for j in range(n)) for i in range(n)
        )
    out = []
    for c in coeffs:
        if c.denominator != 1:
            raise ArithmeticError("non-integer characteristic coefficient")
        out.append(int(c))
    return out


def poly_eval(coeffs: Sequence, x):
    """Evaluate polynomial with coefficients [c0, c1, ..., cn] (c0 leading)."""
    acc = coeffs[0] * 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def det_cofactor(a: Matrix):
    """Recursive cofactor determinant; works for any commutative ring
    elements supporting +, -, * (Fractions, intervals, mpmath floats)."""
    n = len(a)
    if n == 1:
        return a[0][0]
    total = None
    for j in range(n):
        sub = tuple(tuple(row[c] for c in range(n) if c != j) for row in a[1:])
        term = a[0][j] * det_cofactor(sub)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def adjugate_generic(a: Matrix) -> Matrix:
    """Ring-agnostic adjugate via cofactors (small n only)."""
    n = len(a)
    if n == 1:
        raise ValueError("adjugate of 1x1 matrix is [[1]] in the ring; unsupported")

    def minor(i, j):
        sub = tuple(
            tuple(a[r][c] for c in range(n) if c != j) for r in range(n) if r != i
        )
        return det_cofactor(sub)

    return tuple(
        tuple(minor(j, i) if (i + j) % 2 == 0 else -minor(j, i) for j in range(n))
        for i in range(n)
    )


def is_positive(a: Matrix) -> bool:
    return all(x > 0 for row in a for x in row)


def column_norms(a: Matrix) -> Vector:
    return tuple(sum(abs(a[i][j]) for i in range(len(a))) for j in range(len(a[0])))
