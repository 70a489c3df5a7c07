"""Exact rank computation over the integers (fraction-free elimination).

Rank decisions for syzygy kernels must not depend on floating-point
thresholds, so the elimination below runs the Bareiss scheme: every division
is exact, entries stay integers, and Python integers never overflow.
"""

from __future__ import annotations


def integer_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix via fraction-free Gaussian elimination."""
    m = [list(map(int, row)) for row in rows]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev_pivot = 1
    piv_row = 0
    for col in range(n_cols):
        pivot = None
        for i in range(piv_row, n_rows):
            if m[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        m[piv_row], m[pivot] = m[pivot], m[piv_row]
        p = m[piv_row][col]
        for i in range(piv_row + 1, n_rows):
            if m[i][col] == 0 and p == prev_pivot:
                continue
            for j in range(col + 1, n_cols):
                m[i][j] = (p * m[i][j] - m[i][col] * m[piv_row][j]) // prev_pivot
            m[i][col] = 0
        prev_pivot = p
        piv_row += 1
        rank += 1
        if piv_row == n_rows:
            break
    return rank
