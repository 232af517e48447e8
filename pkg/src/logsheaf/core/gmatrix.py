"""Matrices of homogeneous forms with twist data."""
from __future__ import annotations

from typing import List, Sequence

from .poly import HPoly


class GradedMatrix:
    """Entry (r, c) is zero or homogeneous of degree col_twists[c] - row_twists[r]."""

    def __init__(self, entries: Sequence[Sequence[HPoly]], row_twists: Sequence[int], col_twists: Sequence[int],
                 num_vars: int):
        self.entries: List[List[HPoly]] = [list(r) for r in entries]
        self.row_twists = list(row_twists)
        self.col_twists = list(col_twists)
        self.num_vars = num_vars
        if len(self.entries) != len(self.row_twists):
            raise ValueError("row count mismatch")
        for r, row in enumerate(self.entries):
            if len(row) != len(self.col_twists):
                raise ValueError("column count mismatch")
            for c, f in enumerate(row):
                if f is None:
                    row[c] = f = HPoly.zero(num_vars, 0)
                if f.coeffs and f.degree != self.col_twists[c] - self.row_twists[r]:
                    raise ValueError(f"entry ({r},{c}) has the wrong degree")

    @property
    def shape(self):
        return len(self.row_twists), len(self.col_twists)

    def entry_degree(self, r: int, c: int) -> int:
        return self.col_twists[c] - self.row_twists[r]

    def substitute(self, images: Sequence[HPoly]) -> "GradedMatrix":
        nv = images[0].num_vars
        out = []
        for r, row in enumerate(self.entries):
            new_row = []
            for c, f in enumerate(row):
                if f.coeffs:
                    new_row.append(f.substitute(images))
                else:
                    new_row.append(HPoly.zero(nv, max(self.entry_degree(r, c), 0)))
            out.append(new_row)
        return GradedMatrix(out, self.row_twists, self.col_twists, nv)

    def transpose(self) -> "GradedMatrix":
        rows, cols = self.shape
        ent = [[self.entries[r][c] for r in range(rows)] for c in range(cols)]
        return GradedMatrix(ent, [-t for t in self.col_twists], [-t for t in self.row_twists], self.num_vars)

    def to_strings(self) -> List[List[str]]:
        return [[f.to_string() for f in row] for row in self.entries]

    def __repr__(self):
        return f"GradedMatrix({self.shape[0]}x{self.shape[1]})"
