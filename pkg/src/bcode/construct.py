"""Constructions for detection / correction / tracking codes.

Deterministic constructions:

* ``minimal_bdc`` builds the unique (up to permutation) minimum-row
  detection code on n = k + r users by block recursion.
* ``minimal_bcc`` upgrades it to a correction code; for r = 1 this needs
  one extra all-ones row, for r > 1 the detection code is already one.
* ``general_bcc`` reaches arbitrary n >= k + r by duplicating the columns
  of a minimal correction code, which leaves the set of Boolean sums
  unchanged; the row count therefore depends only on k and the utilization
  ratio, not on n itself.
* ``partition_code`` is the non-overlapping baseline (one-hot columns).

Randomized constructions (deterministic given the seed):

* ``random_code`` draws constant-weight rows independently.
* ``separable_search`` samples candidate matrices of growing height until
  one verifies as separable; correctness is unconditional because every
  returned matrix is verified.
* ``btc`` stacks a correction code on top of a separable matrix.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bitmatrix import BitMatrix, select_columns, vstack
from .errors import ConstructionError, ResourceLimitError
from .properties import find_btc_violation, is_separable

DEFAULT_MAX_ROWS = 1_000_000


@lru_cache(maxsize=None)
def _minimal_bdc_rows(k: int, r: int) -> tuple[int, ...]:
    # k == 0 is an internal base case: the 1 x r all-ones block that the
    # k = 1 recursion bottoms out on.
    if k == 0:
        return ((1 << r) - 1,)
    if r == 1:
        return tuple(1 << i for i in range(k + 1))
    top = tuple(1 | (row << 1) for row in _minimal_bdc_rows(k, r - 1))
    bottom = tuple(row << 1 for row in _minimal_bdc_rows(k - 1, r))
    return top + bottom


def minimal_bdc(k: int, r: int, max_rows: int = DEFAULT_MAX_ROWS) -> BitMatrix:
    """Minimum-row detection code on k + r users: C(k+r, k) rows.

    Layout follows the block recursion literally (all-ones block first) so
    outputs are reproducible; any row/column permutation would be equally
    valid.
    """
    if k < 1 or r < 1:
        raise ValueError("k and r must be positive")
    rows = math.comb(k + r, k)
    if rows > max_rows:
        raise ResourceLimitError(
            f"minimal detection code for k={k}, r={r} needs {rows} rows (> {max_rows})"
        )
    return BitMatrix(rows, k + r, _minimal_bdc_rows(k, r))


def add_ones_row(mat: BitMatrix) -> BitMatrix:
    """Prepend an all-ones row.

    Every Boolean column sum then has a 1 in the first position, so no two
    sums can be complements: this upgrades any detection code to a
    correction code at the cost of one row.
    """
    ones = (1 << mat.n) - 1
    return BitMatrix(mat.m + 1, mat.n, (ones,) + mat.rows)


def minimal_bcc(k: int, r: int, max_rows: int = DEFAULT_MAX_ROWS) -> BitMatrix:
    """Minimum-row correction code on k + r users.

    For r > 1 the minimal detection code already satisfies the complement
    condition; for r = 1 it does not, and one all-ones row on top of the
    identity is optimal (k + 2 rows).
    """
    if k < 1 or r < 1:
        raise ValueError("k and r must be positive")
    if r == 1:
        return add_ones_row(BitMatrix.identity(k + 1))
    return minimal_bdc(k, r, max_rows)


def general_bcc(k: int, r: int, n: int, max_rows: int = DEFAULT_MAX_ROWS) -> BitMatrix:
    """Correction code for arbitrary n >= k + r by column duplication.

    Chooses the largest duplication factor p <= floor((n - r) / k) such that
    p copies of the base code on k + ceil(r/p) users fit in n columns, then
    pads with leading base columns.  Every Boolean sum of the result equals
    a Boolean sum of the base code, and the p full copies alone give row
    weight p * ceil(r/p) >= r.
    """
    if k < 1 or r < 1:
        raise ValueError("k and r must be positive")
    if n < k + r:
        raise ValueError(
            f"no correction code on n={n} users can resist k={k} attackers "
            f"with row weight {r}: need n >= k + r"
        )
    p_cap = (n - r) // k
    p, r0 = 1, r
    for cand in range(p_cap, 0, -1):
        cand_r0 = -(-r // cand)
        if cand * (k + cand_r0) <= n:
            p, r0 = cand, cand_r0
            break
    base = minimal_bcc(k, r0, max_rows)
    width = k + r0
    lead = n - p * width
    order = list(range(lead)) + list(range(width)) * p
    return select_columns(base, order)


def partition_code(m: int, n: int) -> BitMatrix:
    """Non-overlapping partition of n users into m groups (one-hot columns).

    Group sizes differ by at most one; remainder users go to the earliest
    groups.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    if m > n:
        raise ValueError(f"cannot split {n} users into {m} nonempty groups")
    base, rem = divmod(n, m)
    rows = []
    start = 0
    for g in range(m):
        size = base + (1 if g < rem else 0)
        rows.append(((1 << size) - 1) << start)
        start += size
    return BitMatrix(m, n, tuple(rows))


def random_code(
    m: int,
    n: int,
    row_weight: int,
    seed: int,
    max_retries: int = 1000,
) -> BitMatrix:
    """Random matrix with exactly ``row_weight`` ones per row.

    Rows are i.i.d. uniform over constant-weight words; a draw with any
    all-zero column is rejected and retried, preserving the conditional
    distribution.  Deterministic given the seed.
    """
    if not 1 <= row_weight <= n:
        raise ValueError("row weight must be in [1, n]")
    if m < 1:
        raise ValueError("m must be positive")
    rng = np.random.default_rng(seed)
    full = (1 << n) - 1
    for _ in range(max_retries):
        rows = []
        covered = 0
        for _ in range(m):
            row = 0
            for j in rng.choice(n, size=row_weight, replace=False):
                row |= 1 << int(j)
            rows.append(row)
            covered |= row
        if covered == full:
            return BitMatrix(m, n, tuple(rows))
    raise ConstructionError(
        f"no zero-column-free {m}x{n} draw with row weight {row_weight} "
        f"in {max_retries} attempts"
    )


def separable_search(
    k: int,
    n: int,
    min_weight: int,
    seed: int,
    max_rows: int,
    attempts_per_m: int = 200,
) -> BitMatrix:
    """Search for a matrix whose Boolean sums of 1..k columns are all distinct.

    For each candidate height m (starting at the information-theoretic lower
    bound), draws ``attempts_per_m`` random matrices with per-row weight at
    least ``min_weight`` (biased toward n/2, where unions separate best) and
    returns the first one that verifies and has no zero column.  Randomized
    with verification: the returned matrix is separable unconditionally.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if n < 2:
        raise ValueError("need at least two users")
    if not 1 <= min_weight <= n - 1:
        raise ValueError("minimum row weight must be in [1, n-1]")
    num_sums = sum(math.comb(n, j) for j in range(1, min(k, n) + 1))
    start_m = max(1, math.ceil(math.log2(num_sums + 1)))
    lo = max(min_weight, int(n / 2 - math.sqrt(n)), 1)
    hi = n - 1
    rng = np.random.default_rng(seed)
    full = (1 << n) - 1
    last: int | None = None
    for m in range(start_m, max_rows + 1):
        last = m
        for _ in range(attempts_per_m):
            rows = []
            covered = 0
            for _ in range(m):
                w = int(rng.integers(lo, hi + 1))
                row = 0
                for j in rng.choice(n, size=w, replace=False):
                    row |= 1 << int(j)
                rows.append(row)
                covered |= row
            if covered != full:
                continue
            cand = BitMatrix(m, n, tuple(rows))
            if is_separable(cand, k):
                return cand
    raise ConstructionError(
        f"no separable matrix with {n} columns found up to {max_rows} rows",
        last_tried=last,
    )


def btc(
    k: int,
    r: int,
    n: int,
    seed: int,
    max_rows: int = 64,
    attempts_per_m: int = 200,
) -> BitMatrix:
    """Tracking code: a correction code stacked on a separable matrix.

    The top block fixes correction, the bottom block (row weight >= r)
    fixes separability; the stack inherits both.  The result is verified
    before being returned.
    """
    top = general_bcc(k, r, n)
    bottom = separable_search(k, n, r, seed, max_rows, attempts_per_m)
    stacked = vstack(top, bottom)
    bad = find_btc_violation(stacked, k, r)
    if bad is not None:
        raise ConstructionError(f"stacked tracking code failed verification: {bad}")
    return stacked


class RecipeKind(enum.Enum):
    MINIMAL_BDC = "minimal-bdc"
    MINIMAL_BCC = "minimal-bcc"
    GENERAL_BCC = "bcc"
    BTC = "btc"
    PARTITION = "partition"
    RANDOM = "random"


_RANDOMIZED = {RecipeKind.BTC, RecipeKind.RANDOM}


@dataclass(frozen=True)
class ConstructionRecipe:
    """Parameter bundle for :func:`build`; one recipe per construction kind.

    ``seed`` must be present exactly for the randomized kinds (btc, random).
    ``m`` and ``row_weight`` apply to partition / random codes only.
    """

    kind: RecipeKind
    k: int | None = None
    r: int | None = None
    n: int | None = None
    m: int | None = None
    row_weight: int | None = None
    seed: int | None = None
    max_rows: int | None = None
    attempts: int | None = None

    def __post_init__(self) -> None:
        if self.kind in _RANDOMIZED:
            if self.seed is None:
                raise ValueError(f"{self.kind.value} construction needs a seed")
        elif self.seed is not None:
            raise ValueError(f"{self.kind.value} construction takes no seed")


def build(recipe: ConstructionRecipe) -> BitMatrix:
    """Run the construction described by ``recipe``."""
    kind = recipe.kind

    def need(value: int | None, name: str) -> int:
        if value is None:
            raise ValueError(f"{kind.value} construction needs {name}")
        return value

    if kind is RecipeKind.MINIMAL_BDC:
        return minimal_bdc(need(recipe.k, "k"), need(recipe.r, "r"))
    if kind is RecipeKind.MINIMAL_BCC:
        return minimal_bcc(need(recipe.k, "k"), need(recipe.r, "r"))
    if kind is RecipeKind.GENERAL_BCC:
        return general_bcc(need(recipe.k, "k"), need(recipe.r, "r"), need(recipe.n, "n"))
    if kind is RecipeKind.BTC:
        return btc(
            need(recipe.k, "k"),
            need(recipe.r, "r"),
            need(recipe.n, "n"),
            need(recipe.seed, "seed"),
            recipe.max_rows if recipe.max_rows is not None else 64,
            recipe.attempts if recipe.attempts is not None else 200,
        )
    if kind is RecipeKind.PARTITION:
        return partition_code(need(recipe.m, "m"), need(recipe.n, "n"))
    if kind is RecipeKind.RANDOM:
        return random_code(
            need(recipe.m, "m"),
            need(recipe.n, "n"),
            need(recipe.row_weight, "row weight"),
            need(recipe.seed, "seed"),
        )
    raise ValueError(f"unknown construction kind {kind!r}")
