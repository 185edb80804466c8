import math

import pytest

from bcode.bitmatrix import BitMatrix, min_row_weight
from bcode.construct import (
    ConstructionRecipe,
    RecipeKind,
    add_ones_row,
    btc,
    build,
    general_bcc,
    minimal_bcc,
    minimal_bdc,
    partition_code,
    random_code,
    separable_search,
)
from bcode.errors import ConstructionError, ResourceLimitError
from bcode.properties import is_bcc, is_bdc, is_btc, is_separable
from bcode.search import canonical_form

import oracles


def as_bits(mat):
    return [[mat.bit(i, j) for j in range(mat.n)] for i in range(mat.m)]


# --- minimal detection codes -------------------------------------------------

def test_minimal_bdc_base_case_is_identity():
    assert minimal_bdc(1, 1) == BitMatrix.identity(2)


def test_minimal_bdc_2_2_contains_every_weight_two_row_once():
    mat = minimal_bdc(2, 2)
    assert (mat.m, mat.n) == (6, 4)
    assert sorted(mat.rows) == sorted(
        v for v in range(16) if bin(v).count("1") == 2
    )


def test_minimal_bdc_1_2_matches_hand_expansion():
    mat = minimal_bdc(1, 2)
    expected = BitMatrix.from_rows([[1, 1, 0], [1, 0, 1], [0, 1, 1]])
    assert canonical_form(mat) == canonical_form(expected)
    assert mat == expected  # the recursion is literal, so even the order matches


@pytest.mark.parametrize(
    "k,r", [(k, r) for k in range(1, 8) for r in range(1, 8) if k + r <= 8]
)
def test_minimal_bdc_row_count_and_property(k, r):
    mat = minimal_bdc(k, r)
    assert mat.m == math.comb(k + r, k)
    assert mat.n == k + r
    assert is_bdc(mat, k, r)


def test_minimal_bdc_resource_limit():
    with pytest.raises(ResourceLimitError):
        minimal_bdc(12, 12)
    minimal_bdc(3, 3, max_rows=20)
    with pytest.raises(ResourceLimitError):
        minimal_bdc(3, 3, max_rows=19)


def test_minimal_bdc_validates_arguments():
    with pytest.raises(ValueError):
        minimal_bdc(0, 1)
    with pytest.raises(ValueError):
        minimal_bdc(1, 0)


# --- ones-row upgrade --------------------------------------------------------

def test_add_ones_row_prepends():
    out = add_ones_row(BitMatrix.identity(3))
    assert out.m == 4 and out.to_strings()[0] == "111"
    assert is_bcc(out, 2, 1)


def test_add_ones_row_on_single_cell():
    out = add_ones_row(BitMatrix.from_rows([[1]]))
    assert out.to_strings() == ["1", "1"]


def test_add_ones_row_keeps_correction_property():
    out = add_ones_row(minimal_bdc(2, 2))
    assert out.m == 7 and is_bcc(out, 2, 2)


# --- minimal correction codes ------------------------------------------------

def test_minimal_bcc_examples():
    assert minimal_bcc(2, 2).m == 6 and minimal_bcc(2, 2).n == 4
    four_by_three = minimal_bcc(2, 1)
    assert (four_by_three.m, four_by_three.n) == (4, 3)
    assert is_bcc(four_by_three, 2, 1)
    three = minimal_bcc(1, 2)
    assert (three.m, three.n) == (3, 3)
    assert is_bcc(three, 1, 2)


@pytest.mark.parametrize(
    "k,r", [(k, r) for k in range(1, 6) for r in range(2, 6) if k + r <= 8]
)
def test_minimal_detection_code_is_already_correcting_for_r_above_one(k, r):
    assert is_bcc(minimal_bdc(k, r), k, r)


# --- general correction codes ------------------------------------------------

def test_general_bcc_doubles_columns_when_ratio_matches():
    mat = general_bcc(2, 4, 8)
    base = minimal_bcc(2, 2)
    assert (mat.m, mat.n) == (6, 8)
    assert mat.to_strings() == [s + s for s in base.to_strings()]
    assert is_bcc(mat, 2, 4)


def test_general_bcc_with_rounding_overflow_falls_back_to_fitting_copies():
    mat = general_bcc(2, 2, 8)
    assert (mat.m, mat.n) == (4, 8)  # built from the 4x3 minimal correction code
    assert is_bcc(mat, 2, 2)
    assert min_row_weight(mat) >= 2


def test_general_bcc_degenerate_case_equals_minimal():
    assert general_bcc(1, 1, 2) == minimal_bcc(1, 1)


def test_general_bcc_rejects_too_few_users():
    with pytest.raises(ValueError):
        general_bcc(2, 4, 5)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_general_bcc_row_count_is_scale_independent(j):
    mat = general_bcc(2, 2 * 2**j, 4 * 2**j)
    assert mat.m == 6
    assert is_bcc(mat, 2, 2 * 2**j)


@pytest.mark.parametrize(
    "k,r,n",
    [
        (k, r, n)
        for k in range(1, 4)
        for n in range(2, 17)
        for r in range(1, n - k + 1)
        if n >= k + r
    ],
)
def test_general_bcc_verifies_across_the_operating_range(k, r, n):
    mat = general_bcc(k, r, n)
    assert mat.n == n
    assert min_row_weight(mat) >= r
    assert is_bcc(mat, k, r)


# --- partition codes -----------------------------------------------------------

def test_partition_code_examples():
    mat = partition_code(3, 6)
    assert all(mat.row_weight(i) == 2 for i in range(3))
    assert all(sum(mat.bit(i, j) for i in range(3)) == 1 for j in range(6))
    assert partition_code(1, 4).to_strings() == ["1111"]
    assert partition_code(12, 12) == BitMatrix.identity(12)


def test_partition_code_remainder_goes_to_early_groups():
    mat = partition_code(3, 7)
    assert [mat.row_weight(i) for i in range(3)] == [3, 2, 2]


def test_partition_code_validation():
    with pytest.raises(ValueError):
        partition_code(5, 4)
    with pytest.raises(ValueError):
        partition_code(0, 4)


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_partition_code_correction_threshold(k, m):
    # Verified by oracle: partitions detect up to k attackers once m > k,
    # but correction additionally needs m >= 2k + 1 (two sums covering
    # complementary group sets XOR to all-ones below that).
    n = 2 * m
    mat = partition_code(m, n)
    r = n // m
    assert is_bdc(mat, k, r) == (m >= k + 1)
    assert is_bcc(mat, k, r) == (m >= 2 * k + 1)
    bits = as_bits(mat)
    assert oracles.naive_is_bcc(bits, k, r) == (m >= 2 * k + 1)


# --- random codes ----------------------------------------------------------------

def test_random_code_row_weights_and_determinism():
    a = random_code(6, 12, 4, seed=42)
    b = random_code(6, 12, 4, seed=42)
    c = random_code(6, 12, 4, seed=43)
    assert a == b
    assert a != c
    assert all(a.row_weight(i) == 4 for i in range(6))
    assert all(any(a.bit(i, j) for i in range(a.m)) for j in range(a.n))


def test_random_code_forced_all_ones():
    assert random_code(1, 3, 3, seed=0).to_strings() == ["111"]


def test_random_code_gives_up_when_columns_cannot_be_covered():
    with pytest.raises(ConstructionError):
        random_code(1, 3, 1, seed=0, max_retries=50)


def test_random_code_validation():
    with pytest.raises(ValueError):
        random_code(2, 3, 0, seed=0)
    with pytest.raises(ValueError):
        random_code(2, 3, 4, seed=0)


def test_random_wide_codes_usually_correct_one_attacker():
    hits = sum(is_bcc(random_code(12, 12, 6, seed=s), 1, 6) for s in range(50))
    assert hits >= 40


# --- separable search ---------------------------------------------------------

def test_separable_search_small_cases():
    mat = separable_search(1, 8, 1, seed=0, max_rows=16)
    assert is_separable(mat, 1)
    assert len(set(mat.column_masks)) == 8 and 0 not in mat.column_masks

    mat = separable_search(2, 8, 2, seed=0, max_rows=24)
    assert is_separable(mat, 2)
    assert min_row_weight(mat) >= 2

    mat = separable_search(1, 2, 1, seed=0, max_rows=4)
    assert is_separable(mat, 1)


def test_separable_search_is_deterministic():
    a = separable_search(2, 8, 2, seed=9, max_rows=24)
    b = separable_search(2, 8, 2, seed=9, max_rows=24)
    assert a == b


def test_separable_search_budget_exhaustion():
    with pytest.raises(ConstructionError) as info:
        separable_search(2, 8, 2, seed=0, max_rows=7, attempts_per_m=2)
    assert info.value.last_tried == 7
    with pytest.raises(ConstructionError) as info:
        separable_search(2, 8, 2, seed=0, max_rows=2, attempts_per_m=5)
    assert info.value.last_tried is None  # budget below the lower bound


def test_separable_search_validation():
    with pytest.raises(ValueError):
        separable_search(1, 1, 1, seed=0, max_rows=4)
    with pytest.raises(ValueError):
        separable_search(1, 4, 4, seed=0, max_rows=4)


# --- tracking codes ------------------------------------------------------------

def test_btc_stacks_correction_on_separable():
    mat = btc(2, 2, 8, seed=1, max_rows=24)
    top = general_bcc(2, 2, 8)
    assert mat.to_strings()[: top.m] == top.to_strings()
    assert is_btc(mat, 2, 2)


def test_btc_minimal_case():
    mat = btc(1, 1, 2, seed=2, max_rows=8)
    assert is_btc(mat, 1, 1)


def test_btc_wide_tracking_code():
    mat = btc(1, 11, 16, seed=0, max_rows=32)
    assert is_btc(mat, 1, 11)
    assert min_row_weight(mat) >= 11


# --- recipes -------------------------------------------------------------------

def test_recipe_dispatch_matches_direct_calls():
    assert build(ConstructionRecipe(RecipeKind.MINIMAL_BDC, k=2, r=2)) == minimal_bdc(2, 2)
    assert build(ConstructionRecipe(RecipeKind.GENERAL_BCC, k=2, r=4, n=8)) == general_bcc(2, 4, 8)
    assert build(ConstructionRecipe(RecipeKind.PARTITION, m=3, n=6)) == partition_code(3, 6)
    assert build(
        ConstructionRecipe(RecipeKind.RANDOM, m=4, n=6, row_weight=2, seed=1)
    ) == random_code(4, 6, 2, seed=1)
    assert build(ConstructionRecipe(RecipeKind.BTC, k=1, r=1, n=2, seed=5)) == btc(
        1, 1, 2, seed=5, max_rows=64
    )


def test_recipe_seed_rules():
    with pytest.raises(ValueError):
        ConstructionRecipe(RecipeKind.MINIMAL_BDC, k=1, r=1, seed=3)
    with pytest.raises(ValueError):
        ConstructionRecipe(RecipeKind.RANDOM, m=2, n=4, row_weight=2)


def test_recipe_missing_parameters():
    with pytest.raises(ValueError):
        build(ConstructionRecipe(RecipeKind.GENERAL_BCC, k=2, r=4))
