import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mrbt.errors import InvalidPoint, InvalidRegion, InvalidSpace, NoSplittableDimension
from mrbt.space import (
    Region,
    SpaceDescriptor,
    bisect,
    cell_index,
    contains,
    index_cell,
    max_depth,
    split_dimension,
    volume,
)


def naive_split_dimension(region, depth):
    k = len(region.lo)
    splittable = [d for d in range(k) if region.hi[d] - region.lo[d] >= 2]
    if not splittable:
        return None
    return min(splittable, key=lambda d: (d - depth) % k)


def cells_of(region):
    return set(itertools.product(*(range(a, b) for a, b in zip(region.lo, region.hi))))


@pytest.mark.parametrize(
    "lo, hi, expected",
    [((0, 0), (4, 4), 16), ((2, 0), (4, 2), 4), ((3, 2), (4, 3), 1)],
)
def test_volume(lo, hi, expected):
    assert volume(Region(lo, hi)) == expected


@pytest.mark.parametrize(
    "region, p, expected",
    [
        (Region((0, 0), (2, 4)), (0, 0), True),
        (Region((0, 0), (2, 4)), (2, 0), False),
        (Region((2, 2), (4, 4)), (3, 3), True),
    ],
)
def test_contains(region, p, expected):
    assert contains(region, p) is expected


@pytest.mark.parametrize(
    "region, depth, expected",
    [
        (Region((0, 0), (4, 4)), 0, 0),
        (Region((2, 2), (4, 4)), 2, 0),
        (Region((3, 2), (4, 4)), 2, 1),
    ],
)
def test_split_dimension_examples(region, depth, expected):
    assert naive_split_dimension(region, depth) == expected
    assert split_dimension(region, depth) == expected


def test_split_dimension_single_cell():
    with pytest.raises(NoSplittableDimension):
        split_dimension(Region((3, 2), (4, 3)), 0)


@pytest.mark.parametrize(
    "region, dim, split, low, high",
    [
        (Region((0, 0), (4, 4)), 0, 2, Region((0, 0), (2, 4)), Region((2, 0), (4, 4))),
        (Region((2, 2), (4, 4)), 1, 3, Region((2, 2), (4, 3)), Region((2, 3), (4, 4))),
        (Region((0,), (3,)), 0, 1, Region((0,), (1,)), Region((1,), (3,))),
    ],
)
def test_bisect_examples(region, dim, split, low, high):
    s, a, b = bisect(region, dim)
    assert (s, a, b) == (split, low, high)
    assert cells_of(a) | cells_of(b) == cells_of(region)
    assert not cells_of(a) & cells_of(b)


def test_bisect_rejects_unit_extent():
    with pytest.raises(NoSplittableDimension):
        bisect(Region((0, 3), (4, 4)), 1)


def test_cell_index_examples():
    space = SpaceDescriptor.parse("4,4")
    assert cell_index(space, (0, 0)) == 0
    assert cell_index(space, (3, 3)) == 15
    assert index_cell(space, 6) == (1, 2)
    assert cell_index(space, (1, 2)) == 6 == 1 * 4 + 2


def test_index_out_of_range():
    space = SpaceDescriptor.parse("4,4")
    with pytest.raises(InvalidPoint):
        index_cell(space, 16)
    with pytest.raises(InvalidPoint):
        cell_index(space, (4, 0))


@pytest.mark.parametrize("cards", [(1,), (3,), (2, 3), (4, 1, 3), (2, 2, 2, 2)])
def test_cell_index_bijection_exhaustive(cards):
    space = SpaceDescriptor(cards)
    seen = []
    for i in range(space.total_cells):
        p = index_cell(space, i)
        assert cell_index(space, p) == i
        seen.append(p)
    # row-major: enumeration order equals lexicographic order
    assert seen == sorted(seen) == list(itertools.product(*(range(c) for c in cards)))


def test_space_parse_and_text():
    space = SpaceDescriptor.parse(" 4, 4 ")
    assert space.cardinalities == (4, 4)
    assert str(space) == "4,4"
    assert space.total_cells == 16


@pytest.mark.parametrize("text", ["", "4,x", "0,4", "-1", "4,,4"])
def test_space_parse_rejects(text):
    with pytest.raises(InvalidSpace):
        SpaceDescriptor.parse(text)


def test_space_overflow_checked():
    assert SpaceDescriptor.binary(63).total_cells == 2**63
    assert SpaceDescriptor((2**32 - 1, 2**32 + 1)).total_cells == 2**64 - 1
    with pytest.raises(InvalidSpace):
        SpaceDescriptor.binary(64)


def test_region_validation():
    with pytest.raises(InvalidRegion):
        Region((1,), (1,))
    with pytest.raises(InvalidRegion):
        SpaceDescriptor((4,)).check_region(Region((0,), (5,)))


def test_max_depth():
    assert max_depth(SpaceDescriptor((4, 4))) == 4
    assert max_depth(SpaceDescriptor((5, 1, 8))) == 6
    assert max_depth(SpaceDescriptor.binary(32)) == 32


@st.composite
def regions_with_points(draw):
    k = draw(st.integers(1, 3))
    lo, hi = [], []
    for _ in range(k):
        a = draw(st.integers(0, 20))
        lo.append(a)
        hi.append(a + draw(st.integers(1, 20)))
    region = Region(tuple(lo), tuple(hi))
    p = tuple(draw(st.integers(a, b - 1)) for a, b in zip(lo, hi))
    q = tuple(draw(st.integers(a, b - 1)) for a, b in zip(lo, hi))
    return region, p, q


@given(regions_with_points(), st.integers(0, 50))
def test_bisect_partitions_and_routes(data, depth):
    region, p, _ = data
    if volume(region) == 1:
        return
    d = split_dimension(region, depth)
    assert d == naive_split_dimension(region, depth)
    assert split_dimension(region, depth) == d
    _, low, high = bisect(region, d)
    assert volume(low) + volume(high) == volume(region)
    assert volume(low) >= 1 and volume(high) >= 1
    assert contains(low, p) != contains(high, p)


@given(regions_with_points())
def test_distinct_points_separate_within_bound(data):
    region, p, q = data
    if p == q:
        return
    bound = sum((b - a - 1).bit_length() for a, b in zip(region.lo, region.hi))
    depth = 0
    while True:
        _, low, high = bisect(region, split_dimension(region, depth))
        depth += 1
        if contains(low, p) != contains(low, q):
            break
        region = low if contains(low, p) else high
    assert depth <= bound
