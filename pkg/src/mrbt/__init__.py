"""Multi-resolution binary trees for approximate discrete joint distributions.

Build a tree by inserting weighted points, then query it::

    from mrbt import MRBT, prob, sample

    tree = MRBT("4,4")
    tree.insert((0, 0), 0.5)
    tree.insert((3, 3), 1.0)
    prob(tree, (3, 3))
"""
from .errors import *  # noqa: F401,F403
from .kernels import BACKEND
from .oracle import RegionList, cdf_sample, cdf_sample_many
from .query import (
    RegionReport,
    VisitCounter,
    draw_max,
    max_regions,
    prob,
    prob_many,
    region_of,
    sample,
    sample_many,
    to_dense,
)
from .space import Region, SpaceDescriptor, bisect, cell_index, contains, index_cell, split_dimension, volume
from .tree import (
    DUPLICATE,
    EXHAUSTED,
    MRBT,
    Budget,
    BudgetExhausted,
    DuplicateIgnored,
    Inserted,
    StatsReport,
    WeightedPoint,
)

__version__ = "0.1.0"
