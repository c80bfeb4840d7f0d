"""
Sector queries and their raw encoding.

A query selects one to three sectors. Its raw vector holds 1 for a
selected sector, 0.25 for a sector next to a selected one and 0 elsewhere;
sectors span a semicircle, so the first and last sector are not neighbours.
"""
import attrs
import numpy as np

from apps.common.exceptions import ArgumentError
from apps.scenes.sectors import check_sector_count, mask_from_sectors, sectors_from_mask

SELECTED_WEIGHT = 1.0
ADJACENT_WEIGHT = 0.25
MAX_SELECTED = 3


@attrs.frozen
class AngleQuery:
    n_sectors: int
    selected: int

    def __attrs_post_init__(self):
        check_sector_count(self.n_sectors)
        if self.selected <= 0:
            raise ArgumentError('a query must select at least one sector')
        if self.selected >> self.n_sectors:
            raise ArgumentError(f'mask {self.selected:#b} exceeds {self.n_sectors} sectors')
        if len(self.sectors) > MAX_SELECTED:
            raise ArgumentError(f'at most {MAX_SELECTED} sectors per query, got {len(self.sectors)}')

    @classmethod
    def of(cls, sectors, n_sectors):
        if not sectors:
            raise ArgumentError('a query must select at least one sector')
        return cls(n_sectors=n_sectors, selected=mask_from_sectors(sectors))

    @property
    def sectors(self):
        return sectors_from_mask(self.selected, self.n_sectors)


def sector_weights(query):
    """Raw (n_sectors,) vector of a query."""
    weights = np.zeros(query.n_sectors)
    for sector in query.sectors:
        i = sector - 1
        for j in (i - 1, i + 1):
            if 0 <= j < query.n_sectors:
                weights[j] = max(weights[j], ADJACENT_WEIGHT)
    weights[[s - 1 for s in query.sectors]] = SELECTED_WEIGHT
    return weights
