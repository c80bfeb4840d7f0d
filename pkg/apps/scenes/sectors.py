"""
Sectors of the frontal semicircle and selection bitmasks.

Sector i (1-based) of n covers the half-open interval
[(i - 1) * 180 / n, i * 180 / n) degrees; bit i - 1 of a selection mask
marks sector i as selected.
"""
from apps.common.exceptions import ArgumentError

SECTOR_COUNTS = (6, 9)


def check_sector_count(n_sectors):
    if n_sectors not in SECTOR_COUNTS:
        raise ArgumentError(f'n_sectors must be one of {SECTOR_COUNTS}, got {n_sectors}')
    return n_sectors


def sector_width(n_sectors):
    return 180.0 / check_sector_count(n_sectors)


def sector_of(angle_deg, n_sectors):
    """
    Sector index of a folded azimuth.

    Raises:
        ArgumentError: If the angle is outside [0, 180) or n_sectors is not 6 or 9
    """
    if not 0.0 <= angle_deg < 180.0:
        raise ArgumentError(f'angle must lie in [0, 180), fold it first; got {angle_deg}')
    width = sector_width(n_sectors)
    return min(int(angle_deg // width) + 1, n_sectors)


def sector_bounds(index, n_sectors):
    width = sector_width(n_sectors)
    if not 1 <= index <= n_sectors:
        raise ArgumentError(f'sector {index} does not exist for n_sectors={n_sectors}')
    return (index - 1) * width, index * width


def sector_center(index, n_sectors):
    lo, hi = sector_bounds(index, n_sectors)
    return (lo + hi) / 2.0


def mask_from_sectors(sectors):
    mask = 0
    for index in sectors:
        if index < 1:
            raise ArgumentError(f'sector indices start at 1, got {index}')
        mask |= 1 << (index - 1)
    return mask


def sectors_from_mask(mask, n_sectors):
    """
    Sorted sector indices of ``mask``.

    Raises:
        ArgumentError: If the mask is empty or names a sector beyond n_sectors
    """
    check_sector_count(n_sectors)
    if mask <= 0:
        raise ArgumentError('sector selection is empty')
    if mask >> n_sectors:
        raise ArgumentError(f'mask {mask:#b} selects sectors beyond {n_sectors}')
    return [i + 1 for i in range(n_sectors) if mask >> i & 1]
