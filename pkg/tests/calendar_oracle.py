"""Independent brute-force calendar conversion used as the epoch oracle.

Cumulative day tables are built by plain counting from 1970; no datetime
arithmetic is involved, so agreement with normalize_epoch is meaningful.
"""

from bisect import bisect_right

_MAX_YEAR = 5200  # covers every epoch value below the millisecond boundary


def _is_leap(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def _build_year_table():
    days_before = [0]
    total = 0
    for year in range(1970, _MAX_YEAR):
        total += 366 if _is_leap(year) else 365
        days_before.append(total)
    return days_before


_DAYS_BEFORE_YEAR = _build_year_table()
_MONTH_LENGTHS = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


def civil_from_epoch_seconds(total_seconds: int):
    """(year, month, day, hour, minute, second) by counting days from 1970."""
    days, remainder = divmod(total_seconds, 86400)
    hour, remainder = divmod(remainder, 3600)
    minute, second = divmod(remainder, 60)

    year_index = bisect_right(_DAYS_BEFORE_YEAR, days) - 1
    year = 1970 + year_index
    day_of_year = days - _DAYS_BEFORE_YEAR[year_index]

    month = 1
    for month_length in _MONTH_LENGTHS:
        if month == 2 and _is_leap(year):
            month_length += 1
        if day_of_year < month_length:
            break
        day_of_year -= month_length
        month += 1
    return (year, month, day_of_year + 1, hour, minute, second)
