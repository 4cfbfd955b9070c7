import math


def match_3sf(computed: float, table) -> bool:
    """Agreement with a 3-significant-figure table entry.

    Published tables mix rounding and truncation in the third digit, so a
    value matches when it lies within one unit in that digit.  Entries that
    overflow binary64 when parsed (e.g. 1.80e308) are passed as strings.
    """
    if isinstance(table, str):
        mant_s, _, exp_s = table.lower().partition("e")
        mant, exp10 = float(mant_s), int(exp_s)
        scaled = computed / 10.0**exp10
        return abs(scaled - mant) <= 0.01 * (1.0 + 1e-9)
    if table == 0.0:
        return computed == 0.0
    unit = 10.0 ** (math.floor(math.log10(abs(table))) - 2)
    return abs(computed - table) <= unit * (1.0 + 1e-9)
