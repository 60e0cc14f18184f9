"""Pure-Python twin of the compiled metric kernel.

`raw_indicators` here and in ``_speedups.pyx`` must perform the same IEEE
operations in the same order: tests assert bit-identical results between the
two backends, and seeded runs must not depend on which one is loaded.
Any edit to one file has to be mirrored in the other.
"""


def raw_indicators(
    c0, c1, c2,
    b0, b1, b2,
    e0, e1, e2,
    m0, m1, m2,
    freq_lo, freq_hi,
    total_bw, total_eirp,
    peb_ratio_max,
):
    """Evaluate all unweighted metric values for a three-link state.

    Inputs are the per-link center frequencies, bandwidths, EIRPs and minimum
    required EIRPs, plus the transponder bounds and reward-shape constants.
    Returns a 16-tuple:

        (or0, or1, or2, otr0, otr1, otr2, pebr0, pebr1, pebr2,
         mr0, mr1, mr2, br, er, pr, frr)
    """
    lo0 = c0 - 0.5 * b0
    hi0 = c0 + 0.5 * b0
    lo1 = c1 - 0.5 * b1
    hi1 = c1 + 0.5 * b1
    lo2 = c2 - 0.5 * b2
    hi2 = c2 + 0.5 * b2

    # pairwise intersection on half-open intervals: touching edges don't overlap
    ov01 = lo0 < hi1 and lo1 < hi0
    ov02 = lo0 < hi2 and lo2 < hi0
    ov12 = lo1 < hi2 and lo2 < hi1

    or0 = 0.0 if (ov01 or ov02) else 1.0
    or1 = 0.0 if (ov01 or ov12) else 1.0
    or2 = 0.0 if (ov02 or ov12) else 1.0

    # closed inclusion: a link flush with the band edge still counts
    otr0 = 1.0 if (lo0 >= freq_lo and hi0 <= freq_hi) else 0.0
    otr1 = 1.0 if (lo1 >= freq_lo and hi1 <= freq_hi) else 0.0
    otr2 = 1.0 if (lo2 >= freq_lo and hi2 <= freq_hi) else 0.0

    inv_ratio = 1.0 / peb_ratio_max
    pebr0 = _peb(e0, b0, total_bw, total_eirp, inv_ratio, peb_ratio_max)
    pebr1 = _peb(e1, b1, total_bw, total_eirp, inv_ratio, peb_ratio_max)
    pebr2 = _peb(e2, b2, total_bw, total_eirp, inv_ratio, peb_ratio_max)

    mr0 = _margin(e0, m0)
    mr1 = _margin(e1, m1)
    mr2 = _margin(e2, m2)

    sum_bw = b0 + b1 + b2
    br = 1.0 if sum_bw <= total_bw else 0.0

    sum_eirp = e0 + e1 + e2
    er = 1.0 if sum_eirp <= total_eirp else 0.0

    # packing and free-resource scores presuppose a valid (overlap-free)
    # arrangement; overlapping layouts earn neither
    disjoint = not (ov01 or ov02 or ov12)
    if disjoint:
        span = _max2(hi0, _max2(hi1, hi2)) - _min2(lo0, _min2(lo1, lo2))
        pr = sum_bw / span if span > 0.0 else 0.0
    else:
        pr = 0.0

    if (disjoint and otr0 == 1.0 and otr1 == 1.0 and otr2 == 1.0
            and total_bw > 0.0):
        frr = (total_bw - sum_bw) / total_bw
        if frr < 0.0:
            frr = 0.0
    else:
        frr = 0.0

    return (or0, or1, or2, otr0, otr1, otr2, pebr0, pebr1, pebr2,
            mr0, mr1, mr2, br, er, pr, frr)


def _peb(eirp, bw, total_bw, total_eirp, inv_ratio, ratio_max):
    if bw <= 0.0:
        return 0.0
    ratio = (eirp / total_eirp) / (bw / total_bw)
    return 1.0 if (ratio >= inv_ratio and ratio <= ratio_max) else 0.0


def _margin(eirp, min_required):
    if eirp < min_required:
        return 0.0
    mr = 1.0 - (eirp - min_required) / min_required
    return mr if mr > 0.0 else 0.0


def _min2(a, b):
    return a if a < b else b


def _max2(a, b):
    return a if a > b else b
