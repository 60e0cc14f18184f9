# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled metric kernel.

Mirror of ``_fallback.raw_indicators``: identical operations in identical
order so both backends return bit-identical doubles. Compiled with
-ffp-contract=off to keep that contract. Edit both files together.
"""


cdef inline double _peb(double eirp, double bw, double total_bw,
                        double total_eirp, double inv_ratio,
                        double ratio_max) nogil:
    cdef double ratio
    if bw <= 0.0:
        return 0.0
    ratio = (eirp / total_eirp) / (bw / total_bw)
    return 1.0 if (ratio >= inv_ratio and ratio <= ratio_max) else 0.0


cdef inline double _margin(double eirp, double min_required) nogil:
    cdef double mr
    if eirp < min_required:
        return 0.0
    mr = 1.0 - (eirp - min_required) / min_required
    return mr if mr > 0.0 else 0.0


cdef inline double _min2(double a, double b) nogil:
    return a if a < b else b


cdef inline double _max2(double a, double b) nogil:
    return a if a > b else b


def raw_indicators(double c0, double c1, double c2,
                   double b0, double b1, double b2,
                   double e0, double e1, double e2,
                   double m0, double m1, double m2,
                   double freq_lo, double freq_hi,
                   double total_bw, double total_eirp,
                   double peb_ratio_max):
    """See ``_fallback.raw_indicators`` for the contract."""
    cdef double lo0 = c0 - 0.5 * b0
    cdef double hi0 = c0 + 0.5 * b0
    cdef double lo1 = c1 - 0.5 * b1
    cdef double hi1 = c1 + 0.5 * b1
    cdef double lo2 = c2 - 0.5 * b2
    cdef double hi2 = c2 + 0.5 * b2

    cdef bint ov01 = lo0 < hi1 and lo1 < hi0
    cdef bint ov02 = lo0 < hi2 and lo2 < hi0
    cdef bint ov12 = lo1 < hi2 and lo2 < hi1

    cdef double or0 = 0.0 if (ov01 or ov02) else 1.0
    cdef double or1 = 0.0 if (ov01 or ov12) else 1.0
    cdef double or2 = 0.0 if (ov02 or ov12) else 1.0

    cdef double otr0 = 1.0 if (lo0 >= freq_lo and hi0 <= freq_hi) else 0.0
    cdef double otr1 = 1.0 if (lo1 >= freq_lo and hi1 <= freq_hi) else 0.0
    cdef double otr2 = 1.0 if (lo2 >= freq_lo and hi2 <= freq_hi) else 0.0

    cdef double inv_ratio = 1.0 / peb_ratio_max
    cdef double pebr0 = _peb(e0, b0, total_bw, total_eirp, inv_ratio, peb_ratio_max)
    cdef double pebr1 = _peb(e1, b1, total_bw, total_eirp, inv_ratio, peb_ratio_max)
    cdef double pebr2 = _peb(e2, b2, total_bw, total_eirp, inv_ratio, peb_ratio_max)

    cdef double mr0 = _margin(e0, m0)
    cdef double mr1 = _margin(e1, m1)
    cdef double mr2 = _margin(e2, m2)

    cdef double sum_bw = b0 + b1 + b2
    cdef double br = 1.0 if sum_bw <= total_bw else 0.0

    cdef double sum_eirp = e0 + e1 + e2
    cdef double er = 1.0 if sum_eirp <= total_eirp else 0.0

    cdef bint disjoint = not (ov01 or ov02 or ov12)
    cdef double pr
    cdef double span
    if disjoint:
        span = _max2(hi0, _max2(hi1, hi2)) - _min2(lo0, _min2(lo1, lo2))
        pr = sum_bw / span if span > 0.0 else 0.0
    else:
        pr = 0.0

    cdef double frr
    if (disjoint and otr0 == 1.0 and otr1 == 1.0 and otr2 == 1.0
            and total_bw > 0.0):
        frr = (total_bw - sum_bw) / total_bw
        if frr < 0.0:
            frr = 0.0
    else:
        frr = 0.0

    return (or0, or1, or2, otr0, otr1, otr2, pebr0, pebr1, pebr2,
            mr0, mr1, mr2, br, er, pr, frr)
