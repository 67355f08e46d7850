"""
Comparing dissimilarity measures
================================

Four ways of saying how different two daily series are, and what each
one ignores.
"""

import numpy as np

from playclust.dissim import cid, cor_dissim, cort_dissim, dtw, euclidean

days = np.arange(21)

# A slow ramp, the same ramp at twice the level, and the ramp delayed by two days.
ramp = 1.0 + days / 10
double = 2 * ramp
late = np.concatenate([np.full(2, ramp[0]), ramp[:-2]])

# Correlation only looks at shape, so scaling costs nothing.
print("euclidean(ramp, double) =", round(euclidean(ramp, double), 3))
print("cor_dissim(ramp, double) =", round(cor_dissim(ramp, double), 3))

# DTW lets the time axis stretch, so a delay is cheap compared with Euclidean.
print("euclidean(ramp, late) =", round(euclidean(ramp, late), 3))
print("dtw(ramp, late)       =", round(dtw(ramp, late), 3))

# CORT weights the Euclidean distance by how well the day-to-day moves agree.
zigzag = ramp + 0.3 * (days % 2)
print("cort_dissim(ramp, zigzag) =", round(cort_dissim(ramp, zigzag), 3))
print("cort_dissim(zigzag, zigzag + 1) =", round(cort_dissim(zigzag, zigzag + 1), 3))

# CID inflates the distance between series of different complexity: one
# purchase against small purchases every day, compared with two single
# purchases a few days apart.
once = np.zeros(21)
once[10] = 5.0
daily = 0.15 + 0.1 * (days % 3)
print("euclidean(once, daily) =", round(euclidean(once, daily), 3))
print("cid(once, daily)       =", round(cid(once, daily), 3))
other_once = np.zeros(21)
other_once[13] = 5.0
print("euclidean(once, other_once) =", round(euclidean(once, other_once), 3))
print("cid(once, other_once)       =", round(cid(once, other_once), 3))
