"""
Reduced representations and their lower bounds
==============================================

PAA, SAX and the Haar wavelet shrink a series; distances in the reduced
space never exceed the distance between the originals.  The moving-average
trend removes weekly oscillation.
"""

import numpy as np

from playclust.core import znormalize
from playclust.dissim import euclidean
from playclust.represent import (
    SaxConfig,
    breakpoints,
    dwt_dissim,
    extract_trend,
    paa,
    sax_mindist,
    sax_symbols,
)

rng = np.random.default_rng(0)
x = znormalize(np.cumsum(rng.normal(size=21)))
y = znormalize(np.cumsum(rng.normal(size=21)))

# Seven segments of three days each.
print("PAA(x):", np.round(paa(x, 7), 2))

cfg = SaxConfig(w=7, alpha=5)
print("breakpoints for 5 symbols:", np.round(breakpoints(5), 4))
wx, wy = sax_symbols(x, cfg), sax_symbols(y, cfg)
print("SAX words:", wx, wy)
print("MINDIST =", round(sax_mindist(wx, wy, 21, cfg), 3), "<= euclidean =", round(euclidean(x, y), 3))

# Haar needs an even length; keep more coefficients to get closer to Euclidean.
x28, y28 = znormalize(rng.normal(size=28)), znormalize(rng.normal(size=28))
for keep in (4, 7, 14, 28):
    print(f"dwt keep={keep:2d}: {dwt_dissim(x28, y28, level=2, keep=keep):.3f}")
print("euclidean:     ", round(euclidean(x28, y28), 3))

# A weekly rhythm on top of a rising line: the trend recovers the line away from the edges.
t = np.arange(21.0)
line = 2 + 0.5 * t
weekly = line + np.sin(2 * np.pi * t / 7)
trend = extract_trend(weekly, 7)
print("max interior error:", np.abs(trend[3:18] - line[3:18]).max())
