"""Text-only Thai end-of-turn detection toolkit.

Pipeline: prepare a labeled turn-boundary corpus from raw subtitle lines,
train or attach a probability scorer, calibrate a decision threshold on
validation ROC (Youden's J), evaluate accuracy and per-decision latency,
and serve streaming end/not-end decisions over a line-based JSON socket.
"""

__version__ = "0.1.0"
