"""Fixed sample grids used for sampled checks."""
import numpy as np

# Points in the upper half-plane, none equal to i.
UPPER_GRID = tuple(
    complex(x, y)
    for x, y in [(0.0, 2.0), (0.5, 0.5), (-0.7, 1.3), (1.9, 0.9), (-2.4, 2.2),
                 (0.2, 3.7), (3.1, 1.4), (-1.1, 0.35), (0.8, 1.8), (-3.5, 0.7),
                 (1.3, 0.3), (-0.3, 4.6), (2.6, 2.9), (-1.8, 1.6), (0.05, 0.8),
                 (4.2, 3.3), (-0.9, 2.7), (1.6, 5.1), (-2.9, 3.9), (0.4, 1.15)]
)

# Twelve points split between the half-planes, away from +i and -i.
DEFAULT_GRID = tuple(
    complex(x, s * y)
    for x, y in [(0.5, 0.5), (-0.7, 1.3), (1.9, 0.9), (-2.4, 2.2), (0.2, 3.7), (1.1, 0.35)]
    for s in (1, -1)
)

REAL_GRID = tuple(np.linspace(-20.0, 20.0, 41) + 0.123)


def upper(points):
    return [complex(z) for z in points if complex(z).imag > 0]
