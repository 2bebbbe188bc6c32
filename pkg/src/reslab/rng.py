"""Reproducible complex Gaussian noise for ensemble simulations.

Each simulated path owns a counter-based Philox stream keyed by
(seed, path index), so ensembles reproduce bit-identically no matter how
paths are scheduled across workers.  Within a path every step consumes a
fixed number of uniform draws (two per mode), which are turned into
complex Gaussians by the Box-Muller transform; the value attached to
(seed, path, mode, step) is therefore a pure function of those four
indices and the stream counter position.

Normalization: a standard complex Wiener process has E|beta(tau)|^2 = tau,
i.e. independent real and imaginary parts of variance tau/2 each.  A unit
complex Gaussian (E|xi|^2 = 1) is (z_re + i z_im) / sqrt(2) with z_re,
z_im standard normal.
"""

from __future__ import annotations

import numpy as np

__all__ = ["path_generator", "complex_normals", "NOISE_CONVENTION"]

#: Recorded in output metadata alongside seed and scheme.
NOISE_CONVENTION = "E|beta(tau)|^2 = tau (Re, Im independent, variance tau/2 each)"

_MASK64 = (1 << 64) - 1


def path_generator(seed: int, path: int) -> np.random.Generator:
    """Philox stream for one ensemble path, keyed by (seed, path)."""
    key = ((path & _MASK64) << 64) | (seed & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def complex_normals(gen: np.random.Generator, shape) -> np.ndarray:
    """Unit-variance complex Gaussians, E|xi|^2 = 1, fixed draw count.

    Consumes exactly 2 * prod(shape) uniform doubles from ``gen``.
    """
    if isinstance(shape, int):
        shape = (shape,)
    n = 1
    for s in shape:
        n *= int(s)
    u = gen.random(2 * n)
    u1 = u[0::2]
    u2 = u[1::2]
    # Box-Muller; log1p(-u1) keeps the argument in (0, 1].
    r = np.sqrt(-2.0 * np.log1p(-u1))
    theta = 2.0 * np.pi * u2
    z = r * (np.cos(theta) + 1j * np.sin(theta))
    # z has E|z|^2 = 2; scale to a unit complex Gaussian.
    return (z / np.sqrt(2.0)).reshape(shape)
