"""Deterministic 64x64 image pairs shared by the FSIMc regression tests.

Each builder returns (reference, distorted) as plain float arrays in [0,1].
The content is chosen to exercise different failure axes: additive noise,
contrast compression, and a hue/brightness shift on structured content.
"""
import numpy as np

SIDE = 64


def _radial(side=SIDE):
    yy, xx = np.mgrid[0:side, 0:side]
    cy = cx = (side - 1) / 2.0
    r = np.hypot(yy - cy, xx - cx) / np.hypot(cy, cx)
    return 1.0 - r


def pair_noisy():
    """Smooth warm vignette vs the same field under uniform noise."""
    base = _radial()
    px = np.stack([0.9 * base, 0.55 * base, 0.35 * base], axis=2)
    rng = np.random.default_rng(101)
    noisy = np.clip(px + rng.uniform(-0.08, 0.08, px.shape), 0.0, 1.0)
    return px, noisy


def pair_compressed():
    """Crossed sinusoidal texture vs a contrast-compressed copy."""
    yy, xx = np.mgrid[0:SIDE, 0:SIDE]
    tex = 0.5 + 0.25 * np.sin(2 * np.pi * xx / 9.0) + 0.2 * np.cos(2 * np.pi * yy / 13.0)
    px = np.stack([tex, 0.8 * tex + 0.1, 0.6 * tex + 0.2], axis=2)
    px = np.clip(px, 0.0, 1.0)
    squeezed = 0.5 + 0.4 * (px - 0.5)
    return px, squeezed


def pair_shifted():
    """Blocky gradient scene vs a darkened, channel-rotated copy."""
    yy, xx = np.mgrid[0:SIDE, 0:SIDE]
    blocks = ((xx // 16 + yy // 16) % 2).astype(float)
    ramp = xx / (SIDE - 1.0)
    r = np.clip(0.25 + 0.5 * blocks * ramp, 0.0, 1.0)
    g = np.clip(0.2 + 0.6 * (1 - blocks) * ramp, 0.0, 1.0)
    b = np.clip(0.3 + 0.3 * ramp, 0.0, 1.0)
    px = np.stack([r, g, b], axis=2)
    shifted = np.clip(np.stack([0.8 * g, 0.8 * b, 0.8 * r], axis=2), 0.0, 1.0)
    return px, shifted


ALL_PAIRS = [("noisy", pair_noisy), ("compressed", pair_compressed),
             ("shifted", pair_shifted)]
