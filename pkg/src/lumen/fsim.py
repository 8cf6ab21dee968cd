"""Feature-similarity index, chromatic variant (FSIMc).

Port of the published reference construction: luminance goes through a
4-scale, 4-orientation log-Gabor bank to produce phase congruency maps
with Rayleigh noise compensation; gradients come from a 3x3 derivative
stencil; the I/Q chroma planes contribute a compressed similarity factor;
everything is pooled weighted by the pointwise max phase congruency.

Inputs are [0,1] images; they are rescaled to 0..255 internally because
the stabilizer constants (T2, T3, T4) are calibrated for 8-bit ranges.
"""
from __future__ import annotations

import numpy as np
from scipy.ndimage import correlate
from scipy.signal import convolve2d

from .core import RgbImage
from .errors import MismatchError
from .metrics import MetricScore

_NSCALE = 4
_NORIENT = 4
_MIN_WAVELENGTH = 6
_MULT = 2
_SIGMA_ONF = 0.55
_DTHETA_ON_SIGMA = 1.2
_K = 2.0
_EPSILON = 1e-4

_T1 = 0.85
_T2 = 160.0
_T3 = 200.0
_T4 = 200.0
_LAMBDA = 0.03

_MIN_SIDE = 32

_DX = np.array([[3.0, 0.0, -3.0],
                [10.0, 0.0, -10.0],
                [3.0, 0.0, -3.0]]) / 16.0


def _round_half_away(x: float) -> int:
    return int(np.floor(x + 0.5))


def _freq_grid(rows: int, cols: int) -> tuple[np.ndarray, np.ndarray]:
    """Normalized frequency radius/angle grids in FFT (corner-DC) layout.

    Odd extents span [-(n-1)/2, (n-1)/2]/(n-1); even span [-n/2, n/2-1]/n.
    """
    if cols % 2:
        x = np.arange(-(cols - 1) / 2.0, (cols - 1) / 2.0 + 1.0) / (cols - 1)
    else:
        x = np.arange(-(cols / 2.0), cols / 2.0) / cols
    if rows % 2:
        y = np.arange(-(rows - 1) / 2.0, (rows - 1) / 2.0 + 1.0) / (rows - 1)
    else:
        y = np.arange(-(rows / 2.0), rows / 2.0) / rows
    xg, yg = np.meshgrid(x, y)
    radius = np.fft.ifftshift(np.sqrt(xg * xg + yg * yg))
    theta = np.fft.ifftshift(np.arctan2(-yg, xg))
    return radius, theta


def _phase_congruency(im: np.ndarray) -> np.ndarray:
    """Phase congruency map (the PC_2 measure) of one grayscale plane."""
    rows, cols = im.shape
    imfft = np.fft.fft2(im)

    radius, theta = _freq_grid(rows, cols)
    lowpass = 1.0 / (1.0 + (radius / 0.45) ** 30)  # Butterworth, cutoff .45, order 15
    radius[0, 0] = 1.0  # suppress the log singularity at DC
    sintheta, costheta = np.sin(theta), np.cos(theta)

    log_gabor = []
    for s in range(_NSCALE):
        f0 = 1.0 / (_MIN_WAVELENGTH * _MULT ** s)
        g = np.exp(-(np.log(radius / f0) ** 2) / (2.0 * np.log(_SIGMA_ONF) ** 2))
        g *= lowpass
        g[0, 0] = 0.0
        log_gabor.append(g)

    theta_sigma = np.pi / _NORIENT / _DTHETA_ON_SIGMA
    energy_all = np.zeros(im.shape)
    an_all = np.zeros(im.shape)

    for o in range(_NORIENT):
        angl = o * np.pi / _NORIENT
        ds = sintheta * np.cos(angl) - costheta * np.sin(angl)
        dc = costheta * np.cos(angl) + sintheta * np.sin(angl)
        dtheta = np.abs(np.arctan2(ds, dc))
        spread = np.exp(-(dtheta ** 2) / (2.0 * theta_sigma ** 2))

        sum_e = np.zeros(im.shape)
        sum_o = np.zeros(im.shape)
        sum_an = np.zeros(im.shape)
        responses = []
        ifft_filters = []
        em_n = 0.0
        for s in range(_NSCALE):
            filt = log_gabor[s] * spread
            ifft_filters.append(np.real(np.fft.ifft2(filt)) * np.sqrt(rows * cols))
            eo = np.fft.ifft2(imfft * filt)
            responses.append(eo)
            sum_an += np.abs(eo)
            sum_e += eo.real
            sum_o += eo.imag
            if s == 0:
                em_n = float(np.sum(filt * filt))

        x_energy = np.sqrt(sum_e ** 2 + sum_o ** 2) + _EPSILON
        mean_e = sum_e / x_energy
        mean_o = sum_o / x_energy
        energy = np.zeros(im.shape)
        for eo in responses:
            e, od = eo.real, eo.imag
            energy += e * mean_e + od * mean_o - np.abs(e * mean_o - od * mean_e)

        # noise threshold: the smallest-scale energy is chi^2 with 2 dof, so
        # its median pins the mean, which scaled by the filter power gives
        # the noise power and from it a Rayleigh-distributed energy floor
        median_e2n = float(np.median(np.abs(responses[0]) ** 2))
        mean_e2n = median_e2n / np.log(2.0)
        noise_power = mean_e2n / em_n

        est_sum_an2 = sum(float(np.sum(f * f)) for f in ifft_filters)
        est_sum_aiaj = 0.0
        for i in range(_NSCALE - 1):
            for j in range(i + 1, _NSCALE):
                est_sum_aiaj += float(np.sum(ifft_filters[i] * ifft_filters[j]))
        noise_energy2 = 2.0 * noise_power * est_sum_an2 + 4.0 * noise_power * est_sum_aiaj
        tau = np.sqrt(noise_energy2 / 2.0)
        noise_energy = tau * np.sqrt(np.pi / 2.0)
        noise_sigma = np.sqrt((2.0 - np.pi / 2.0) * tau ** 2)
        # the 1.7 rescale compensates the overestimate of the noise effect
        # for this phase congruency variant
        t = (noise_energy + _K * noise_sigma) / 1.7

        energy_all += np.maximum(energy - t, 0.0)
        an_all += sum_an

    # a perfectly flat plane has zero response everywhere; define PC = 0
    # there instead of 0/0
    return energy_all / np.maximum(an_all, 1e-12)


def _yiq(px255: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r, g, b = px255[:, :, 0], px255[:, :, 1], px255[:, :, 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    i = 0.596 * r - 0.274 * g - 0.322 * b
    q = 0.211 * r - 0.523 * g + 0.312 * b
    return y, i, q


def _downsample(plane: np.ndarray, factor: int) -> np.ndarray:
    if factor == 1:
        return plane
    kernel = np.full((factor, factor), 1.0 / (factor * factor))
    # box average anchored like the reference code: for even factors the
    # window starts at the pixel itself and extends right/down
    origin = -1 if factor % 2 == 0 else 0
    averaged = correlate(plane, kernel, mode="constant", cval=0.0,
                         origin=(origin, origin))
    return averaged[::factor, ::factor]


def _signed_power(base: np.ndarray, exponent: float) -> np.ndarray:
    """Real part of the principal-branch power for possibly negative bases."""
    mag = np.abs(base) ** exponent
    return np.where(base < 0.0, mag * np.cos(np.pi * exponent), mag)


def _gradient_magnitude(plane: np.ndarray) -> np.ndarray:
    gx = convolve2d(plane, _DX, mode="same", boundary="fill")
    gy = convolve2d(plane, _DX.T, mode="same", boundary="fill")
    return np.sqrt(gx * gx + gy * gy)


def fsimc(ref: RgbImage, test: RgbImage) -> MetricScore:
    """Feature similarity between two images, chromatic variant."""
    if ref.pixels.shape != test.pixels.shape:
        raise MismatchError(
            f"image dimensions differ: {ref.width}x{ref.height} vs {test.width}x{test.height}")
    if min(ref.width, ref.height) < _MIN_SIDE:
        raise MismatchError(
            f"images must be at least {_MIN_SIDE}px on each side for the "
            f"filter bank, got {ref.width}x{ref.height}")

    y1, i1, q1 = _yiq(ref.pixels * 255.0)
    y2, i2, q2 = _yiq(test.pixels * 255.0)

    factor = max(1, _round_half_away(min(ref.height, ref.width) / 256.0))
    y1, i1, q1 = (_downsample(p, factor) for p in (y1, i1, q1))
    y2, i2, q2 = (_downsample(p, factor) for p in (y2, i2, q2))

    pc1 = _phase_congruency(y1)
    pc2 = _phase_congruency(y2)
    g1 = _gradient_magnitude(y1)
    g2 = _gradient_magnitude(y2)

    pc_sim = (2.0 * pc1 * pc2 + _T1) / (pc1 ** 2 + pc2 ** 2 + _T1)
    grad_sim = (2.0 * g1 * g2 + _T2) / (g1 ** 2 + g2 ** 2 + _T2)
    i_sim = (2.0 * i1 * i2 + _T3) / (i1 ** 2 + i2 ** 2 + _T3)
    q_sim = (2.0 * q1 * q2 + _T4) / (q1 ** 2 + q2 ** 2 + _T4)

    pcm = np.maximum(pc1, pc2)
    sim = grad_sim * pc_sim * _signed_power(i_sim * q_sim, _LAMBDA)

    weight_total = float(pcm.sum())
    if weight_total == 0.0:
        # flat vs flat: no feature carries weight; fall back to the plain mean
        return MetricScore("fsimc", float(sim.mean()))
    return MetricScore("fsimc", float((sim * pcm).sum() / weight_total))
