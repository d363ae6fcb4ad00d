"""Initial data on the circle ``[0, 1)`` or on the real line.

A datum is one of

* a builtin family with parameters (``CIRCLE_FAMILIES``, ``LINE_FAMILIES``),
* a list of complex Fourier coefficients ``c_0..c_K`` on the circle, with
  ``u(x) = Re c_0 + 2 sum_{k>=1} Re(c_k e^{2 pi i k x})``,
* uniform samples on the circle (trigonometric interpolation).

JSON form: ``{"domain": "circle"|"line", "family": {"name": ..., "params": {...}}}``
or ``{"domain": "circle", "fourier": [[re, im], ...]}`` or
``{"domain": "circle", "samples": [...]}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import erfc, erfcx

CIRCLE_FAMILIES = ("sine", "peakon_smoothed", "constant")
LINE_FAMILIES = ("gaussian", "gaussian_odd", "gaussian_sine", "bump", "peakon", "peakon_smoothed")
MIN_SAMPLES = 64


class DatumError(ValueError):
    pass


def _fourier_eval(coeffs: np.ndarray, x, order: int = 0):
    x = np.asarray(x, dtype=float)
    k = np.arange(coeffs.size)
    phase = np.exp(2j * np.pi * np.multiply.outer(x, k))
    mult = (2j * np.pi * k) ** order
    w = np.full(coeffs.size, 2.0)
    w[0] = 1.0
    out = (phase * (w * mult * coeffs)).real.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def _samples_to_coeffs(samples: np.ndarray) -> np.ndarray:
    n = samples.size
    c = np.fft.rfft(samples) / n
    if n % 2 == 0:
        c[-1] *= 0.5  # split the Nyquist mode symmetrically
        c[-1] = c[-1].real
    return c


@dataclass
class InitialDatum:
    domain: str
    family: Optional[str] = None
    params: dict = field(default_factory=dict)
    fourier: Optional[np.ndarray] = None
    samples: Optional[np.ndarray] = None
    decay_flag: bool = False

    def __post_init__(self):
        if self.domain not in ("circle", "line"):
            raise DatumError(f"unknown domain {self.domain!r}")
        given = sum(v is not None for v in (self.family, self.fourier, self.samples))
        if given != 1:
            raise DatumError("exactly one of family, fourier, samples is required")
        if self.family is not None:
            allowed = CIRCLE_FAMILIES if self.domain == "circle" else LINE_FAMILIES
            if self.family not in allowed:
                raise DatumError(f"family {self.family!r} not available on the {self.domain}")
        if (self.fourier is not None or self.samples is not None) and self.domain != "circle":
            raise DatumError("Fourier and sampled data are supported on the circle only")
        if self.fourier is not None:
            self.fourier = np.asarray(self.fourier, dtype=complex)
        if self.samples is not None:
            s = np.asarray(self.samples, dtype=float)
            if s.size < MIN_SAMPLES:
                raise DatumError(f"sampled data need at least {MIN_SAMPLES} points")
            self.samples = s
            c = _samples_to_coeffs(s)
            self.fourier = c
            self.decay_flag = not _decays_like_k2(c)

    # -- constructors -------------------------------------------------------

    @classmethod
    def sine(cls, a: float = 1.0, k: int = 1, c: float = 0.0, shift: float = 0.0):
        return cls("circle", "sine", {"a": a, "k": k, "c": c, "shift": shift})

    @classmethod
    def from_dict(cls, d: dict) -> "InitialDatum":
        domain = d.get("domain", "circle")
        if "family" in d:
            fam = d["family"]
            if isinstance(fam, str):
                return cls(domain, fam, dict(d.get("params", {})))
            return cls(domain, fam["name"], dict(fam.get("params", {})))
        if "fourier" in d:
            coeffs = [complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in d["fourier"]]
            return cls(domain, fourier=np.array(coeffs))
        if "samples" in d:
            return cls(domain, samples=np.array(d["samples"], dtype=float))
        raise DatumError("datum needs one of 'family', 'fourier', 'samples'")

    @classmethod
    def from_json(cls, path) -> "InitialDatum":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = {"domain": self.domain}
        if self.family is not None:
            d["family"] = {"name": self.family, "params": self.params}
        elif self.samples is not None:
            d["samples"] = self.samples.tolist()
        else:
            d["fourier"] = [[c.real, c.imag] for c in self.fourier]
        return d

    # -- evaluation ---------------------------------------------------------

    def u(self, x):
        return self._eval(x, 0)

    def ux(self, x):
        return self._eval(x, 1)

    def _eval(self, x, order: int):
        if self.fourier is not None:
            return _fourier_eval(self.fourier, x, order)
        fn = _FAMILY_EVAL[(self.domain, self.family)]
        x = np.asarray(x, dtype=float)
        out = np.asarray(fn(x, order, **self.params), dtype=float)
        if out.ndim == 0 and x.ndim > 0:
            out = np.full(x.shape, float(out))
        return float(out) if out.ndim == 0 else out

    def grid_values(self, n: int):
        """``(x, u, u_x)`` on ``j/n`` (circle only)."""
        if self.domain != "circle":
            raise DatumError("grid values are defined on the circle")
        x = np.arange(n) / n
        return x, np.asarray(self.u(x), dtype=float), np.asarray(self.ux(x), dtype=float)


def _decays_like_k2(c: np.ndarray) -> bool:
    """True when ``|c_k| <= C k^-2`` with C fitted on the lowest quarter of the modes."""
    mag = np.abs(c[1:])
    if mag.size < 8 or mag.max() == 0.0:
        return True
    k = np.arange(1, mag.size + 1)
    q = max(mag.size // 4, 2)
    C = np.max(mag[:q] * k[:q] ** 2)
    return bool(np.all(mag[q:] <= 10.0 * C * k[q:] ** -2.0 + 1e-14 * mag.max()))


# ---------------------------------------------------------------------------
# builtin families; each takes (x, order, **params)


def _sine(x, order, a=1.0, k=1, c=0.0, shift=0.0):
    w = 2.0 * np.pi * k
    arg = w * (x - shift)
    if order == 0:
        return a * np.sin(arg) + c
    return a * w * np.cos(arg)


def _constant(x, order, c=1.0):
    return np.full(np.shape(x), c if order == 0 else 0.0)


def _peakon_circle(x, order, a=1.0, sigma=0.02, shift=0.0, modes=256):
    k = np.arange(modes + 1)
    coeffs = a / (1.0 + 4.0 * np.pi**2 * k**2) * np.exp(-2.0 * np.pi**2 * sigma**2 * k**2)
    coeffs = coeffs * np.exp(-2j * np.pi * k * shift)
    return _fourier_eval(coeffs, x, order)


def _gaussian(x, order, a=1.0, s=1.0, x0=0.0):
    y = (x - x0) / s
    g = a * np.exp(-0.5 * y * y)
    return g if order == 0 else -y / s * g


def _gaussian_odd(x, order, a=1.0, s=1.0, x0=0.0):
    y = (x - x0) / s
    g = np.exp(-y * y)
    if order == 0:
        return a * y * g
    return a * (1.0 - 2.0 * y * y) * g / s


def _gaussian_sine(x, order, a=1.0, k=1.0, s=1.0):
    w = 2.0 * np.pi * k
    g = np.exp(-(x / s) ** 2)
    if order == 0:
        return a * np.sin(w * x) * g
    return a * (w * np.cos(w * x) - 2.0 * x / s**2 * np.sin(w * x)) * g


def _bump(x, order, a=1.0, r=1.0, x0=0.0):
    y = (x - x0) / r
    inside = np.abs(y) < 1.0
    ys = np.where(inside, y, 0.0)
    g = np.where(inside, a * np.exp(-1.0 / (1.0 - ys * ys)), 0.0)
    if order == 0:
        return g
    return np.where(inside, g * (-2.0 * ys / (1.0 - ys * ys) ** 2) / r, 0.0)


def _peakon_line(x, order, a=1.0):
    # a e^{-|x|}/2; at x = 0 the derivative is taken as the mean of the one-sided values
    g = 0.5 * a * np.exp(-np.abs(x))
    return g if order == 0 else -np.sign(x) * g


def _peakon_smoothed_line(x, order, a=1.0, sigma=0.1):
    # (e^{-|x|}/2) convolved with a centred Gaussian of width sigma
    s2 = sigma * math.sqrt(2.0)
    pre = 0.25 * a * math.exp(0.5 * sigma**2)
    em = _exp_erfc(-x, (sigma**2 - x) / s2)
    ep = _exp_erfc(x, (sigma**2 + x) / s2)
    return pre * (em + ep) if order == 0 else pre * (ep - em)


def _exp_erfc(a, z):
    """``e^a erfc(z)`` without overflow when ``a`` and ``z`` are both large."""
    zp = np.maximum(z, 0.0)
    big = np.exp(np.minimum(a - zp * zp, 700.0)) * erfcx(zp)
    small = np.exp(np.minimum(a, 700.0)) * erfc(np.minimum(z, 0.0))
    return np.where(z > 0.0, big, small)


_FAMILY_EVAL = {
    ("circle", "sine"): _sine,
    ("circle", "constant"): _constant,
    ("circle", "peakon_smoothed"): _peakon_circle,
    ("line", "gaussian"): _gaussian,
    ("line", "gaussian_odd"): _gaussian_odd,
    ("line", "gaussian_sine"): _gaussian_sine,
    ("line", "bump"): _bump,
    ("line", "peakon"): _peakon_line,
    ("line", "peakon_smoothed"): _peakon_smoothed_line,
}
