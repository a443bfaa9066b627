"""Diagonal generator arithmetic on a weighted-ℓ² scale of spaces.

The model is a diagonal operator ``A e_n = lambda_n e_n`` on a separable
Hilbert space with Riesz weights ``w_n > 0``, all eigenvalues in the open left
half-plane.  Three rungs of the usual interpolation/extrapolation ladder are
tracked per vector through a scale tag:

    ``X1``  : graph norm      ``sum w_n (1 + |lambda_n|^2) |x_n|^2``
    ``X``   : base norm       ``sum w_n |x_n|^2``
    ``Xm1`` : completion norm ``sum w_n |x_n|^2 / |beta - lambda_n|^2``

with ``beta`` a fixed resolvent point.  The semigroup ``e^{lambda_n t}``, the
resolvent ``1/(lambda - lambda_n)`` (raises the scale), the principal square
root ``(-lambda_n)^{1/2}`` (lowers it), and bounded functional calculus
``g(-lambda_n)`` all act coefficient-wise, which makes every operation exact
up to one floating-point function evaluation per mode.

All objects are immutable and all operations pure; reductions use numpy's
pairwise summation, so results are deterministic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "SpectralError",
    "SpectrumHit",
    "SectorError",
    "DiagonalGenerator",
    "SpectralVector",
    "basis_vector",
    "semigroup_apply",
    "resolvent_apply",
    "frac_power_apply",
    "hinf_multiplier",
    "sector_angle",
    "space_norm",
    "generator_to_json",
    "generator_from_json",
]

_SCALES = ("Xm1", "X", "X1")
_OVERFLOW = 1e300


class SpectralError(Exception):
    """Base error for diagonal-model computations."""


class SpectrumHit(SpectralError):
    """Resolvent requested at (or numerically on top of) an eigenvalue."""


class SectorError(SpectralError):
    """Operation requires a sector angle below pi/2."""


class DiagonalGenerator:
    """Diagonal generator with eigenvalues in the open left half-plane.

    Parameters
    ----------
    eigenvalues:
        Complex sequence with ``Re lambda_n < 0`` (a positive decay margin
        ``delta = -max Re lambda_n`` is enforced).
    weights:
        Positive reals ``w_n``; defaults to 1 (orthonormal basis).
    beta:
        Reference resolvent point for the ``Xm1`` norm.  Defaults to 0 when
        the spectrum stays away from the origin, else 1.
    """

    def __init__(self, eigenvalues, weights=None, beta: complex | None = None):
        lam = np.asarray(eigenvalues, dtype=complex)
        if lam.ndim != 1 or lam.size == 0:
            raise SpectralError("need a nonempty 1-d eigenvalue list")
        if not np.all(np.isfinite(lam.real) & np.isfinite(lam.imag)):
            raise SpectralError("eigenvalues must be finite")
        if np.any(lam.real >= 0.0):
            raise SpectralError("eigenvalues must satisfy Re lambda < 0")
        if weights is None:
            w = np.ones(lam.size, dtype=float)
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != lam.shape:
                raise SpectralError("weights must align with eigenvalues")
            if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
                raise SpectralError("weights must be positive and finite")
        if beta is None:
            beta = 0.0 if float(np.min(np.abs(lam))) > 1e-12 else 1.0
        beta = complex(beta)
        gap = float(np.min(np.abs(beta - lam)))
        if gap <= 1e-14 * (1.0 + abs(beta)):
            raise SpectralError("beta must stay away from the spectrum")
        self.eigenvalues = lam
        self.weights = w
        self.beta = beta
        self.eigenvalues.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def n_modes(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def delta(self) -> float:
        """Exponential stability margin: -(largest real part)."""
        return float(-np.max(self.eigenvalues.real))

    @property
    def sector_angle(self) -> float:
        """sup_n |arg(-lambda_n)|, in [0, pi/2) by the half-plane constraint."""
        return float(
            np.max(np.arctan2(np.abs(self.eigenvalues.imag), -self.eigenvalues.real))
        )

    @property
    def analytic(self) -> bool:
        return self.sector_angle < 0.5 * math.pi

    @classmethod
    def from_ray(
        cls,
        base: float,
        exponent: float,
        angle: float,
        count: int,
        weights=None,
        beta: complex | None = None,
    ) -> "DiagonalGenerator":
        """lambda_n = -|base| * n**exponent * e^{i*angle}, n = 1..count."""
        if count < 1:
            raise SpectralError("ray rule needs count >= 1")
        if not abs(angle) < 0.5 * math.pi:
            raise SpectralError("ray angle must satisfy |angle| < pi/2")
        if base == 0.0:
            raise SpectralError("ray rule needs a nonzero base")
        n = np.arange(1, count + 1, dtype=float)
        lam = -abs(base) * n**exponent * cmath.exp(1j * angle)
        return cls(lam, weights=weights, beta=beta)

    def __repr__(self) -> str:  # pragma: no cover - debug helper
        return (
            f"DiagonalGenerator(n_modes={self.n_modes}, delta={self.delta:.3g}, "
            f"sector={self.sector_angle:.3g}, beta={self.beta})"
        )


@dataclass(frozen=True)
class SpectralVector:
    """Coefficient vector tagged with its scale rung ('X1', 'X' or 'Xm1')."""

    coefficients: np.ndarray
    scale: str = "X"

    def __post_init__(self):
        coeff = np.asarray(self.coefficients, dtype=complex)
        if coeff.ndim != 1:
            raise SpectralError("coefficients must be a 1-d vector")
        if self.scale not in _SCALES:
            raise SpectralError(f"unknown scale tag {self.scale!r}")
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)


def basis_vector(A: DiagonalGenerator, n: int, scale: str = "X") -> SpectralVector:
    """Canonical basis vector e_n (0-indexed)."""
    if not 0 <= n < A.n_modes:
        raise SpectralError("basis index out of range")
    coeff = np.zeros(A.n_modes, dtype=complex)
    coeff[n] = 1.0
    return SpectralVector(coeff, scale)


def _check_aligned(A: DiagonalGenerator, x: SpectralVector) -> None:
    if x.coefficients.size != A.n_modes:
        raise SpectralError("vector length does not match the generator")


def space_norm(A: DiagonalGenerator, x: SpectralVector) -> float:
    """Weighted-ℓ² norm in the tagged scale; +inf when any term overflows."""
    _check_aligned(A, x)
    lam = A.eigenvalues
    if x.scale == "X":
        factor = A.weights
    elif x.scale == "X1":
        factor = A.weights * (1.0 + np.abs(lam) ** 2)
    else:
        factor = A.weights / np.abs(A.beta - lam) ** 2
    with np.errstate(over="ignore"):
        terms = factor * np.abs(x.coefficients) ** 2
    if np.any(~np.isfinite(terms)) or np.any(terms > _OVERFLOW):
        return math.inf
    return float(math.sqrt(float(np.sum(terms))))


def semigroup_apply(A: DiagonalGenerator, t: float, x: SpectralVector) -> SpectralVector:
    """x_n -> e^{lambda_n t} x_n; scale tag preserved; requires t >= 0."""
    _check_aligned(A, x)
    if not (t >= 0.0 and math.isfinite(t)):
        raise SpectralError("semigroup time must be finite and nonnegative")
    if t == 0.0:
        return x
    with np.errstate(under="ignore"):
        factors = np.exp(A.eigenvalues * t)
    return SpectralVector(x.coefficients * factors, x.scale)


def resolvent_apply(
    A: DiagonalGenerator, lam: complex, x: SpectralVector
) -> SpectralVector:
    """x_n -> x_n / (lambda - lambda_n); raises the scale one rung (cap X1)."""
    _check_aligned(A, x)
    lam = complex(lam)
    dist = np.abs(lam - A.eigenvalues)
    if float(np.min(dist)) < 1e-14 * (1.0 + abs(lam)):
        raise SpectrumHit(f"lambda = {lam} is numerically on the spectrum")
    coeff = x.coefficients / (lam - A.eigenvalues)
    new_scale = _SCALES[min(_SCALES.index(x.scale) + 1, len(_SCALES) - 1)]
    return SpectralVector(coeff, new_scale)


def frac_power_apply(A: DiagonalGenerator, x: SpectralVector) -> SpectralVector:
    """x_n -> (-lambda_n)^{1/2} x_n (principal branch); lowers the scale one rung.

    The principal root is single-valued because ``-lambda_n`` lies in the open
    right half-plane (|arg| < pi/2); real spectra give real positive roots.
    """
    _check_aligned(A, x)
    if not A.sector_angle < 0.5 * math.pi:
        raise SectorError("square root needs sector angle < pi/2")
    if x.scale == "Xm1":
        raise SpectralError("square root is applied on the X or X1 rung")
    roots = np.sqrt(-A.eigenvalues)
    new_scale = _SCALES[_SCALES.index(x.scale) - 1]
    return SpectralVector(x.coefficients * roots, new_scale)


def hinf_multiplier(
    A: DiagonalGenerator, g: Callable[[np.ndarray], np.ndarray], x: SpectralVector
) -> tuple[SpectralVector, float]:
    """x_n -> g(-lambda_n) x_n with the diagonal multiplier bound sup_n |g(-lambda_n)|.

    ``g`` is evaluated on the vector of right-half-plane points ``-lambda_n``
    (a scalar-only callable is applied mode by mode).
    """
    _check_aligned(A, x)
    z = -A.eigenvalues
    try:
        vals = np.asarray(g(z), dtype=complex)
        if vals.shape != z.shape:
            raise TypeError
    except TypeError:
        vals = np.array([complex(g(zi)) for zi in z])
    if not np.all(np.isfinite(vals.real) & np.isfinite(vals.imag)):
        raise SpectralError("multiplier is not finite on the spectrum")
    bound = float(np.max(np.abs(vals)))
    return SpectralVector(x.coefficients * vals, x.scale), bound


def sector_angle(A: DiagonalGenerator) -> float:
    """sup_n |arg(-lambda_n)| (functional form of the generator property)."""
    return A.sector_angle


def generator_to_json(A: DiagonalGenerator) -> dict:
    return {
        "kind": "explicit",
        "eigenvalues": [[z.real, z.imag] for z in A.eigenvalues],
        "weights": [float(w) for w in A.weights],
        "beta": [A.beta.real, A.beta.imag],
    }


def generator_from_json(obj: dict) -> DiagonalGenerator:
    """Build a generator from an explicit list or a ray rule.

    Accepted forms::

        {"kind": "explicit", "eigenvalues": [[re, im], ...],
         "weights"?: [...], "beta"?: [re, im]}
        {"kind": "ray", "base": -1, "exponent": a, "angle": phi, "count": N,
         "weights"?: [...], "beta"?: [re, im]}
    """
    try:
        kind = obj.get("kind", "explicit")
        beta = obj.get("beta")
        if beta is not None:
            beta = complex(beta[0], beta[1]) if isinstance(beta, (list, tuple)) else complex(beta)
        weights = obj.get("weights")
        if kind == "ray":
            return DiagonalGenerator.from_ray(
                float(obj["base"]),
                float(obj["exponent"]),
                float(obj["angle"]),
                int(obj["count"]),
                weights=weights,
                beta=beta,
            )
        if kind == "explicit":
            lam = [complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z)
                   for z in obj["eigenvalues"]]
            return DiagonalGenerator(lam, weights=weights, beta=beta)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SpectralError(f"malformed generator object: {exc}") from exc
    raise SpectralError(f"unknown generator kind {kind!r}")
