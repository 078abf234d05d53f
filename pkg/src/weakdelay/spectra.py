"""Spectra, postselected pointer distributions, and spectral moments.

A :class:`Spectrum` is a histogram of photon counts (or probability mass)
over a strictly increasing wavelength grid.  Each bin contributes a point
mass at its centre frequency omega(lambda) = 2 pi c / lambda; integrals over
frequency are plain weighted sums.  No d(lambda) -> d(omega) Jacobian is
applied because the data are per-bin counts, which is what a spectrometer
reports and what the moment integrals consume.

The postselected distribution of port j is

    P_j(omega) = |<f_j|i>|^2 * P_0(omega) * zeta_j(omega, g)
    zeta_j     = cos^2(g w) + sin^2(g w) |A_wj|^2 + sin(2 g w) Im(A_wj)

with the exact trigonometric reshaping factor zeta (no small-g expansion
anywhere in the forward model).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import wavelength_to_angular_frequency
from .errors import DegenerateRecordError, DomainError, ModelError
from .polarization import WeakValuePair, ideal_weak_values


@dataclass(frozen=True)
class Spectrum:
    """Nonnegative weights over a strictly increasing wavelength grid [nm]."""

    grid_nm: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid_nm, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "grid_nm", grid)
        object.__setattr__(self, "weights", weights)
        if grid.ndim != 1 or grid.size < 2:
            raise DomainError("spectrum grid needs at least 2 samples")
        if weights.shape != grid.shape:
            raise DomainError("weights and grid must have equal length")
        if not np.all(np.diff(grid) > 0):
            raise DomainError("wavelength grid must be strictly increasing")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise DomainError("weights must be finite and nonnegative")

    @property
    def omega(self) -> np.ndarray:
        """Bin-centre angular frequencies [rad/s]."""
        return wavelength_to_angular_frequency(self.grid_nm)

    def total(self) -> float:
        return float(self.weights.sum())

    def normalized(self) -> "Spectrum":
        tot = self.total()
        if tot <= 0:
            raise DegenerateRecordError("cannot normalize an empty spectrum")
        return Spectrum(self.grid_nm, self.weights / tot)

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return abs(self.total() - 1.0) <= tol


@dataclass(frozen=True)
class MeasurementRecord:
    """Per-port spectra on a shared grid plus acquisition metadata.

    For raw photon-count records ``total_events`` equals the summed counts
    of both ports; noise-free (expected-value) records carry total weight 1
    and ``total_events == 0`` as a sentinel.
    """

    port1: Spectrum
    port2: Spectrum
    total_events: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.array_equal(self.port1.grid_nm, self.port2.grid_nm):
            raise DomainError("port spectra must share one wavelength grid")
        if self.total_events:
            counted = self.port1.total() + self.port2.total()
            if abs(counted - self.total_events) > 1e-6 * max(1.0, self.total_events):
                raise DomainError(
                    f"count mismatch: ports sum to {counted}, expected {self.total_events}"
                )

    @property
    def grid_nm(self) -> np.ndarray:
        return self.port1.grid_nm

    @property
    def omega(self) -> np.ndarray:
        return self.port1.omega

    def total_weight(self) -> float:
        """Normalizer for the sub-normalized measures Q_j (counts or mass)."""
        return self.port1.total() + self.port2.total()


@dataclass(frozen=True)
class SpectralMoments:
    """Zeroth, first and second frequency moments of one port.

    p0 is the port probability (integral of the sub-normalized Q_j); m1 and
    m2 are moments against the same sub-normalized measure, so m1 -> p0 *
    <omega> for a narrow line.  The barred variants divide by p0 and are NaN
    for an empty port.
    """

    p0: float
    m1: float
    m2: float
    m1_bar: float
    m2_bar: float


def moments(port: Spectrum, normalize_by_total: float) -> SpectralMoments:
    """Moments of one port spectrum, sub-normalized by the two-port total."""
    if not normalize_by_total > 0:
        raise DegenerateRecordError("total event count must be positive")
    q = port.weights / normalize_by_total
    omega = port.omega
    p0 = float(q.sum())
    m1 = float((q * omega).sum())
    m2 = float((q * omega ** 2).sum())
    if p0 > 0:
        m1_bar, m2_bar = m1 / p0, m2 / p0
    else:
        m1_bar = m2_bar = float("nan")
    return SpectralMoments(p0=p0, m1=m1, m2=m2, m1_bar=m1_bar, m2_bar=m2_bar)


def record_moments(record: MeasurementRecord) -> tuple[SpectralMoments, SpectralMoments]:
    """Moments of both ports against the shared two-port normalizer."""
    tot = record.total_weight()
    return moments(record.port1, tot), moments(record.port2, tot)


def pooled_variance(record: MeasurementRecord) -> float:
    """Frequency variance of the two ports pooled into one spectrum."""
    w = record.port1.weights + record.port2.weights
    tot = w.sum()
    if tot <= 0:
        raise DegenerateRecordError("empty record")
    omega = record.omega
    mean = (w * omega).sum() / tot
    return float((w * omega ** 2).sum() / tot - mean ** 2)


def zeta(omega, g: float, aw):
    """Spectral reshaping factor of a postselected port (exact trig form).

    zeta = cos^2(g w) + sin^2(g w) |aw|^2 + sin(2 g w) Im(aw), which equals
    |cos(g w) - i sin(g w) aw|^2 and is therefore nonnegative for every
    complex weak value.  Near a port null the three-term sum can round a
    hair below zero; roundoff-scale negatives are clamped to 0, while
    anything beyond roundoff (possible only for non-finite or inconsistent
    inputs) is reported as a model error.
    """
    om = np.asarray(omega, dtype=float)
    aw = np.asarray(aw)
    x = g * om
    mod = np.abs(aw)
    out = np.cos(x) ** 2 + np.sin(x) ** 2 * mod ** 2 + np.sin(2 * x) * np.imag(aw)
    roundoff = 32.0 * np.finfo(float).eps * (1.0 + mod) ** 2
    out = np.where((out < 0) & (out >= -roundoff), 0.0, out)
    if not np.all(np.isfinite(out)) or np.any(out < 0):
        raise ModelError("zeta produced negative or non-finite values; "
                         "inconsistent (omega, g, aw) inputs")
    return float(out) if (np.ndim(omega) == 0 and np.ndim(aw) == 0) else out


def postselected_distribution(source: Spectrum, g: float, aw, overlap_sq: float) -> Spectrum:
    """Unnormalized port distribution overlap^2 * P0(w) * zeta(w, g, aw).

    The total of the returned spectrum is the postselection probability of
    the port, so the output is deliberately not renormalized.
    """
    if not source.is_normalized():
        raise DomainError("source spectrum must be normalized")
    if not 0.0 <= overlap_sq <= 1.0:
        raise DomainError("overlap_sq must lie in [0, 1]")
    shape = zeta(source.omega, g, aw)
    return Spectrum(source.grid_nm, overlap_sq * source.weights * shape)


def postselection_probabilities_exact(source: Spectrum, tau: float, phi: float):
    """Exact port probabilities (P_f1, P_f2) for an ideal analyzer.

    Integrates the exact reshaping factor against the source histogram.  In
    the small-tau limit this reduces to the quadratic form

        P_f1 ~ cos^2(phi/2) [1 + (tan^2(phi/2)-1) w0^2 t^2 + 2 tan(phi/2) w0 t]

    but only when the spectral spread is small against w0; the second-order
    term of the exact integral carries <w^2>, not w0^2.
    """
    wv = ideal_weak_values(phi)
    ov1 = np.cos(phi / 2) ** 2
    ov2 = np.sin(phi / 2) ** 2
    p1 = postselected_distribution(source, tau, wv.aw1, ov1).total()
    p2 = postselected_distribution(source, tau, wv.aw2, ov2).total()
    return p1, p2


def completeness_defect(source: Spectrum, tau: float, weak_values: WeakValuePair,
                        overlap_sq_1: float, overlap_sq_2: float) -> float:
    """Max deviation of sum_j overlap_j^2 zeta_j(w, tau) from 1 over the grid.

    Zero (to rounding) whenever the two postselection ports form an
    orthogonal resolution at each frequency, dispersive analyzers included.
    """
    z1 = zeta(source.omega, tau, weak_values.aw1)
    z2 = zeta(source.omega, tau, weak_values.aw2)
    return float(np.abs(overlap_sq_1 * z1 + overlap_sq_2 * z2 - 1.0).max())
