"""Closed-form and quadrature-oracle statistics of the fading models.

The fluctuating double-Rayleigh LoS SNR law is built by conditioning on the
squared magnitude x of the second scatter factor: given x the SNR is Rician
shadowed with K_x = K/x and mean gamma_bar_x = gamma_bar (K+x)/(K+1), and the
unconditional law follows by averaging against the unit-mean exponential
weight e^{-x}.

Two independent routes are kept for the main model on purpose:

* closed forms (integer m, K > 0) expressed through the generalized
  incomplete gamma Gamma(a, z, b), obtained by substituting
  t = K/m + x in the averaging integral and expanding (t - K/m)^j;
* quadrature oracles that integrate the conditional Rician shadowed
  pdf/cdf directly.

The closed-form cdf uses the inner summation limit s = 0..j that the
substitution actually produces; tests certify it against the oracle.
K = 0 removes the LoS term entirely (the law no longer depends on m) and is
served by the oracle path, avoiding 0^0 ambiguity in the closed-form weights.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np
from scipy.special import gammaincc, gammaln, i0e
from scipy.stats import ncx2

from .models import FadingParams
from .specfun import (AccuracyError, DomainError, QuadratureConfig,
                      _gig_scaled_vec, adaptive_quad_vec, gamma_tricomi_u,
                      log_kummer_1f1)

_DEFAULT = QuadratureConfig()
#: zero-abs-tol variant used for internal component integrals whose scales
#: span many decades; control must stay purely relative there.
_REL_ONLY = 1e-300
_GAMMA_CHUNK = 32


class UnderflowWarning(RuntimeWarning):
    """A density/probability underflowed below 1e-300 and was reported as 0."""


# ---------------------------------------------------------------------------
# curve container


@dataclass
class Curve:
    """A sampled function (grid, values) with provenance metadata."""

    abscissa: np.ndarray
    ordinate: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.ordinate = np.asarray(self.ordinate, dtype=float)
        if self.abscissa.shape != self.ordinate.shape or self.abscissa.ndim != 1:
            raise DomainError("abscissa and ordinate must be 1-d and equal length")
        if np.any(np.diff(self.abscissa) <= 0):
            raise DomainError("abscissa must be strictly increasing")
        quantity = self.meta.get("quantity")
        if quantity == "pdf" and np.any(self.ordinate < 0):
            raise DomainError("densities must be nonnegative")
        if quantity in ("cdf", "op") and (np.any(self.ordinate < 0)
                                          or np.any(self.ordinate > 1)):
            raise DomainError("probabilities must lie in [0, 1]")

    def write_csv(self, target) -> None:
        """Write `abscissa,value` rows with 17 significant digits (lossless)."""
        if hasattr(target, "write"):
            self._write(target)
        else:
            with open(target, "w", encoding="utf-8", newline="\n") as fh:
                self._write(fh)

    def _write(self, fh) -> None:
        fh.write("abscissa,value\n")
        for x, y in zip(self.abscissa, self.ordinate):
            fh.write(f"{x:.17g},{y:.17g}\n")

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self._write(buf)
        return buf.getvalue()


def read_curve_csv(source) -> Curve:
    if hasattr(source, "read"):
        rows = list(csv.reader(source))
    else:
        with open(source, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    if not rows or rows[0] != ["abscissa", "value"]:
        raise DomainError("expected header 'abscissa,value'")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    return Curve(data[:, 0], data[:, 1])


# ---------------------------------------------------------------------------
# Rician shadowed building blocks


def rs_pdf(gamma, k_x, m, gbar_x):
    """SNR density of the Rician shadowed model (any real m > 0).

    f(g) = m^m (1+K_x) / ((m+K_x)^m gbar_x) * exp(-(1+K_x) g / gbar_x)
           * 1F1(m; 1; K_x (1+K_x) g / ((K_x+m) gbar_x))

    Vectorizes over gamma and/or (k_x, gbar_x) by broadcasting; evaluated in
    log space so the huge-argument 1F1 against the tiny exponential prefactor
    stays finite.
    """
    gamma = np.asarray(gamma, dtype=float)
    k_x = np.asarray(k_x, dtype=float)
    gbar_x = np.asarray(gbar_x, dtype=float)
    if np.any(gamma < 0):
        raise DomainError("gamma must be nonnegative")
    if not (m > 0):
        raise DomainError("m must be positive")
    if np.any(k_x < 0) or np.any(gbar_x <= 0):
        raise DomainError("need k_x >= 0 and gbar_x > 0")
    w = k_x * (1.0 + k_x) * gamma / ((k_x + m) * gbar_x)
    logf = (m * math.log(m) + np.log1p(k_x) - m * np.log(m + k_x)
            - np.log(gbar_x) - (1.0 + k_x) * gamma / gbar_x
            + log_kummer_1f1(m, 1.0, w))
    out = np.exp(logf)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RsMixtureTerms:
    """Erlang-mixture weights and scale of the integer-m Rician shadowed pdf.

    The density equals sum_j C_j / (m-j-1)! * g^(m-j-1) / Omega^(m-j)
    * exp(-g/Omega); the weights C_j sum to one.
    """

    coefficients: np.ndarray
    omega: float

    def pdf(self, gamma):
        gamma = np.asarray(gamma, dtype=float)
        m = len(self.coefficients)
        out = np.zeros(gamma.shape)
        for j in range(m):
            out = out + (self.coefficients[j] / factorial(m - j - 1)
                         * gamma ** (m - j - 1) / self.omega ** (m - j)
                         * np.exp(-gamma / self.omega))
        return float(out) if out.ndim == 0 else out


def _mixture_weights(k, m, x):
    """C_j(x): binomial weights over (m x/(m x + K), K/(K + m x)), 0^0 = 1."""
    j = np.arange(m)
    if k == 0.0:
        c = np.zeros(m)
        c[m - 1] = 1.0
        return c
    p = m * x / (m * x + k)
    q = k / (k + m * x)
    logc = (gammaln(m) - gammaln(j + 1) - gammaln(m - j)
            + j * np.log(p) + (m - 1 - j) * np.log(q))
    return np.exp(logc)


def rs_pdf_integer_terms(x, k, m, gbar) -> RsMixtureTerms:
    """Mixture representation of the conditional law at scatter value x."""
    if x <= 0:
        raise DomainError("x must be positive")
    if k < 0 or gbar <= 0:
        raise DomainError("need K >= 0 and gbar > 0")
    m = _as_positive_int(m)
    omega = gbar * (k + m * x) / (m * (k + 1.0))
    return RsMixtureTerms(coefficients=_mixture_weights(k, m, x), omega=omega)


def rs_cdf_integer(gamma, k_x, m, gbar_x):
    """Rician shadowed SNR cdf for integer m.

    Mixture of Erlang cdfs: F = 1 - sum_j C_j * Q(m-j, g/Omega) with Q the
    regularized upper incomplete gamma (equals the finite exponential sum
    e^-y sum_{r<m-j} y^r/r! at integer shape, but stays stable for large y).
    """
    m = _as_positive_int(m)
    gamma = np.asarray(gamma, dtype=float)
    k_x = np.asarray(k_x, dtype=float)
    gbar_x = np.asarray(gbar_x, dtype=float)
    if np.any(gamma < 0):
        raise DomainError("gamma must be nonnegative")
    omega = gbar_x * (k_x + m) / (m * (1.0 + k_x))
    y = gamma / omega
    p = m / (m + k_x)
    q = k_x / (k_x + m)
    surv = np.zeros(np.broadcast(gamma, k_x, gbar_x).shape)
    for j in range(m):
        if j == m - 1:
            logc = gammaln(m) - gammaln(j + 1.0) - gammaln(m - j + 0.0) \
                + j * np.log(p)
        else:
            with np.errstate(divide="ignore"):
                logc = np.where(q > 0,
                                gammaln(m) - gammaln(j + 1.0) - gammaln(m - j + 0.0)
                                + j * np.log(p)
                                + (m - 1 - j) * np.log(np.where(q > 0, q, 1.0)),
                                -np.inf)
        surv = surv + np.exp(logc) * gammaincc(m - j, y)
    out = np.clip(1.0 - surv, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def rs_cdf(gamma, k_x, m, gbar_x, cfg: QuadratureConfig | None = None):
    """Rician shadowed cdf; closed form at integer m, else quadrature of rs_pdf."""
    if m == int(m):
        return rs_cdf_integer(gamma, k_x, int(m), gbar_x)
    gamma_arr = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(gamma_arr < 0):
        raise DomainError("gamma must be nonnegative")
    out = np.empty_like(gamma_arr)
    for i, g in enumerate(gamma_arr):
        if g == 0.0:
            out[i] = 0.0
            continue
        vals, _ = adaptive_quad_vec(lambda u: rs_pdf(u, k_x, m, gbar_x),
                                    0.0, float(g), cfg or _DEFAULT)
        out[i] = np.clip(vals[0], 0.0, 1.0)
    return float(out[0]) if np.ndim(gamma) == 0 else out


# ---------------------------------------------------------------------------
# fluctuating double-Rayleigh LoS: closed forms


def _as_positive_int(m):
    if m != int(m) or int(m) < 1:
        raise DomainError(f"m must be a positive integer, got {m}")
    return int(m)


def _rel_only_cfg(cfg):
    return QuadratureConfig(rel_tol=cfg.rel_tol, abs_tol=_REL_ONLY,
                            max_subdivisions=max(cfg.max_subdivisions, 400),
                            infinite_tail_cutoff_policy=cfg.infinite_tail_cutoff_policy)


def _gig_matrix(a_values, z, b_values, cfg):
    """e^z Gamma(a, z, b) on the grid a_values x b_values -> (nb, na)."""
    a_values = np.asarray(a_values, dtype=float)
    b_values = np.asarray(b_values, dtype=float)
    na, nb = len(a_values), len(b_values)

    def f(t):
        logt = np.log(t)
        pow_a = np.exp((a_values[None, :] - 1.0) * logt[:, None])      # (nt, na)
        core = np.exp(z - t[:, None] - b_values[None, :] / t[:, None])  # (nt, nb)
        return (core[:, :, None] * pow_a[:, None, :]).reshape(len(t), nb * na)

    vals, _ = adaptive_quad_vec(f, z, np.inf, cfg)
    return vals.reshape(nb, na)


def _check_pdf_sign(values):
    values = np.atleast_1d(values)
    scale = float(np.max(np.abs(values))) or 1.0
    if np.any(values < -1e-12 * scale):
        raise AccuracyError("cancellation produced a significantly negative "
                            "density; tighten the quadrature tolerances",
                            value=values)
    return np.maximum(values, 0.0)


def _flag_underflow(values):
    values = np.atleast_1d(values)
    tiny = (values != 0.0) & (np.abs(values) < 1e-300)
    if np.any(tiny):
        warnings.warn("values below 1e-300 reported as 0", UnderflowWarning)
        values = np.where(tiny, 0.0, values)
    return values


def fdrlos_pdf(gamma, params: FadingParams, cfg: QuadratureConfig | None = None):
    """SNR density of the fluctuating double-Rayleigh LoS model.

    Closed form for integer m and K > 0:

        f(g) = sum_{j<m} C(m-1,j) (K/m)^(m-j-1) (K+1)^(m-j) e^(K/m)
               / (gbar^(m-j) (m-j-1)!) * g^(m-j-1)
               * sum_{r<=j} C(j,r) (-K/m)^(j-r)
                 Gamma(r+j-2m+2, K/m, g (K+1)/gbar)

    evaluated with e^(K/m) folded into the Gamma integrals so large K never
    overflows.  K = 0 is routed to the quadrature oracle (the law is then the
    pure double-Rayleigh product, independent of m).
    """
    cfg = cfg or _DEFAULT
    if params.k == 0.0:
        return fdrlos_pdf_oracle(gamma, params, cfg)
    m = params.require_integer_m()
    gamma_arr = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(gamma_arr < 0):
        raise DomainError("gamma must be nonnegative")
    k, gbar = params.k, params.gamma_bar
    z = k / m
    a_values = np.arange(2 - 2 * m, 1)
    a_index = {a: i for i, a in enumerate(a_values)}
    comp_cfg = _rel_only_cfg(cfg)

    out = np.empty_like(gamma_arr)
    for lo in range(0, len(gamma_arr), _GAMMA_CHUNK):
        g = gamma_arr[lo:lo + _GAMMA_CHUNK]
        gig = _gig_matrix(a_values, z, g * (k + 1.0) / gbar, comp_cfg)
        total = np.zeros_like(g)
        for j in range(m):
            outer = (comb(m - 1, j) * z ** (m - j - 1)
                     * ((k + 1.0) / gbar) ** (m - j) / factorial(m - j - 1))
            inner = np.zeros_like(g)
            for r in range(j + 1):
                inner += (comb(j, r) * (-z) ** (j - r)
                          * gig[:, a_index[r + j - 2 * m + 2]])
            total += outer * g ** (m - j - 1) * inner
        out[lo:lo + _GAMMA_CHUNK] = total
    out = _flag_underflow(_check_pdf_sign(out))
    return float(out[0]) if np.ndim(gamma) == 0 else out


def fdrlos_pdf_oracle(gamma, params: FadingParams,
                      cfg: QuadratureConfig | None = None):
    """Ground-truth density: conditional Rician shadowed pdf averaged over the
    exponential scatter weight.  Valid for any real m > 0 and K >= 0."""
    cfg = _rel_only_cfg(cfg or _DEFAULT)
    gamma_arr = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(gamma_arr < 0):
        raise DomainError("gamma must be nonnegative")
    k, m, gbar = params.k, params.m, params.gamma_bar
    out = np.empty_like(gamma_arr)
    for lo in range(0, len(gamma_arr), _GAMMA_CHUNK):
        g = gamma_arr[lo:lo + _GAMMA_CHUNK]

        def f(x):
            k_x = (k / x)[:, None]
            gbar_x = (gbar * (k + x) / (k + 1.0))[:, None]
            return rs_pdf(g[None, :], k_x, m, gbar_x) * np.exp(-x)[:, None]

        vals, _ = adaptive_quad_vec(f, 0.0, np.inf, cfg)
        out[lo:lo + _GAMMA_CHUNK] = vals
    return float(out[0]) if np.ndim(gamma) == 0 else out


def fdrlos_cdf(gamma, params: FadingParams, cfg: QuadratureConfig | None = None):
    """SNR cdf of the fluctuating double-Rayleigh LoS model.

    Closed form for integer m and K > 0 (triple sum; the inner limit is
    s = 0..j, which the binomial expansion of (t - K/m)^j requires):

        F(g) = 1 - sum_{j<m} C(m-1,j) (K/m)^(m-j-1) e^(K/m)
               sum_{r<m-j} b^r / r!
               sum_{s<=j} C(j,s) (-K/m)^(j-s) Gamma(s-m-r+2, K/m, b),

    with b = g (K+1)/gbar.  K = 0 goes through the oracle path.
    """
    cfg = cfg or _DEFAULT
    if params.k == 0.0:
        return fdrlos_cdf_oracle(gamma, params, cfg)
    m = params.require_integer_m()
    gamma_arr = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(gamma_arr < 0):
        raise DomainError("gamma must be nonnegative")
    k, gbar = params.k, params.gamma_bar
    z = k / m
    a_values = np.arange(3 - 2 * m, 2)
    a_index = {a: i for i, a in enumerate(a_values)}
    comp_cfg = _rel_only_cfg(cfg)

    out = np.empty_like(gamma_arr)
    for lo in range(0, len(gamma_arr), _GAMMA_CHUNK):
        g = gamma_arr[lo:lo + _GAMMA_CHUNK]
        b = g * (k + 1.0) / gbar
        gig = _gig_matrix(a_values, z, b, comp_cfg)
        surv = np.zeros_like(g)
        for j in range(m):
            cj = comb(m - 1, j) * z ** (m - j - 1)
            for r in range(m - j):
                br = cj * b ** r / factorial(r)
                for s in range(j + 1):
                    surv += (br * comb(j, s) * (-z) ** (j - s)
                             * gig[:, a_index[s - m - r + 2]])
        out[lo:lo + _GAMMA_CHUNK] = 1.0 - surv
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if np.ndim(gamma) == 0 else out


def fdrlos_cdf_oracle(gamma, params: FadingParams,
                      cfg: QuadratureConfig | None = None):
    """Ground-truth cdf: conditional Rician shadowed cdf averaged over the
    exponential scatter weight (integer m uses the Erlang-mixture cdf, real m
    integrates rs_pdf)."""
    base_cfg = cfg or _DEFAULT
    cfg = _rel_only_cfg(base_cfg)
    gamma_arr = np.atleast_1d(np.asarray(gamma, dtype=float))
    if np.any(gamma_arr < 0):
        raise DomainError("gamma must be nonnegative")
    k, m, gbar = params.k, params.m, params.gamma_bar
    out = np.empty_like(gamma_arr)
    integer_m = params.m_is_integer
    for lo in range(0, len(gamma_arr), _GAMMA_CHUNK):
        g = gamma_arr[lo:lo + _GAMMA_CHUNK]

        def f(x):
            k_x = (k / x)[:, None]
            gbar_x = (gbar * (k + x) / (k + 1.0))[:, None]
            if integer_m:
                cond = rs_cdf_integer(g[None, :], k_x, int(m), gbar_x)
            else:
                cond = _rs_cdf_real_vec(g, k_x, m, gbar_x, cfg)
            return cond * np.exp(-x)[:, None]

        vals, _ = adaptive_quad_vec(f, 0.0, np.inf, cfg)
        out[lo:lo + _GAMMA_CHUNK] = vals
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if np.ndim(gamma) == 0 else out


def _rs_cdf_real_vec(gammas, k_x, m, gbar_x, cfg):
    """Conditional real-m cdf at each (node, gamma) pair via an inner
    quadrature of rs_pdf; shapes (nx, 1) -> (nx, ng)."""
    nx = k_x.shape[0]
    res = np.empty((nx, len(gammas)))
    for col, g in enumerate(gammas):
        if g == 0.0:
            res[:, col] = 0.0
            continue
        vals, _ = adaptive_quad_vec(
            lambda u: rs_pdf(u[:, None], k_x[None, :, 0], m, gbar_x[None, :, 0]),
            0.0, float(g), cfg)
        res[:, col] = np.clip(vals, 0.0, 1.0)
    return res


# ---------------------------------------------------------------------------
# outage probability


def outage_probability(gamma_th, params: FadingParams,
                       cfg: QuadratureConfig | None = None):
    """P(snr < gamma_th) = F(gamma_th)."""
    if np.any(np.asarray(gamma_th) <= 0):
        raise DomainError("gamma_th must be positive")
    return fdrlos_cdf(gamma_th, params, cfg)


def coding_gain(k, m, cfg: QuadratureConfig | None = None):
    """High-SNR power offset a = (1+K) Gamma(m) U(m, 1, K/m).

    Diverges as K -> 0 (the pure product channel has no order-1 asymptote),
    so K = 0 is rejected.
    """
    if k <= 0:
        raise DomainError("coding gain diverges at K = 0; need K > 0")
    m = _as_positive_int(m)
    return (1.0 + k) * gamma_tricomi_u(m, k / m, cfg)


def asymptotic_op(gamma_th, gbar, k, m, cfg: QuadratureConfig | None = None):
    """High-SNR outage a * gamma_th / gbar; exact log-log slope -1 in gbar."""
    if gamma_th <= 0 or gbar <= 0:
        raise DomainError("gamma_th and gbar must be positive")
    return coding_gain(k, m, cfg) * gamma_th / gbar


# ---------------------------------------------------------------------------
# ancestor models (reference laws for comparisons)


def rician_pdf(gamma, k, gbar):
    """Rician SNR density (deterministic LoS, single-Rayleigh scatter)."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise DomainError("gamma must be nonnegative")
    c = (1.0 + k) * gamma / gbar
    y = 2.0 * np.sqrt(k * c)
    out = (1.0 + k) / gbar * i0e(y) * np.exp(-(np.sqrt(k) - np.sqrt(c)) ** 2)
    return float(out) if out.ndim == 0 else out


def rician_cdf(gamma, k, gbar):
    """Rician SNR cdf via the noncentral chi-square law."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise DomainError("gamma must be nonnegative")
    out = ncx2.cdf(2.0 * (1.0 + k) * gamma / gbar, 2, 2.0 * k)
    return float(out) if np.ndim(gamma) == 0 else out


def drlos_pdf_oracle(gamma, k, gbar, cfg: QuadratureConfig | None = None):
    """Deterministic-LoS double-Rayleigh density: the conditional law is plain
    Rician, averaged over the exponential scatter weight (the m -> inf limit)."""
    cfg = _rel_only_cfg(cfg or _DEFAULT)
    gamma_arr = np.atleast_1d(np.asarray(gamma, dtype=float))
    out = np.empty_like(gamma_arr)
    for lo in range(0, len(gamma_arr), _GAMMA_CHUNK):
        g = gamma_arr[lo:lo + _GAMMA_CHUNK]

        def f(x):
            k_x = (k / x)[:, None]
            gbar_x = (gbar * (k + x) / (k + 1.0))[:, None]
            return rician_pdf(g[None, :], k_x, gbar_x) * np.exp(-x)[:, None]

        vals, _ = adaptive_quad_vec(f, 0.0, np.inf, cfg)
        out[lo:lo + _GAMMA_CHUNK] = vals
    return float(out[0]) if np.ndim(gamma) == 0 else out


def drlos_cdf_oracle(gamma, k, gbar, cfg: QuadratureConfig | None = None):
    """Deterministic-LoS double-Rayleigh cdf by exponential averaging."""
    cfg = _rel_only_cfg(cfg or _DEFAULT)
    gamma_arr = np.atleast_1d(np.asarray(gamma, dtype=float))
    out = np.empty_like(gamma_arr)
    for lo in range(0, len(gamma_arr), _GAMMA_CHUNK):
        g = gamma_arr[lo:lo + _GAMMA_CHUNK]

        def f(x):
            k_x = (k / x)[:, None]
            gbar_x = (gbar * (k + x) / (k + 1.0))[:, None]
            return rician_cdf(g[None, :], k_x, gbar_x) * np.exp(-x)[:, None]

        vals, _ = adaptive_quad_vec(f, 0.0, np.inf, cfg)
        out[lo:lo + _GAMMA_CHUNK] = vals
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if np.ndim(gamma) == 0 else out
