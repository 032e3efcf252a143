"""Helstrom bounds, direct guessing and forbidden regions.

The M-shot bound has two interchangeable evaluations. The dense route forms
the Kronecker powers explicitly and diagonalises them; it is the reference
and is limited to ``DENSE_DIM_CAP``. The fast route works in the product
eigenbasis of rho_2, where rho_2^(x)M is diagonal with few distinct
eigenvalues and rho_1^(x)M is a rank-one projector, so the spectrum of the
difference follows from a scalar secular equation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .model import HypothesisPair, ScenarioKind, ScenarioParams, build_states

__all__ = [
    "BoundReport",
    "MinimalMReport",
    "SweepPoint",
    "SymmetricCertificate",
    "DENSE_DIM_CAP",
    "trace_norm_symmetric",
    "direct_guess",
    "omega",
    "helstrom_one_shot",
    "helstrom_m_shot",
    "forbidden_threshold_asymmetric",
    "certify_forbidden_asymmetric",
    "certify_no_forbidden_symmetric",
    "minimal_m",
    "advantage_sweep",
]

DENSE_DIM_CAP = 8192
# signed eigenvalue mass at or below this does not break a sign pattern
SIGN_TOL = 1e-12
# eigenvalues of rho_2 below this are treated as kernel
KERNEL_TOL = 1e-12
# relative gap under which two product eigenvalues are merged
MERGE_RTOL = 1e-12


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one decision problem.

    ``spectrum`` holds the eigenvalues of P2 rho2^(x)M - P1 rho1^(x)M in
    descending order and ``multiplicity`` their counts. The dense route
    lists every eigenvalue once; the fast route lists distinct values.
    ``advantage`` is ``math.inf`` when the optimum is error free while
    guessing is not.
    """

    e_min: float
    e_guess: float
    advantage: float
    forbidden: bool
    spectrum: np.ndarray = field(repr=False)
    multiplicity: np.ndarray = field(repr=False)
    m: int = 1
    method: str = "dense"

    @property
    def advantage_pct(self) -> float:
        """(A - 1) x 100, zero on forbidden points."""
        if self.forbidden:
            return 0.0
        return (self.advantage - 1.0) * 100.0

    @property
    def trace_norm(self) -> float:
        nonzero = self.spectrum != 0
        return float(np.sum(self.multiplicity[nonzero] * np.abs(self.spectrum[nonzero])))


@dataclass(frozen=True)
class MinimalMReport:
    """Smallest shot count beating the direct guess; ``m_min`` is None past the cap."""

    m_min: int | None
    e_min_at_m: float
    m_cap: int

    @property
    def exceeded(self) -> bool:
        return self.m_min is None


@dataclass(frozen=True)
class SweepPoint:
    params: ScenarioParams
    report: BoundReport


@dataclass(frozen=True)
class SymmetricCertificate:
    """Grid scan of the sign structure of Omega in the symmetric scenario.

    ``n_positive_definite`` and ``n_negative_definite`` count grid points
    meeting all three leading-minor conditions of the respective sign
    pattern; ``n_negative_leading`` counts points meeting just the first two
    conditions of the negative pattern.
    """

    max_det: float
    argmax_det: tuple[float, float, float]
    k_values: np.ndarray = field(repr=False)
    max_det_per_k: np.ndarray = field(repr=False)
    n_points: int = 0
    n_positive_definite: int = 0
    n_negative_definite: int = 0
    n_negative_leading: int = 0

    @property
    def n_forbidden(self) -> int:
        return self.n_positive_definite + self.n_negative_definite

    @property
    def certified(self) -> bool:
        return self.max_det < 0 and self.n_forbidden == 0


def trace_norm_symmetric(m) -> float:
    """Sum of absolute eigenvalues of a real symmetric matrix."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if m.size and np.max(np.abs(m - m.T)) > 1e-10:
        raise ValueError("matrix is not symmetric")
    return float(np.sum(np.abs(np.linalg.eigvalsh(m))))


def direct_guess(p1: float) -> float:
    """Error of announcing the a-priori more likely hypothesis."""
    p1 = float(p1)
    if not (0.0 <= p1 <= 1.0):
        raise ValueError("p1 must lie in [0, 1]")
    return min(p1, 1.0 - p1)


def omega(pair: HypothesisPair, p1: float) -> np.ndarray:
    """The Helstrom operator P2 rho2 - P1 rho1."""
    return (1.0 - p1) * pair.rho2 - p1 * pair.rho1


def _is_forbidden(spectrum: np.ndarray, multiplicity: np.ndarray) -> bool:
    # the smaller of the two signed masses equals E_guess - E_min
    neg = spectrum < 0
    pos = spectrum > 0
    neg_mass = float(np.sum(multiplicity[neg] * -spectrum[neg]))
    pos_mass = float(np.sum(multiplicity[pos] * spectrum[pos]))
    return neg_mass <= SIGN_TOL or pos_mass <= SIGN_TOL


def _report(e_min_raw, p1, spectrum, multiplicity, m, method, forbidden=None) -> BoundReport:
    order = np.argsort(spectrum)[::-1]
    spectrum = np.asarray(spectrum, dtype=float)[order]
    multiplicity = np.asarray(multiplicity, dtype=float)[order]
    e_guess = direct_guess(p1)
    if forbidden is None:
        forbidden = _is_forbidden(spectrum, multiplicity)
    if forbidden:
        e_min = e_guess
    else:
        e_min = min(max(float(e_min_raw), 0.0), e_guess)
    if e_min > 0:
        advantage = e_guess / e_min
    elif e_guess > 0:
        advantage = math.inf
    else:
        advantage = 1.0
    return BoundReport(e_min, e_guess, advantage, forbidden, spectrum, multiplicity, m, method)


def helstrom_one_shot(params: ScenarioParams) -> BoundReport:
    """Helstrom bound for a decision after a single detection event."""
    pair = build_states(params)
    eigs = np.linalg.eigvalsh(omega(pair, params.p1))
    e_min = 0.5 * (1.0 - np.sum(np.abs(eigs)))
    return _report(e_min, params.p1, eigs, np.ones_like(eigs), 1, "dense")


# -- M-shot, dense route ----------------------------------------------------


def _kron_power(rho: np.ndarray, m: int) -> np.ndarray:
    out = rho
    for _ in range(m - 1):
        out = np.kron(out, rho)
    return out


def _dense_m_shot(pair: HypothesisPair, p1: float, m: int) -> BoundReport:
    dim = pair.dim**m
    if dim > DENSE_DIM_CAP:
        raise ValueError(
            f"dense M-shot needs dimension {dim} > {DENSE_DIM_CAP}; use the fast path"
        )
    om = _kron_power(pair.rho2, m)
    om *= 1.0 - p1
    om -= p1 * _kron_power(pair.rho1, m)
    eigs = np.linalg.eigvalsh(om)
    del om
    e_min = 0.5 * (1.0 - np.sum(np.abs(eigs)))
    return _report(e_min, p1, eigs, np.ones_like(eigs), m, "dense")


# -- M-shot, fast route -----------------------------------------------------


def _compositions(m: int, parts: int) -> np.ndarray:
    """All non-negative integer vectors of length ``parts`` summing to ``m``."""
    if parts == 0:
        return np.zeros((1 if m == 0 else 0, 0), dtype=np.int64)
    if parts == 1:
        return np.array([[m]], dtype=np.int64)
    rows = []
    for first in range(m, -1, -1):
        rest = _compositions(m - first, parts - 1)
        rows.append(np.column_stack([np.full(len(rest), first), rest]))
    return np.vstack(rows)


@dataclass
class _ProductSpectrum:
    """Distinct eigenvalues of P2 rho2^(x)M with rank-one data of rho1^(x)M.

    ``d`` are the eigenvalues, ``w`` the squared projections of the
    all-zero product vector onto each eigenspace (summing to one), ``size``
    the eigenspace dimensions.
    """

    d: np.ndarray
    w: np.ndarray
    size: np.ndarray


def _kernel_size(n: int, rank: int, m: int) -> float:
    """n**m - rank**m as a float, inf once it leaves double range."""
    try:
        return math.exp(m * math.log(n)) * -math.expm1(m * math.log(rank / n)) if rank else float(n) ** m
    except OverflowError:
        return math.inf


def _product_spectrum(rho2: np.ndarray, p2: float, m: int) -> _ProductSpectrum:
    n = rho2.shape[0]
    mu, vecs = np.linalg.eigh(rho2)
    proj = vecs[0, :] ** 2
    support = mu > KERNEL_TOL
    mu_s, proj_s = mu[support], proj[support]
    kernel_proj = float(np.sum(proj[~support]))
    rank = int(support.sum())

    counts = _compositions(m, rank)
    log_mult = gammaln(m + 1) - np.sum(gammaln(counts + 1), axis=1)
    log_d = counts @ np.log(mu_s)
    with np.errstate(divide="ignore"):
        log_proj = np.log(proj_s)
    # 0 * log(0) must count as 0 when a factor is absent
    log_w = log_mult + np.sum(np.where(counts > 0, counts * log_proj, 0.0), axis=1)

    d = p2 * np.exp(log_d)
    w = np.exp(log_w)
    # eigenspace dimensions are integers; exp(gammaln) is only close to them
    size = np.round(np.exp(log_mult))
    if rank < n:
        # every product vector with at least one kernel factor
        w0 = 1.0 if kernel_proj >= 1 else -math.expm1(m * math.log1p(-kernel_proj))
        d = np.append(d, 0.0)
        w = np.append(w, w0)
        size = np.append(size, _kernel_size(n, rank, m))

    # merge equal eigenvalues, including products that underflow to zero
    order = np.argsort(d, kind="stable")
    d, w, size = d[order], w[order], size[order]
    d_vals, w_vals, sizes = [], [], []
    i = 0
    while i < len(d):
        j = i + 1
        while j < len(d) and d[j] - d[i] <= MERGE_RTOL * d[j]:
            j += 1
        d_vals.append(float(d[i:j].max()))
        w_vals.append(float(w[i:j].sum()))
        sizes.append(float(size[i:j].sum()))
        i = j
    return _ProductSpectrum(np.array(d_vals), np.array(w_vals), np.array(sizes))


def _secular(e: np.ndarray, d: np.ndarray, w: np.ndarray, c: float) -> np.ndarray:
    """f(e) = sum_g w_g (d_g - e) / (d_g + c - e), with e = lambda + P1.

    Zeros of f are the eigenvalues of diag(d) - c u u^T shifted by c; f is
    strictly decreasing between consecutive poles d_g + c.
    """
    e = np.asarray(e, dtype=float)[..., None]
    return np.sum(w * (d - e) / (d + c - e), axis=-1)


def _bisect(lo: np.ndarray, hi: np.ndarray, d, w, c, max_iter: int = 2200) -> np.ndarray:
    lo, hi = lo.astype(float).copy(), hi.astype(float).copy()
    # poles that coincide in floating point leave a root pinned at the pole
    active = hi > lo
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        mid = 0.5 * (lo[idx] + hi[idx])
        stuck = (mid <= lo[idx]) | (mid >= hi[idx])
        active[idx[stuck]] = False
        idx, mid = idx[~stuck], mid[~stuck]
        pos = _secular(mid, d, w, c) > 0
        lo[idx[pos]] = mid[pos]
        hi[idx[~pos]] = mid[~pos]
    return 0.5 * (lo + hi)


def _fast_m_shot(pair: HypothesisPair, p1: float, m: int, full_spectrum: bool = True) -> BoundReport:
    p2 = 1.0 - p1
    c = p1
    if p2 == 0.0:
        # Omega = -rho1^(x)M
        total = float(pair.dim) ** m
        return _report(0.0, p1, np.array([-1.0, 0.0]), np.array([1.0, total - 1.0]), m, "fast")

    spec = _product_spectrum(pair.rho2, p2, m)
    if c == 0.0:
        return _report(0.0, p1, spec.d, spec.size, m, "fast")

    live = spec.w > 0
    d, w = spec.d[live], spec.w[live]
    poles = d + c

    # lowest root: e in [0, first pole), since Omega >= -P1 rho1^(x)M
    e_low = _bisect(np.array([0.0]), poles[:1], d, w, c)[0]
    e_min_raw = e_low if e_low < c else c
    # a PSD matrix minus a rank-one term has at most one negative eigenvalue,
    # so both signed masses follow from the lowest root and the trace p2 - p1
    neg_mass = c - e_min_raw
    forbidden = neg_mass <= SIGN_TOL or neg_mass + p2 - p1 <= SIGN_TOL

    values = [e_low - c]
    mults = [1.0]
    if full_spectrum and len(poles) > 1:
        inner = _bisect(poles[:-1], poles[1:], d, w, c)
        values.extend(inner - c)
        mults.extend([1.0] * len(inner))
    values.extend(spec.d)
    mults.extend(spec.size - live.astype(float))
    values, mults = np.array(values), np.array(mults)
    keep = mults > 0
    return _report(e_min_raw, p1, values[keep], mults[keep], m, "fast", forbidden)


def helstrom_m_shot(params: ScenarioParams, m: int, method: str = "auto") -> BoundReport:
    """Helstrom bound after ``m`` independent detection events.

    ``method`` is ``"dense"``, ``"fast"`` or ``"auto"`` (fast). The dense
    route raises once the Hilbert space exceeds ``DENSE_DIM_CAP``.
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be ≥ 1")
    pair = build_states(params)
    if method == "dense":
        return _dense_m_shot(pair, params.p1, m)
    if method in ("fast", "auto"):
        return _fast_m_shot(pair, params.p1, m)
    raise ValueError(f"unknown method {method!r}")


# -- forbidden regions ------------------------------------------------------


def forbidden_threshold_asymmetric(q: float) -> float:
    """Prior below which guessing is optimal in the asymmetric scenario: q/(1+q)."""
    return q / (1.0 + q)


def certify_forbidden_asymmetric(params: ScenarioParams) -> bool:
    """Closed-form forbidden test from the leading principal minors of Omega."""
    if params.kind is not ScenarioKind.ASYMMETRIC:
        raise ValueError("closed-form certification applies to the asymmetric scenario")
    return params.p1 < forbidden_threshold_asymmetric(params.q)


def certify_no_forbidden_symmetric(k_grid, q_grid, p1_grid) -> SymmetricCertificate:
    """Scan determinants and leading minors of Omega over a product grid."""
    k_grid = np.asarray(k_grid, dtype=float).ravel()
    q_grid = np.asarray(q_grid, dtype=float).ravel()
    p1_grid = np.asarray(p1_grid, dtype=float).ravel()
    if not (k_grid.size and q_grid.size and p1_grid.size):
        raise ValueError("grids must be non-empty")
    if np.any(k_grid <= 0):
        raise ValueError("symmetric certification needs k > 0")

    rho1 = np.zeros((3, 3))
    rho1[0, 0] = 1.0
    p1 = p1_grid[:, None, None]
    best = (-math.inf, (math.nan, math.nan, math.nan))
    max_det_per_k = np.full(k_grid.size, -math.inf)
    n_pd = n_nd = n_lead = 0
    for ik, k in enumerate(k_grid):
        for q in q_grid:
            rho2 = build_states(ScenarioParams(ScenarioKind.SYMMETRIC, k, q)).rho2
            om = (1.0 - p1) * rho2 - p1 * rho1
            m1 = om[:, 0, 0]
            m2 = om[:, 0, 0] * om[:, 1, 1] - om[:, 0, 1] * om[:, 1, 0]
            det = np.linalg.det(om)
            n_pd += int(np.sum((m1 > 0) & (m2 > 0) & (det > 0)))
            lead = (m1 < 0) & (m2 > 0)
            n_lead += int(np.sum(lead))
            n_nd += int(np.sum(lead & (det < 0)))
            j = int(np.argmax(det))
            max_det_per_k[ik] = max(max_det_per_k[ik], det[j])
            if det[j] > best[0]:
                best = (float(det[j]), (float(k), float(q), float(p1_grid[j])))
    return SymmetricCertificate(
        max_det=best[0],
        argmax_det=best[1],
        k_values=k_grid,
        max_det_per_k=max_det_per_k,
        n_points=k_grid.size * q_grid.size * p1_grid.size,
        n_positive_definite=n_pd,
        n_negative_definite=n_nd,
        n_negative_leading=n_lead,
    )


# -- multi-shot search and sweeps --------------------------------------------


def minimal_m(params: ScenarioParams, m_cap: int) -> MinimalMReport:
    """Smallest M whose Helstrom bound falls below the direct-guess error.

    Uses galloping then bisection, relying on E_min(M) being non-increasing.
    """
    m_cap = int(m_cap)
    if m_cap < 1:
        raise ValueError("m_cap must be ≥ 1")
    pair = build_states(params)
    target = direct_guess(params.p1) - 1e-12
    cache: dict[int, float] = {}

    def e_min(m: int) -> float:
        if m not in cache:
            cache[m] = _fast_m_shot(pair, params.p1, m, full_spectrum=False).e_min
        return cache[m]

    lo, hi = 0, 1
    while e_min(hi) >= target:
        if hi >= m_cap:
            return MinimalMReport(None, e_min(hi), m_cap)
        lo, hi = hi, min(2 * hi, m_cap)
    # e_min(lo) >= target (or lo == 0), e_min(hi) < target
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if e_min(mid) < target:
            hi = mid
        else:
            lo = mid
    return MinimalMReport(hi, e_min(hi), m_cap)


def advantage_sweep(
    kind,
    p1_values,
    *,
    k_values=None,
    q_values=None,
    k: float | None = None,
    q: float | None = None,
    m: int = 1,
) -> list[SweepPoint]:
    """One-shot (or M-shot) bounds on a rectangular grid.

    Either ``k_values`` with a fixed ``q`` or ``q_values`` with a fixed ``k``.
    Rows come out with the outer axis varying slowest and ``p1`` fastest.
    """
    kind = ScenarioKind.parse(kind)
    p1_values = list(p1_values)
    if k_values is not None:
        if q is None:
            raise ValueError("a k sweep needs a fixed q")
        grid = [(float(kk), float(q)) for kk in k_values]
    elif q_values is not None:
        if k is None:
            raise ValueError("a q sweep needs a fixed k")
        grid = [(float(k), float(qq)) for qq in q_values]
    else:
        raise ValueError("give k_values or q_values")
    if not grid or not p1_values:
        raise ValueError("sweep grid is empty")

    out = []
    for kk, qq in grid:
        for p1 in p1_values:
            params = ScenarioParams(kind, kk, qq, float(p1))
            rep = helstrom_one_shot(params) if m == 1 else helstrom_m_shot(params, m)
            out.append(SweepPoint(params, rep))
    return out
