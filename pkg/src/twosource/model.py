"""One-photon states for the one-versus-two incoherent source problem.

Everything is expressed in units of the point-spread-function width, so a
source separation enters only through ``k = d / sigma``. States live in the
orthonormal basis obtained by Gram-Schmidt on the source wavefunctions, in
the order psi_0, psi_+, psi_- (psi_0, psi_d in the asymmetric case).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "ScenarioKind",
    "ScenarioParams",
    "HypothesisPair",
    "overlap_tau",
    "overlap_delta",
    "psf_amplitude",
    "psf_overlap_oracle",
    "build_states",
    "states_from_gram",
    "validate_density_matrix",
]

# below this separation the two hypotheses are treated as identical
COINCIDENCE_K = 1e-9
SYMMETRY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
# half-width of the quadrature window beyond the outermost centre
QUAD_HALF_WIDTH = 12.0


class ScenarioKind(enum.Enum):
    ASYMMETRIC = "asymmetric"
    SYMMETRIC = "symmetric"

    @classmethod
    def parse(cls, value: "ScenarioKind | str") -> "ScenarioKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"scenario must be 'asymmetric' or 'symmetric', got {value!r}"
            ) from None


def _check_k(k: float) -> float:
    k = float(k)
    if not math.isfinite(k):
        raise ValueError("k must be finite")
    if k < 0:
        raise ValueError("k must be ≥ 0")
    return k


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    return value


@dataclass(frozen=True)
class ScenarioParams:
    """A full problem instance.

    ``q`` weights the first source of the two-source hypothesis (the one at
    the origin in the asymmetric scenario) and ``p1`` is the prior of the
    single-source hypothesis.
    """

    kind: ScenarioKind
    k: float
    q: float = 0.5
    p1: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind.parse(self.kind))
        object.__setattr__(self, "k", _check_k(self.k))
        object.__setattr__(self, "q", _check_unit("q", self.q))
        object.__setattr__(self, "p1", _check_unit("p1", self.p1))

    @property
    def p2(self) -> float:
        return 1.0 - self.p1


@dataclass(frozen=True)
class HypothesisPair:
    """Density matrices of both hypotheses in a shared orthonormal basis.

    ``overlap`` is tau for the asymmetric scenario and delta for the symmetric
    one; ``delta3`` is the Gram-Schmidt coefficient of psi_- on the second
    basis vector (zero in the asymmetric scenario).
    """

    rho1: np.ndarray
    rho2: np.ndarray
    overlap: float
    delta3: float = 0.0

    @property
    def dim(self) -> int:
        return self.rho1.shape[0]


def overlap_tau(k: float) -> float:
    """Overlap of two PSF amplitudes separated by ``k``: exp(-k^2/8)."""
    k = _check_k(k)
    return math.exp(-k * k / 8.0)


def overlap_delta(k: float) -> float:
    """Overlap of a centred PSF with one shifted by ``k/2``: exp(-k^2/32)."""
    k = _check_k(k)
    return math.exp(-k * k / 32.0)


def psf_amplitude(x, shift: float = 0.0):
    """Unit-width Gaussian amplitude, normalised so that |psi|^2 integrates to 1."""
    x = np.asarray(x, dtype=float)
    return (2.0 * np.pi) ** -0.25 * np.exp(-((x - shift) ** 2) / 4.0)


def psf_overlap_oracle(shift_i: float, shift_j: float) -> float:
    """<psi_i|psi_j> by adaptive quadrature of the product of two amplitudes."""
    shift_i, shift_j = float(shift_i), float(shift_j)
    if not (math.isfinite(shift_i) and math.isfinite(shift_j)):
        raise ValueError("shifts must be finite")
    lo = min(shift_i, shift_j) - QUAD_HALF_WIDTH
    hi = max(shift_i, shift_j) + QUAD_HALF_WIDTH
    mid = 0.5 * (shift_i + shift_j)
    value, _ = integrate.quad(
        lambda x: psf_amplitude(x, shift_i) * psf_amplitude(x, shift_j),
        lo,
        hi,
        points=[shift_i, mid, shift_j],
        epsabs=1e-14,
        epsrel=1e-13,
        limit=200,
    )
    return float(value)


def _asymmetric_rho2(k: float, q: float) -> np.ndarray:
    tau2 = math.exp(-k * k / 4.0)
    one_minus_tau2 = -math.expm1(-k * k / 4.0)
    off = math.sqrt(tau2 * one_minus_tau2)
    rho_far = np.array([[tau2, off], [off, one_minus_tau2]])
    return q * np.diag([1.0, 0.0]) + (1.0 - q) * rho_far


def _symmetric_rho2(k: float, q: float) -> np.ndarray:
    delta = overlap_delta(k)
    d2 = delta * delta
    # 1 - delta^2 and 1 - delta^4 without cancellation near k = 0
    one_minus_d2 = -math.expm1(-k * k / 16.0)
    one_minus_d4 = -math.expm1(-k * k / 8.0)
    # coordinates of psi_+ and psi_- in the Gram-Schmidt basis
    plus = np.array([delta, math.sqrt(one_minus_d2), 0.0])
    norm2 = math.sqrt(one_minus_d2 * one_minus_d4)
    minus = np.array([delta, -d2 * math.sqrt(one_minus_d2), norm2])
    return q * np.outer(plus, plus) + (1.0 - q) * np.outer(minus, minus)


def build_states(params: ScenarioParams) -> HypothesisPair:
    """Density matrices of both hypotheses for ``params``.

    For ``k`` below ``COINCIDENCE_K`` the two-source state is returned equal
    to the single-source state.
    """
    kind, k, q = params.kind, params.k, params.q
    dim = 2 if kind is ScenarioKind.ASYMMETRIC else 3
    rho1 = np.zeros((dim, dim))
    rho1[0, 0] = 1.0

    if kind is ScenarioKind.ASYMMETRIC:
        overlap, delta3 = overlap_tau(k), 0.0
    else:
        overlap = overlap_delta(k)
        delta3 = -overlap**2 * math.sqrt(-math.expm1(-k * k / 16.0))

    if k < COINCIDENCE_K:
        return HypothesisPair(rho1, rho1.copy(), overlap, delta3)

    if kind is ScenarioKind.ASYMMETRIC:
        rho2 = _asymmetric_rho2(k, q)
    else:
        rho2 = _symmetric_rho2(k, q)
    return HypothesisPair(rho1, rho2, overlap, delta3)


def states_from_gram(params: ScenarioParams) -> HypothesisPair:
    """Reference construction from quadrature overlaps.

    Builds the Gram matrix of the source wavefunctions with
    :func:`psf_overlap_oracle` and orthonormalises it by Cholesky
    factorisation, which reproduces Gram-Schmidt in the same vector order.
    Requires ``k > 0`` so the Gram matrix is non-singular.
    """
    k, q = params.k, params.q
    if k <= 0:
        raise ValueError("Gram construction needs k > 0")
    if params.kind is ScenarioKind.ASYMMETRIC:
        shifts = [0.0, k]
        weights = [q, 1.0 - q]
    else:
        # psi_+ sits at -k/2, psi_- at +k/2
        shifts = [0.0, -k / 2.0, k / 2.0]
        weights = [0.0, q, 1.0 - q]
    n = len(shifts)
    gram = np.array(
        [[psf_overlap_oracle(shifts[i], shifts[j]) for j in range(n)] for i in range(n)]
    )
    chol = np.linalg.cholesky(gram)
    # row j of chol = coordinates of source vector j in the orthonormal basis
    rho1 = np.outer(chol[0], chol[0])
    rho2 = sum(w * np.outer(chol[j], chol[j]) for j, w in enumerate(weights))
    if params.kind is ScenarioKind.ASYMMETRIC:
        overlap, delta3 = gram[0, 1], 0.0
    else:
        overlap, delta3 = gram[0, 1], chol[2, 1]
    return HypothesisPair(rho1, rho2, float(overlap), float(delta3))


def validate_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Check symmetry, unit trace and positivity; return the eigenvalues."""
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    if np.max(np.abs(rho - rho.T)) > SYMMETRY_TOL:
        raise ValueError("density matrix is not symmetric")
    if abs(np.trace(rho) - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace is {np.trace(rho)!r}, expected 1")
    eigs = np.linalg.eigvalsh(rho)
    if eigs[0] < -PSD_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {eigs[0]!r}")
    return eigs
