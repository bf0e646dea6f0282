"""Brute-force oracle: the full protocol on qubit (x) truncated Fock space.

The joint state is a ``2N x 2N`` matrix with the qubit index outer, so block
``(k, l)`` is ``matrix[kN:(k+1)N, lN:(l+1)N]`` and block 0 belongs to ``|1>``.

Displacement and squeezing operators are exponentials of (phase-rotated) real
antisymmetric tridiagonal generators. They are exponentiated spectrally from
an eigenbasis cached per cutoff, which is exact for these normal matrices and
lets every displacement amplitude reuse one ``eigh_tridiagonal`` call.
``method="expm"`` switches to scaling-and-squaring (:func:`scipy.linalg.expm`)
and serves as the independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal, expm
from scipy.special import gammaln

from .closed_form import MeasurementSetup
from .errors import CutoffTooSmall, NoConvergence, ZeroPostSelection
from .gad import GadChannel, kraus_ops
from .pointer import PointerState
from .qubit import QubitState, state_vector

MAX_CUTOFF = 512
UNITARITY_TOL = 1e-8
ZERO_POSTSELECTION = 1e-14
TRUNCATION_LOSS_TOL = 1e-10


@dataclass
class FockDensity:
    matrix: np.ndarray
    truncation_loss: float = 0.0

    @property
    def cutoff(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.sum(op.T * self.matrix))

    def tail_weight(self, fraction: float = 0.125) -> float:
        """Population held by the top ``fraction`` of Fock levels."""
        k = max(1, int(self.cutoff * fraction))
        return float(np.diagonal(self.matrix)[-k:].real.sum())


@dataclass
class JointState:
    matrix: np.ndarray

    @property
    def cutoff(self) -> int:
        return self.matrix.shape[0] // 2

    def block(self, k: int, l: int) -> np.ndarray:
        n = self.cutoff
        return self.matrix[k * n : (k + 1) * n, l * n : (l + 1) * n]

    def system_marginal(self) -> np.ndarray:
        return np.array(
            [[np.trace(self.block(k, l)) for l in range(2)] for k in range(2)]
        )


@dataclass
class OracleReport:
    p_succ: float
    overlap: float
    mean_x: float
    mean_p: float
    initial_x: float
    initial_p: float
    conditioned_state: FockDensity
    cutoff_used: int
    truncation_loss: float
    tail_weight: float

    @property
    def delta_x(self) -> float:
        return self.mean_x - self.initial_x

    @property
    def delta_p(self) -> float:
        return self.mean_p - self.initial_p

    def scalars(self) -> dict[str, float]:
        return {
            "p_succ": self.p_succ,
            "overlap": self.overlap,
            "mean_x": self.mean_x,
            "mean_p": self.mean_p,
            "delta_x": self.delta_x,
            "delta_p": self.delta_p,
        }


# ---------------------------------------------------------------------------
# operators


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=16)
def ladder_ops(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation matrices on ``n`` Fock levels."""
    if n < 2:
        raise ValueError("cutoff must be at least 2")
    a = np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)
    return _readonly(a), _readonly(a.conj().T.copy())


def quadratures(n: int, sigma: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """``X = sigma (a^dag + a)`` and ``P = i (a^dag - a) / (2 sigma)``."""
    a, ad = ladder_ops(n)
    return sigma * (ad + a), 1j / (2 * sigma) * (ad - a)


def number_op(n: int) -> np.ndarray:
    return np.diag(np.arange(n, dtype=float)).astype(complex)


@lru_cache(maxsize=32)
def _tridiagonal_basis(couplings: tuple) -> tuple[np.ndarray, np.ndarray]:
    w, v = eigh_tridiagonal(np.zeros(len(couplings) + 1), np.asarray(couplings))
    return _readonly(w), _readonly(v)


def _exp_antisymmetric(couplings: np.ndarray, scale: float) -> np.ndarray:
    """``exp(scale * A)`` for ``A[k+1, k] = c_k = -A[k, k+1]``.

    ``A = -i U T U^dag`` with ``T`` the real symmetric tridiagonal matrix of
    the same couplings and ``U = diag(i^k)``.
    """
    w, v = _tridiagonal_basis(tuple(couplings))
    inner = (v * np.exp(-1j * scale * w)) @ v.T
    k = np.arange(len(w))
    phase = 1j ** ((k[:, None] - k[None, :]) % 4)
    return (phase * inner).real


def _displacement_couplings(n: int) -> np.ndarray:
    return np.sqrt(np.arange(1, n, dtype=float))


def _squeeze_couplings(n: int, parity: int) -> np.ndarray:
    levels = np.arange(parity, n - 2, 2, dtype=float)
    return -0.5 * np.sqrt((levels + 1) * (levels + 2))


def _rotation(n: int, angle: float) -> np.ndarray:
    return np.exp(1j * angle * np.arange(n))


def interior_size(n: int, amplitude: float) -> int:
    """Rows/columns trusted after truncation: ``n - ceil(4|amp|^2) - 4``."""
    return n - math.ceil(4 * abs(amplitude) ** 2) - 4


def _check_interior_unitarity(op: np.ndarray, amplitude: float) -> None:
    k = interior_size(op.shape[0], amplitude)
    if k < 2:
        raise CutoffTooSmall(f"cutoff {op.shape[0]} leaves no interior block for |amp|={abs(amplitude):.3g}")
    gram = op[:, :k].conj().T @ op[:, :k]
    dev = np.abs(gram - np.eye(k)).max()
    if dev > UNITARITY_TOL:
        raise CutoffTooSmall(f"interior unitarity deviation {dev:.2e}")


def _coherent_amplitudes(n: int, alpha: complex) -> np.ndarray:
    k = np.arange(n)
    if alpha == 0:
        return (k == 0).astype(complex)
    logmag = -abs(alpha) ** 2 / 2 + k * np.log(abs(alpha)) - 0.5 * gammaln(k + 1)
    return np.exp(logmag + 1j * k * np.angle(alpha))


def displacement(n: int, amplitude: complex, method: str = "spectral", check: bool = True) -> np.ndarray:
    """Truncated ``D(alpha) = exp(alpha a^dag - alpha^* a)``.

    Raises :class:`CutoffTooSmall` when the vacuum column deviates from the
    exact coherent-state amplitudes (or loses unitarity) on the interior block.
    """
    amplitude = complex(amplitude)
    if method == "expm":
        a, ad = ladder_ops(n)
        op = expm(amplitude * ad - amplitude.conjugate() * a)
    elif amplitude == 0:
        op = np.eye(n, dtype=complex)
    else:
        rot = _rotation(n, np.angle(amplitude))
        real = _exp_antisymmetric(_displacement_couplings(n), abs(amplitude))
        op = rot[:, None] * real * rot.conj()[None, :]
    if check:
        _check_interior_unitarity(op, amplitude)
        k = interior_size(n, amplitude)
        dev = np.abs(op[:k, 0] - _coherent_amplitudes(k, amplitude)).max()
        if dev > UNITARITY_TOL:
            raise CutoffTooSmall(f"coherent column deviation {dev:.2e} at cutoff {n}")
    return op


def squeeze(n: int, zeta: complex, method: str = "spectral", check: bool = True) -> np.ndarray:
    """Truncated ``S(zeta) = exp((zeta^* a^2 - zeta a^dag^2) / 2)``.

    With ``zeta = r exp(2 i chi)``, ``chi = 0`` squeezes the position quadrature.
    """
    zeta = complex(zeta)
    if method == "expm":
        a, ad = ladder_ops(n)
        op = expm(0.5 * (zeta.conjugate() * a @ a - zeta * ad @ ad))
    elif zeta == 0:
        op = np.eye(n, dtype=complex)
    else:
        r = abs(zeta)
        real = np.zeros((n, n))
        for parity in (0, 1):
            idx = np.arange(parity, n, 2)
            if len(idx) == 1:
                real[parity, parity] = 1.0
                continue
            real[np.ix_(idx, idx)] = _exp_antisymmetric(_squeeze_couplings(n, parity), r)
        rot = _rotation(n, np.angle(zeta) / 2)
        op = rot[:, None] * real * rot.conj()[None, :]
    if check:
        # squeezing of strength r spreads the vacuum roughly like |amp|^2 ~ sinh^2 r
        _check_interior_unitarity(op, np.sinh(abs(zeta)))
    return op


def thermal_state(n: int, n_bar: float) -> FockDensity:
    """Geometric populations, not renormalised; the deficit is the truncation loss."""
    if n_bar < 0:
        raise ValueError("n_bar must be non-negative")
    k = np.arange(n)
    if n_bar == 0:
        pops = (k == 0).astype(float)
    else:
        pops = np.exp(k * np.log(n_bar / (n_bar + 1))) / (n_bar + 1)
    return FockDensity(np.diag(pops).astype(complex), truncation_loss=float(1 - pops.sum()))


def centered_pointer(n: int, pt: PointerState, method: str = "spectral") -> FockDensity:
    """Reference state ``S(zeta) rho_th S(zeta)^dag``."""
    th = thermal_state(n, pt.n_bar)
    sq = squeeze(n, pt.zeta, method=method)
    pops = np.diagonal(th.matrix).real
    rho = (sq * pops[None, :]) @ sq.conj().T
    return FockDensity(rho, th.truncation_loss)


def build_pointer(n: int, pt: PointerState, method: str = "spectral") -> FockDensity:
    """Displaced squeezed thermal state ``D(alpha) S rho_th S^dag D^dag``."""
    ref = centered_pointer(n, pt, method)
    d = displacement(n, pt.alpha, method=method)
    return FockDensity(d @ ref.matrix @ d.conj().T, ref.truncation_loss)


# ---------------------------------------------------------------------------
# protocol steps


def interaction_unitary(n: int, s: float, method: str = "spectral") -> np.ndarray:
    """``U = |1><1| (x) D(s/2) + |0><0| (x) D(-s/2)`` as an explicit ``2N x 2N`` matrix."""
    plus = displacement(n, s / 2, method=method)
    minus = displacement(n, -s / 2, method=method)
    u = np.zeros((2 * n, 2 * n), dtype=complex)
    u[:n, :n] = plus
    u[n:, n:] = minus
    return u


def interaction_unitary_expm(n: int, s: float, sigma: float = 1.0) -> np.ndarray:
    """Second construction: ``exp(-i g sigma_z (x) P)`` with ``g = s sigma``."""
    _, p = quadratures(n, sigma)
    sz = np.diag([1.0, -1.0]).astype(complex)
    return expm(-1j * s * sigma * np.kron(sz, p))


def product_state(qubit: QubitState, pointer: FockDensity) -> JointState:
    v = state_vector(qubit)
    return JointState(np.kron(np.outer(v, v.conj()), pointer.matrix))


def interact(joint: JointState, s: float, method: str = "spectral") -> JointState:
    n = joint.cutoff
    if s == 0:
        return JointState(joint.matrix.copy())
    # U is block diagonal: block k of the state is hit by D(+/- s/2) on each side
    d = [displacement(n, s / 2, method=method), displacement(n, -s / 2, method=method)]
    out = np.empty_like(joint.matrix)
    for k in range(2):
        left = d[k] @ joint.matrix[k * n : (k + 1) * n, :]
        for l in range(2):
            out[k * n : (k + 1) * n, l * n : (l + 1) * n] = left[:, l * n : (l + 1) * n] @ d[l].conj().T
    return JointState(out)


def apply_system_channel(joint: JointState, ch: GadChannel | list) -> JointState:
    """``sum_j (K_j (x) 1) rho (K_j^dag (x) 1)``, evaluated block by block."""
    kraus = kraus_ops(ch) if isinstance(ch, GadChannel) else ch
    n = joint.cutoff
    blocks = joint.matrix.reshape(2, n, 2, n)
    out = np.zeros_like(blocks)
    for k in kraus:
        out += np.einsum("ik,kalb,jl->iajb", k, blocks, k.conj(), optimize=True)
    return JointState(out.reshape(2 * n, 2 * n))


def post_select(joint: JointState, post: QubitState) -> tuple[float, FockDensity]:
    """Project the qubit on ``post``; return ``(P_succ, normalised pointer state)``."""
    n = joint.cutoff
    f = state_vector(post)
    blocks = joint.matrix.reshape(2, n, 2, n)
    unnorm = np.einsum("k,kalb,l->ab", f.conj(), blocks, f)
    prob = float(np.trace(unnorm).real)
    if prob < ZERO_POSTSELECTION:
        raise ZeroPostSelection(f"P_succ = {prob:.3e}")
    return prob, FockDensity(unnorm / prob)


# ---------------------------------------------------------------------------
# full protocol


def estimate_cutoff(setup: MeasurementSetup) -> int:
    """Starting cutoff covering displacement, interaction shift and Gaussian tails.

    The anti-squeezed quadrature variance ``v = (2n+1) e^{2r} / 2`` sets the
    exponential tail of the photon distribution; the mean shift adds
    ``(|alpha| + s/2)^2``.
    """
    pt = setup.pointer
    shift = abs(pt.alpha) + setup.s / 2
    v = (2 * pt.n_bar + 1) * np.exp(2 * pt.r) / 2
    n0 = shift**2 + 6 * shift * np.sqrt(v) + 18 * v + 20
    return int(max(16, 8 * math.ceil(n0 / 8)))


def _simulate(setup: MeasurementSetup, n: int, method: str) -> OracleReport:
    pt = setup.pointer
    rho_m = build_pointer(n, pt, method)
    joint = product_state(setup.pre, rho_m)
    joint = interact(joint, setup.s, method)
    joint = apply_system_channel(joint, setup.channel)
    prob, cond = post_select(joint, setup.post)
    x, p = quadratures(n, pt.sigma)
    return OracleReport(
        p_succ=prob,
        overlap=float(np.sum(rho_m.matrix.T * cond.matrix).real),
        mean_x=cond.expect(x).real,
        mean_p=cond.expect(p).real,
        initial_x=rho_m.expect(x).real,
        initial_p=rho_m.expect(p).real,
        conditioned_state=cond,
        cutoff_used=n,
        truncation_loss=rho_m.truncation_loss,
        tail_weight=max(rho_m.tail_weight(), cond.tail_weight()),
    )


def run_protocol(
    setup: MeasurementSetup,
    tol: float = 1e-9,
    max_cutoff: int = MAX_CUTOFF,
    start_cutoff: int | None = None,
    method: str = "spectral",
) -> OracleReport:
    """Prepare, interact, decohere and post-select at doubling cutoffs until converged.

    Converged means every scalar of :meth:`OracleReport.scalars` moved by less
    than ``tol`` between two successive cutoffs and the thermal truncation
    loss is below ``TRUNCATION_LOSS_TOL``.
    """
    n = start_cutoff or estimate_cutoff(setup)
    n = min(n, max_cutoff // 2) if n >= max_cutoff else n
    previous = None
    while True:
        try:
            report = _simulate(setup, n, method)
        except CutoffTooSmall:
            report = None
        if report is not None and previous is not None:
            diffs = [abs(report.scalars()[k] - previous.scalars()[k]) for k in report.scalars()]
            if max(diffs) < tol and report.truncation_loss < TRUNCATION_LOSS_TOL:
                return report
        previous = report
        if n >= max_cutoff:
            raise NoConvergence(f"no convergence up to cutoff {max_cutoff}")
        n = min(2 * n, max_cutoff)


def probe_traces(
    pt: PointerState, s_values, n: int | None = None, method: str = "spectral"
) -> dict[str, np.ndarray]:
    """Oracle values of ``Tr[rho0 D(s)]``, ``Tr[rho0 D rho0 D^dag]`` and ``Tr[rho0 D rho0 D]``.

    ``rho0`` is the centred reference state of ``pt``.
    """
    s_values = np.asarray(s_values, dtype=float)
    if n is None:
        centred = replace(pt, a=0.0, b=0.0)
        dummy = MeasurementSetup(QubitState(0.0), QubitState(0.0), GadChannel(0.0), centred, float(s_values.max()) * 2)
        n = min(estimate_cutoff(dummy), MAX_CUTOFF)
    rho0 = centered_pointer(n, pt, method).matrix
    chi0, pop, coh = [], [], []
    for s in s_values:
        d = displacement(n, s, method=method)
        rd = rho0 @ d
        rdd = rho0 @ d.conj().T
        chi0.append(np.trace(rd))
        # Tr(AB) = sum(A * B^T) avoids a third matrix product
        pop.append(np.sum(rd * rdd.T))
        coh.append(np.sum(rd * rd.T))
    return {
        "char": np.array(chi0),
        "overlap": np.array(pop),
        "coherence": np.array(coh),
        "purity": float(np.sum(np.abs(rho0) ** 2)),
        "cutoff": n,
    }
