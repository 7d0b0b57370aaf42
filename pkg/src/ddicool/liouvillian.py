"""Lamb-Dicke Hamiltonian and Lindblad generator for dipole-coupled atoms.

Energies are in units of the trap frequency ``nu``.  Superoperators act on
column-stacked density matrices: ``vec(A rho B) = kron(B.T, A) @ vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .geometry import CouplingMatrices
from .hilbert import HilbertLayout, adjoint, identity, phonon_annihilation, sigma_lower

__all__ = [
    "ModelParams",
    "layout_for",
    "build_hamiltonian",
    "build_liouvillian",
    "vec",
    "unvec",
    "spre",
    "spost",
]

#: sideband-cooling defaults: Delta = -nu, Gamma = 0.1 nu, eta*Omega_target = 0.04 nu
DEFAULT_GAMMA = 0.1
DEFAULT_DELTA = -1.0
DEFAULT_ETA_OMEGA = 0.04


@dataclass(frozen=True)
class ModelParams:
    """Model parameters in units of the trap frequency.

    ``eta_omega`` holds one drive strength per atom; atoms with a zero entry
    are spectators.
    """

    eta_omega: tuple[float, ...] = (DEFAULT_ETA_OMEGA,)
    gamma: float = DEFAULT_GAMMA
    delta: float = DEFAULT_DELTA
    n_cut: int = 1
    nu: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "eta_omega", tuple(float(x) for x in self.eta_omega))
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if any(x < 0 for x in self.eta_omega):
            raise ValueError("drive strengths must be non-negative")
        if self.n_cut < 1:
            raise ValueError("n_cut must be >= 1")

    @classmethod
    def target_driven(
        cls,
        n_atoms: int,
        target: int = 0,
        eta_omega: float = DEFAULT_ETA_OMEGA,
        **kwargs,
    ) -> "ModelParams":
        """Only ``target`` is driven, all other atoms are spectators."""
        drive = [0.0] * n_atoms
        drive[target] = eta_omega
        return cls(eta_omega=tuple(drive), **kwargs)

    @property
    def n_atoms(self) -> int:
        return len(self.eta_omega)

    @property
    def driven_atoms(self) -> tuple[int, ...]:
        return tuple(i for i, x in enumerate(self.eta_omega) if x != 0.0)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def layout_for(params: ModelParams, phonon_atoms: Sequence[int] | None = None) -> HilbertLayout:
    """Reduced layout: phonon modes only on driven atoms unless given explicitly."""
    if phonon_atoms is None:
        phonon_atoms = params.driven_atoms
    return HilbertLayout(params.n_atoms, tuple(phonon_atoms), params.n_cut)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape((d, d), order="F")


def spre(a) -> sp.csr_matrix:
    """Superoperator of ``rho -> a @ rho``."""
    return sp.kron(sp.identity(a.shape[0], dtype=complex), a, format="csr")


def spost(b) -> sp.csr_matrix:
    """Superoperator of ``rho -> rho @ b``."""
    return sp.kron(sp.csr_matrix(b).T, sp.identity(b.shape[0], dtype=complex), format="csr")


def _check(layout: HilbertLayout, params: ModelParams, couplings: CouplingMatrices) -> None:
    if params.n_atoms != layout.n_atoms or couplings.n_atoms != layout.n_atoms:
        raise ValueError(
            f"dimension mismatch: layout has {layout.n_atoms} atoms, params "
            f"{params.n_atoms}, couplings {couplings.n_atoms}"
        )
    if params.n_cut != layout.n_cut:
        raise ValueError("params.n_cut differs from layout.n_cut")
    for mu in params.driven_atoms:
        if mu not in layout.phonon_atoms:
            raise ValueError(f"driven atom {mu} has no phonon mode")


def build_hamiltonian(
    layout: HilbertLayout, params: ModelParams, couplings: CouplingMatrices
) -> sp.csr_matrix:
    """Lamb-Dicke Hamiltonian plus the coherent exchange ``sum g_mn s_m^+ s_n``.

    The spin-phonon coupling keeps the full ``(s^+ + s)(a^+ + a)`` product;
    the carrier term is absent.
    """
    _check(layout, params, couplings)
    n = layout.n_atoms
    sig = [sigma_lower(layout, mu) for mu in range(n)]
    sig_up = [adjoint(s) for s in sig]
    H = sp.csr_matrix((layout.dim, layout.dim), dtype=complex)
    for mu in range(n):
        H = H - params.delta * (sig_up[mu] @ sig[mu])
    for mu in layout.phonon_atoms:
        a = phonon_annihilation(layout, mu)
        H = H + params.nu * (adjoint(a) @ a)
        if params.eta_omega[mu] != 0.0:
            H = H + 0.5 * params.eta_omega[mu] * ((sig_up[mu] + sig[mu]) @ (adjoint(a) + a))
    for mu in range(n):
        for nu in range(n):
            if mu != nu and couplings.shifts[mu, nu] != 0.0:
                H = H + couplings.shifts[mu, nu] * (sig_up[mu] @ sig[nu])
    return H.tocsr()


def build_liouvillian(
    layout: HilbertLayout, params: ModelParams, couplings: CouplingMatrices
) -> sp.csr_matrix:
    """Generator ``L`` with ``d vec(rho)/dt = L @ vec(rho)``.

    Dissipation ``sum_{m,n} gamma_mn (s_n rho s_m^+ - {s_m^+ s_n, rho}/2)``
    with ``gamma_mm = Gamma``.
    """
    H = build_hamiltonian(layout, params, couplings)
    eye = identity(layout)
    L = -1j * (spre(H) - spost(H))
    sig = [sigma_lower(layout, mu) for mu in range(layout.n_atoms)]
    for mu in range(layout.n_atoms):
        for nu in range(layout.n_atoms):
            rate = couplings.decays[mu, nu]
            if rate == 0.0:
                continue
            jump = sp.kron(sig[mu].conj(), sig[nu], format="csr")
            loss = adjoint(sig[mu]) @ sig[nu]
            L = L + rate * (jump - 0.5 * sp.kron(eye, loss) - 0.5 * sp.kron(loss.T, eye))
    return L.tocsr()
