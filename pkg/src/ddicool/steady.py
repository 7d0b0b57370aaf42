"""Steady states of the Lindblad generator and derived cooling figures."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .hilbert import HilbertLayout, phonon_number
from .liouvillian import unvec, vec

__all__ = [
    "DegenerateSteadyStateError",
    "InvariantViolation",
    "SteadyResult",
    "steady_state",
    "phonon_occupation",
    "cooling_ratio",
    "evolve",
    "NULLITY_GAP_MIN",
    "DENSE_SVD_MAX",
]

#: smallest accepted ratio between the two smallest singular values (or eigenvalue magnitudes)
NULLITY_GAP_MIN = 1e6
#: largest superoperator dimension solved by dense SVD under method="auto"
DENSE_SVD_MAX = 1024
#: above this the trace-replaced system is solved by ILU-preconditioned GMRES
DIRECT_SOLVE_MAX = 20000

RESIDUAL_TOL = 1e-10
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-8


class DegenerateSteadyStateError(RuntimeError):
    """The generator has more than one stationary state."""


class InvariantViolation(RuntimeError):
    """A density matrix or propagation result broke a physical invariant."""


@dataclass
class SteadyResult:
    rho: np.ndarray
    n_target: float | None
    residual: float
    nullity_gap: float
    hermiticity_error: float = 0.0
    min_eigenvalue: float = 0.0
    method: str = "svd"
    extra: dict = field(default_factory=dict)

    def violations(self) -> list[str]:
        """Human-readable list of tolerance breaches (empty when clean)."""
        out = []
        if not self.residual <= RESIDUAL_TOL:
            out.append(f"residual {self.residual:.3e} > {RESIDUAL_TOL:g}")
        if self.min_eigenvalue < -PSD_TOL:
            out.append(f"min eigenvalue {self.min_eigenvalue:.3e} < {-PSD_TOL:g}")
        return out


def _trace_row(d: int) -> sp.csr_matrix:
    cols = np.arange(d) * (d + 1)
    return sp.csr_matrix((np.ones(d, dtype=complex), (np.zeros(d, int), cols)), shape=(1, d * d))


def _null_vector_svd(L) -> tuple[np.ndarray, float]:
    dense = L.toarray() if sp.issparse(L) else np.asarray(L)
    _, s, vh = la.svd(dense)
    if s[-2] == 0.0:
        gap = 1.0  # at least two exact zero modes
    else:
        gap = np.inf if s[-1] == 0.0 else s[-2] / s[-1]
    return vh[-1].conj(), float(gap)


def _null_vector_trace(L) -> np.ndarray:
    d2 = L.shape[0]
    d = int(round(np.sqrt(d2)))
    A = sp.vstack([_trace_row(d), sp.csr_matrix(L, dtype=complex)[1:]]).tocsc()
    rhs = np.zeros(d2, dtype=complex)
    rhs[0] = 1.0
    if d2 <= DIRECT_SOLVE_MAX:
        try:
            return spla.splu(A).solve(rhs)
        except RuntimeError as exc:  # "Factor is exactly singular"
            raise DegenerateSteadyStateError("degenerate steady state") from exc
    # direct LU fill-in explodes for many spins
    try:
        ilu = spla.spilu(A, drop_tol=1e-3, fill_factor=30)
    except RuntimeError as exc:
        raise DegenerateSteadyStateError("degenerate steady state") from exc
    M = spla.LinearOperator(A.shape, ilu.solve, dtype=complex)
    x, info = spla.gmres(A, rhs, M=M, rtol=1e-14, atol=1e-15, restart=100, maxiter=50)
    if info != 0:
        raise DegenerateSteadyStateError(f"trace-replaced system did not converge (info={info})")
    return x


def _eigen_gap(L) -> float:
    # two eigenvalues nearest zero via shift-invert just left of the origin
    scale = max(spla.norm(L, 1), 1.0)
    vals = spla.eigs(sp.csc_matrix(L), k=2, sigma=-1e-7 * scale, which="LM",
                     return_eigenvectors=False, tol=1e-14)
    mags = np.sort(np.abs(vals))
    if mags[1] == 0.0:
        return 1.0
    return np.inf if mags[0] == 0.0 else float(mags[1] / mags[0])


def steady_state(
    L,
    layout: HilbertLayout | None = None,
    target_index: int | None = 0,
    method: str = "auto",
) -> SteadyResult:
    """Unique unit-trace stationary state of ``L``.

    Parameters
    ----------
    L : sparse or dense (D^2, D^2) matrix
        Column-stacked generator.
    layout, target_index :
        Used to report the target phonon occupation; skipped when ``layout``
        is None or the target has no phonon mode.
    method : {"auto", "svd", "trace"}
        ``"svd"`` takes the dense singular-value null space; ``"trace"``
        replaces one row of ``L`` by the trace condition and solves the sparse
        system (direct LU, or ILU-preconditioned GMRES beyond
        ``DIRECT_SOLVE_MAX``, in which case ``nullity_gap`` is NaN).
        ``"auto"`` uses SVD up to ``DENSE_SVD_MAX``.

    Raises
    ------
    DegenerateSteadyStateError
        If the stationary state is not unique.
    InvariantViolation
        If the result is not Hermitian or not positive semidefinite.
    """
    d2 = L.shape[0]
    d = int(round(np.sqrt(d2)))
    if d * d != d2 or L.shape[1] != d2:
        raise ValueError(f"generator shape {L.shape} is not (D^2, D^2)")
    if method == "auto":
        method = "svd" if d2 <= DENSE_SVD_MAX else "trace"
    if method == "svd":
        v, gap = _null_vector_svd(L)
    elif method == "trace":
        v = _null_vector_trace(L)
        if d2 <= 4:
            gap = _null_vector_svd(L)[1]
        elif d2 <= DIRECT_SOLVE_MAX:
            gap = _eigen_gap(L)
        else:
            gap = np.nan  # uniqueness rests on GMRES convergence
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.isnan(gap) and gap < NULLITY_GAP_MIN:
        raise DegenerateSteadyStateError(
            f"degenerate steady state (nullity gap {gap:.3e} < {NULLITY_GAP_MIN:g})"
        )

    rho = unvec(v)
    rho = rho / np.trace(rho)
    herm_err = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_err > HERMITIAN_TOL:
        raise InvariantViolation(f"steady state not Hermitian: deviation {herm_err:.3e}")
    rho = 0.5 * (rho + rho.conj().T)
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < -PSD_TOL:
        raise InvariantViolation(f"steady state not PSD: min eigenvalue {min_eig:.3e}")
    residual = float(np.linalg.norm(L @ vec(rho)))

    n_target = None
    if layout is not None and target_index is not None and target_index in layout.phonon_atoms:
        n_target = phonon_occupation(rho, layout, target_index)
    return SteadyResult(rho, n_target, residual, gap, herm_err, min_eig, method)


def phonon_occupation(rho: np.ndarray, layout: HilbertLayout, atom_index: int) -> float:
    """``tr(a^+ a rho)`` for the phonon mode of ``atom_index``."""
    n_op = phonon_number(layout, atom_index)
    value = (n_op @ np.asarray(rho)).trace()
    if abs(value.imag) >= 1e-12:
        raise InvariantViolation(f"phonon occupation has imaginary part {value.imag:.3e}")
    return float(value.real)


def cooling_ratio(multi: SteadyResult, single_reference: SteadyResult) -> float:
    """Target occupation relative to the single-atom reference (< 1 is cooler)."""
    if multi.n_target is None or single_reference.n_target is None:
        raise ValueError("both results need a target phonon occupation")
    if single_reference.n_target < 1e-15:
        raise ValueError("single-atom reference occupation is too small for a ratio")
    return multi.n_target / single_reference.n_target


def evolve(L, rho0: np.ndarray, t: float) -> np.ndarray:
    """Propagate ``rho0`` for time ``t`` (units of 1/nu) under ``L``.

    Small generators use the dense scaling-and-squaring exponential, large ones
    the action of the exponential on the vector.
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    rho0 = np.asarray(rho0, dtype=complex)
    if t == 0:
        return rho0.copy()
    v0 = vec(rho0)
    if L.shape[0] <= DENSE_SVD_MAX:
        dense = L.toarray() if sp.issparse(L) else np.asarray(L)
        v = la.expm(dense * t) @ v0
    else:
        v = spla.expm_multiply(sp.csr_matrix(L) * t, v0)
    rho = unvec(v)
    drift = abs(np.trace(rho) - np.trace(rho0))
    if drift > 1e-9:
        raise InvariantViolation(f"trace drift {drift:.3e} during propagation")
    return rho
