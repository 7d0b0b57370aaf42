"""Truncated spin (x) phonon Hilbert space and sparse operators on it.

Tensor-factor order: one two-level factor per atom in atom order, then one
Fock factor per phonon-carrying atom in ``phonon_atoms`` order.  Inside a
spin factor ``|g>`` has index 0 and ``|e>`` index 1; Fock factors run
``|0> .. |n_cut>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "HilbertLayout",
    "identity",
    "embed",
    "adjoint",
    "sigma_lower",
    "phonon_annihilation",
    "phonon_number",
    "basis_index",
]

SPIN_LOWER = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


@dataclass(frozen=True)
class HilbertLayout:
    n_atoms: int
    phonon_atoms: tuple[int, ...] = (0,)
    n_cut: int = 1

    def __post_init__(self):
        object.__setattr__(self, "phonon_atoms", tuple(int(p) for p in self.phonon_atoms))
        if self.n_atoms < 1:
            raise ValueError("need at least one atom")
        if self.n_cut < 1:
            raise ValueError("phonon cutoff must be >= 1")
        if len(set(self.phonon_atoms)) != len(self.phonon_atoms):
            raise ValueError("duplicate phonon atom")
        for p in self.phonon_atoms:
            if not 0 <= p < self.n_atoms:
                raise ValueError(f"phonon atom {p} out of range")

    @property
    def factor_dims(self) -> tuple[int, ...]:
        return (2,) * self.n_atoms + (self.n_cut + 1,) * len(self.phonon_atoms)

    @property
    def dim(self) -> int:
        return 2**self.n_atoms * (self.n_cut + 1) ** len(self.phonon_atoms)

    def phonon_factor(self, atom_index: int) -> int:
        """Tensor-factor position of the phonon mode of ``atom_index``."""
        try:
            return self.n_atoms + self.phonon_atoms.index(atom_index)
        except ValueError:
            raise ValueError(f"atom {atom_index} carries no phonon mode") from None


def identity(layout: HilbertLayout) -> sp.csr_matrix:
    return sp.identity(layout.dim, dtype=complex, format="csr")


def embed(layout: HilbertLayout, factor: int, op) -> sp.csr_matrix:
    """Place the single-factor operator ``op`` on tensor factor ``factor``."""
    dims = layout.factor_dims
    if not 0 <= factor < len(dims):
        raise ValueError(f"factor {factor} out of range")
    op = sp.csr_matrix(op, dtype=complex)
    if op.shape != (dims[factor], dims[factor]):
        raise ValueError(f"operator shape {op.shape} does not match factor dimension {dims[factor]}")
    left = int(np.prod(dims[:factor], dtype=int))
    right = int(np.prod(dims[factor + 1:], dtype=int))
    parts = [sp.identity(left, dtype=complex), op, sp.identity(right, dtype=complex)]
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), parts)


def adjoint(op):
    """Conjugate transpose, keeping the sparse format."""
    return op.conj().T.tocsr() if sp.issparse(op) else np.conj(op).T


def sigma_lower(layout: HilbertLayout, atom_index: int) -> sp.csr_matrix:
    """``|g><e|`` on atom ``atom_index``."""
    if not 0 <= atom_index < layout.n_atoms:
        raise ValueError(f"atom {atom_index} out of range")
    return embed(layout, atom_index, SPIN_LOWER)


def _ladder(n_cut: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n_cut + 1)), 1, format="csr", dtype=complex)


def phonon_annihilation(layout: HilbertLayout, atom_index: int) -> sp.csr_matrix:
    """Truncated ``a`` on the phonon mode of ``atom_index``."""
    return embed(layout, layout.phonon_factor(atom_index), _ladder(layout.n_cut))


def phonon_number(layout: HilbertLayout, atom_index: int) -> sp.csr_matrix:
    a = phonon_annihilation(layout, atom_index)
    return (adjoint(a) @ a).tocsr()


def basis_index(layout: HilbertLayout, spins: Sequence[int], phonons: Sequence[int] = ()) -> int:
    """Flat index of the product state with the given spin and Fock labels.

    ``spins[i]`` is 0 for ``g`` and 1 for ``e``; ``phonons`` follows
    ``layout.phonon_atoms``.
    """
    labels = list(spins) + list(phonons)
    if len(labels) != len(layout.factor_dims):
        raise ValueError("wrong number of labels")
    return int(np.ravel_multi_index(labels, layout.factor_dims))
