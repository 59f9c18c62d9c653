from __future__ import annotations

from typing import Mapping

import numpy as np

from .. import kernels
from .layout import LayoutError, RegisterLayout

PRUNE_TOL = 1e-14
NORM_TOL = 1e-12
DENSE_CAP = 1 << 12


class NormMonitor:
    """Worst norm deviation seen by ``check_norm`` since the last reset."""

    def __init__(self):
        self.reset()

    def reset(self):
        self.checks = 0
        self.max_error = 0.0

    def record(self, err: float):
        self.checks += 1
        if err > self.max_error:
            self.max_error = err


NORM_MONITOR = NormMonitor()


class NumericalInvariantError(RuntimeError):
    """A state drifted off the unit sphere: a simulator bug, never user error."""


def _canonical_select(idx, amps, prune_tol, assume_sorted):
    select = None
    # prune_tol == 0 marks a pure permutation: amplitudes are already pruned
    keep = kernels.keep_mask(amps, float(prune_tol)) if prune_tol > 0 else None
    if keep is not None and not keep.all():
        select = np.flatnonzero(keep)
        idx = idx[select]
    if not assume_sorted and idx.shape[0] > 1 and not np.all(idx[1:] > idx[:-1]):
        order = np.argsort(idx, kind="stable")
        idx = idx[order]
        select = order if select is None else select[order]
    if select is not None:
        amps = amps[select]
    return idx, amps, select


def canonical(idx: np.ndarray, amps: np.ndarray, prune_tol: float = PRUNE_TOL,
              assume_sorted: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Sort by index and drop amplitudes with modulus at or below ``prune_tol``.

    Indices must already be unique.
    """
    idx, amps, _ = _canonical_select(idx, amps, prune_tol, assume_sorted)
    return idx, amps


def rebuild(layout, idx, amps, prune_tol=PRUNE_TOL, assume_sorted=False, digits=None) -> "SparseState":
    """Canonicalize into a state, carrying along register values already known
    for the unsorted entries (``digits``: name -> array aligned with ``idx``)."""
    idx, amps, select = _canonical_select(idx, amps, prune_tol, assume_sorted)
    if digits:
        digits = {name: (col if select is None else col[select]) for name, col in digits.items()}
        for col in digits.values():
            col.setflags(write=False)
    return SparseState(layout, idx, amps, _digits=digits or None)


class SparseState:
    """Immutable sparse complex amplitude map over the basis of a layout.

    Stored as a strictly increasing array of linear basis indices and the
    matching amplitudes.
    """

    __slots__ = ("layout", "idx", "amps", "_digits", "_norm")

    def __init__(self, layout: RegisterLayout, idx: np.ndarray, amps: np.ndarray, _digits=None):
        idx = np.asarray(idx, dtype=np.int64)
        amps = np.asarray(amps, dtype=np.complex128)
        idx.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "idx", idx)
        object.__setattr__(self, "amps", amps)
        # register values depend only on idx, so states sharing idx share them
        object.__setattr__(self, "_digits", {} if _digits is None else _digits)
        object.__setattr__(self, "_norm", None)

    def __setattr__(self, name, value):
        raise AttributeError("SparseState is immutable")

    @classmethod
    def zero(cls, layout: RegisterLayout) -> "SparseState":
        return cls(layout, np.zeros(1, dtype=np.int64), np.ones(1, dtype=np.complex128))

    @classmethod
    def basis(cls, layout: RegisterLayout, values) -> "SparseState":
        return cls(layout, np.array([layout.index_of(values)], dtype=np.int64),
                   np.ones(1, dtype=np.complex128))

    @classmethod
    def from_amplitudes(cls, layout: RegisterLayout, amplitudes: Mapping, normalize: bool = False,
                        prune_tol: float = PRUNE_TOL) -> "SparseState":
        acc: dict[int, complex] = {}
        for values, a in amplitudes.items():
            if isinstance(values, (int, np.integer)) and len(layout.dims) == 1:
                values = (values,)
            i = layout.index_of(values)
            acc[i] = acc.get(i, 0) + complex(a)
        idx = np.fromiter(acc.keys(), dtype=np.int64, count=len(acc))
        amps = np.fromiter(acc.values(), dtype=np.complex128, count=len(acc))
        if normalize:
            nrm = np.linalg.norm(amps)
            if nrm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / nrm
        idx, amps = canonical(idx, amps, prune_tol)
        return cls(layout, idx, amps)

    @classmethod
    def from_dense(cls, layout: RegisterLayout, vector: np.ndarray,
                   prune_tol: float = PRUNE_TOL) -> "SparseState":
        vector = np.asarray(vector, dtype=np.complex128).reshape(-1)
        if vector.shape[0] != layout.total_dim:
            raise LayoutError(f"dense vector of length {vector.shape[0]} does not match dimension {layout.total_dim}")
        idx, amps = canonical(np.arange(vector.shape[0], dtype=np.int64), vector, prune_tol, assume_sorted=True)
        return cls(layout, idx, amps)

    def __len__(self) -> int:
        return int(self.idx.shape[0])

    def __repr__(self) -> str:
        return f"SparseState({self.layout.names}, nnz={len(self)})"

    @property
    def amplitudes(self) -> dict:
        """Basis tuple -> amplitude."""
        return {self.layout.values_of(i): complex(a) for i, a in zip(self.idx.tolist(), self.amps)}

    def amplitude(self, values) -> complex:
        i = self.layout.index_of(values)
        pos = np.searchsorted(self.idx, i)
        if pos < len(self) and self.idx[pos] == i:
            return complex(self.amps[pos])
        return 0j

    def norm_squared(self) -> float:
        if self._norm is None:
            # compensated summation; a plain dot accumulates O(n eps) error on large states
            object.__setattr__(self, "_norm", float(kernels.sum_abs2(self.amps)))
        return self._norm

    def digits(self, name: str) -> np.ndarray:
        out = self._digits.get(name)
        if out is None:
            out = self.layout.digits(self.idx, name)
            out.setflags(write=False)
            self._digits[name] = out
        return out

    def with_amps(self, amps: np.ndarray) -> "SparseState":
        return SparseState(self.layout, self.idx, amps, _digits=self._digits)

    def to_dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        if self.layout.total_dim > cap:
            raise LayoutError(f"dense view refused: dimension {self.layout.total_dim} > {cap}")
        out = np.zeros(self.layout.total_dim, dtype=np.complex128)
        out[self.idx] = self.amps
        return out

    def check_norm(self, tol: float = NORM_TOL) -> "SparseState":
        err = abs(self.norm_squared() - 1.0)
        NORM_MONITOR.record(err)
        if err > tol:
            raise NumericalInvariantError(f"state norm drifted by {err:.3e} (> {tol:.0e})")
        return self
