"""Sparse multimode bosonic Fock-space engine.

States are immutable maps from occupation vectors to complex amplitudes.
An occupation vector is a canonically sorted tuple of ``(Mode, count)``
pairs with no zero counts; the empty tuple is the vacuum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

MAX_OCCUPATION = 8
PRUNE_TOLERANCE = 1e-12


class Pol(IntEnum):
    H = 0
    V = 1


class Mode(NamedTuple):
    """A (path, polarization) mode. Tuple order gives path first, H before V."""

    path: int
    pol: Pol

    def __str__(self) -> str:
        return f"{self.pol.name.lower()}{self.path}"


def h(path: int) -> Mode:
    return _mode(path, Pol.H)


def v(path: int) -> Mode:
    return _mode(path, Pol.V)


def _mode(path: int, pol: Pol) -> Mode:
    if path < 1:
        raise ValueError(f"path labels start at 1, got {path}")
    return Mode(path, pol)


def path_modes(*paths: int) -> tuple[Mode, ...]:
    """Both polarization modes of each path, in canonical order."""
    return tuple(sorted(Mode(p, pol) for p in paths for pol in Pol))


Occupation = tuple  # tuple[tuple[Mode, int], ...], canonical


def occupation(counts: Mapping[Mode, int] | Iterable[tuple[Mode, int]]) -> Occupation:
    """Canonical occupation vector from a mode->count mapping."""
    items = counts.items() if isinstance(counts, Mapping) else counts
    merged: dict[Mode, int] = {}
    for mode, n in items:
        if n < 0:
            raise ValueError(f"negative occupation {n} at {mode}")
        merged[mode] = merged.get(mode, 0) + n
    for mode, n in merged.items():
        if n > MAX_OCCUPATION:
            raise ValueError(f"occupation {n} at {mode} exceeds cap {MAX_OCCUPATION}")
    return tuple(sorted((m, n) for m, n in merged.items() if n))


def photon_number(occ: Occupation) -> int:
    return sum(n for _, n in occ)


def split_occupation(occ: Occupation, modes) -> tuple[Occupation, Occupation]:
    """Split into (part on ``modes``, remainder)."""
    inside = tuple((m, n) for m, n in occ if m in modes)
    outside = tuple((m, n) for m, n in occ if m not in modes)
    return inside, outside


def merge_occupations(a: Occupation, b: Occupation) -> Occupation:
    return occupation(list(a) + list(b))


def format_occupation(occ: Occupation) -> str:
    if not occ:
        return "vac"
    return ",".join(f"{m.path}.{m.pol.name}:{n}" for m, n in occ)


def parse_occupation(text: str) -> Occupation:
    if text == "vac":
        return ()
    counts = []
    for item in text.split(","):
        label, n = item.split(":")
        path, pol = label.split(".")
        counts.append((Mode(int(path), Pol[pol]), int(n)))
    return occupation(counts)


class FockState:
    """Immutable sparse superposition of Fock kets.

    Amplitudes with magnitude below ``prune_tolerance`` are dropped at
    construction, so two states built along different routes compare
    structurally once rounding noise is below the tolerance.
    """

    __slots__ = ("_amps", "prune_tolerance", "_hash")

    def __init__(self, amplitudes: Mapping | None = None, prune_tolerance: float = PRUNE_TOLERANCE):
        merged: dict[Occupation, complex] = {}
        for key, amp in (amplitudes or {}).items():
            key = occupation(key)
            merged[key] = merged.get(key, 0j) + complex(amp)
        self._amps = {k: merged[k] for k in sorted(merged) if abs(merged[k]) >= prune_tolerance}
        self.prune_tolerance = prune_tolerance
        self._hash = None

    @classmethod
    def _trusted(cls, amps: dict, prune_tolerance: float = PRUNE_TOLERANCE) -> "FockState":
        # keys already canonical; only sort and prune
        obj = cls.__new__(cls)
        obj._amps = {k: amps[k] for k in sorted(amps) if abs(amps[k]) >= prune_tolerance}
        obj.prune_tolerance = prune_tolerance
        obj._hash = None
        return obj

    @property
    def amplitudes(self) -> Mapping[Occupation, complex]:
        return MappingProxyType(self._amps)

    def items(self):
        return self._amps.items()

    def amplitude(self, occ) -> complex:
        return self._amps.get(occupation(occ), 0j)

    def __len__(self) -> int:
        return len(self._amps)

    def is_zero(self) -> bool:
        return not self._amps

    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 for a in self._amps.values()))

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def normalized(self) -> "FockState":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero state")
        return self * (1.0 / nrm)

    def modes(self) -> set[Mode]:
        return {m for key in self._amps for m, _ in key}

    def photon_numbers(self) -> set[int]:
        return {photon_number(k) for k in self._amps}

    def __add__(self, other: "FockState") -> "FockState":
        out = dict(self._amps)
        for k, a in other._amps.items():
            out[k] = out.get(k, 0j) + a
        return FockState._trusted(out, self.prune_tolerance)

    def __sub__(self, other: "FockState") -> "FockState":
        return self + (-1.0) * other

    def __neg__(self) -> "FockState":
        return (-1.0) * self

    def __mul__(self, scalar) -> "FockState":
        scalar = complex(scalar)
        return FockState._trusted({k: a * scalar for k, a in self._amps.items()}, self.prune_tolerance)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "FockState":
        return self * (1.0 / complex(scalar))

    def __eq__(self, other) -> bool:
        return isinstance(other, FockState) and self._amps == other._amps

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._amps.items()))
        return self._hash

    def allclose(self, other: "FockState", atol: float = 1e-12) -> bool:
        keys = set(self._amps) | set(other._amps)
        return all(abs(self._amps.get(k, 0j) - other._amps.get(k, 0j)) <= atol for k in keys)

    def tensor(self, other: "FockState") -> "FockState":
        """Product state; the two states must occupy disjoint modes."""
        shared = self.modes() & other.modes()
        if shared:
            raise ValueError(f"tensor product needs disjoint modes, both use {sorted(shared)}")
        out = {}
        for ka, a in self._amps.items():
            for kb, b in other._amps.items():
                out[tuple(sorted(ka + kb))] = a * b
        return FockState._trusted(out, self.prune_tolerance)

    def to_text(self) -> str:
        """Canonical text form, one ket per line: ``path.pol:count,...  re  im``."""
        lines = [
            f"{format_occupation(k)}  {a.real:.17g}  {a.imag:.17g}" for k, a in self._amps.items()
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "FockState":
        amps = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, re_, im = line.split()
            amps[parse_occupation(key)] = complex(float(re_), float(im))
        return cls(amps)

    def __repr__(self) -> str:
        terms = " + ".join(f"({a:.6g})|{format_occupation(k)}>" for k, a in self._amps.items())
        return f"FockState({terms or '0'})"


def vacuum() -> FockState:
    return FockState._trusted({(): 1 + 0j})


def zero_state() -> FockState:
    return FockState._trusted({})


def _shift(key: Occupation, mode: Mode, delta: int) -> tuple[Occupation, int]:
    counts = dict(key)
    n = counts.get(mode, 0)
    counts[mode] = n + delta
    return occupation(counts), n


def create(state: FockState, mode: Mode) -> FockState:
    out = {}
    for key, amp in state.items():
        new, n = _shift(key, mode, +1)
        out[new] = out.get(new, 0j) + amp * math.sqrt(n + 1)
    return FockState._trusted(out, state.prune_tolerance)


def annihilate(state: FockState, mode: Mode) -> FockState:
    out = {}
    for key, amp in state.items():
        n = dict(key).get(mode, 0)
        if n == 0:
            continue
        new, _ = _shift(key, mode, -1)
        out[new] = out.get(new, 0j) + amp * math.sqrt(n)
    return FockState._trusted(out, state.prune_tolerance)


def inner(a: FockState, b: FockState) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if len(a) > len(b):
        return sum(a.amplitudes[k].conjugate() * amp for k, amp in b.items() if k in a.amplitudes)
    return sum(amp.conjugate() * b.amplitudes[k] for k, amp in a.items() if k in b.amplitudes) + 0j


def partial_inner(bra: FockState, state: FockState, modes: Iterable[Mode]) -> FockState:
    """Contract ``bra`` (a state on ``modes``) against that part of ``state``.

    Returns the unnormalized state on the remaining modes,
    sum_k <bra|k>_modes (x) |rest_k>.
    """
    modes = frozenset(modes)
    if not bra.modes() <= modes:
        raise ValueError("bra occupies modes outside the contracted set")
    out: dict[Occupation, complex] = {}
    bra_amps = bra.amplitudes
    for key, amp in state.items():
        inside, rest = split_occupation(key, modes)
        b = bra_amps.get(inside)
        if b is None:
            continue
        out[rest] = out.get(rest, 0j) + b.conjugate() * amp
    return FockState._trusted(out, state.prune_tolerance)


@dataclass(frozen=True, eq=False)
class ModeMap:
    """Linear map on creation operators: ``a_in^dag -> sum_out matrix[out, in] a_out^dag``.

    Rows and columns are both indexed by ``modes``; passive optics act in place.
    """

    modes: tuple[Mode, ...]
    matrix: np.ndarray
    unitary: bool = True
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        modes = tuple(self.modes)
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (len(modes), len(modes)):
            raise ValueError(f"matrix shape {mat.shape} does not match {len(modes)} modes")
        if len(set(modes)) != len(modes):
            raise ValueError("duplicate modes in ModeMap")
        mat.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "_index", {m: i for i, m in enumerate(modes)})
        if self.unitary and not self.is_unitary():
            raise ValueError("ModeMap declared unitary but U U^dag != 1")

    def is_unitary(self, atol: float = 1e-12) -> bool:
        eye = np.eye(len(self.modes))
        return bool(np.all(np.abs(self.matrix @ self.matrix.conj().T - eye) <= atol))

    def extended(self, extra: Iterable[Mode]) -> "ModeMap":
        """The same map acting as identity on ``extra`` modes."""
        extra = tuple(sorted(set(extra) - set(self.modes)))
        if not extra:
            return self
        k, e = len(self.modes), len(extra)
        mat = np.eye(k + e, dtype=complex)
        mat[:k, :k] = self.matrix
        return ModeMap(self.modes + extra, mat, unitary=self.unitary)

    def then(self, other: "ModeMap") -> "ModeMap":
        """Apply ``self`` first, then ``other`` (same mode list)."""
        if other.modes != self.modes:
            raise ValueError("composed ModeMaps must share the mode list")
        return ModeMap(self.modes, other.matrix @ self.matrix, unitary=self.unitary and other.unitary)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModeMap)
            and self.modes == other.modes
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self) -> int:
        return hash((self.modes, self.matrix.tobytes()))


def identity_map(modes: Sequence[Mode]) -> ModeMap:
    return ModeMap(tuple(modes), np.eye(len(modes)))


def apply_mode_map(state: FockState, mmap: ModeMap) -> FockState:
    """Substitute every creation operator by its image and re-expand."""
    uncovered = state.modes() - set(mmap.modes)
    if uncovered:
        raise ValueError(f"uncovered mode(s) {sorted(map(str, uncovered))}")
    mat = mmap.matrix
    index = mmap._index
    columns = [
        [(o, mat[o, i]) for o in range(len(mmap.modes)) if mat[o, i] != 0] for i in range(len(mmap.modes))
    ]
    out: dict[Occupation, complex] = {}
    for key, amp in state.items():
        norm_in = math.prod(math.factorial(n) for _, n in key)
        # (out-mode index multiset) -> coefficient of the creation monomial
        terms: dict[tuple[int, ...], complex] = {(): amp / math.sqrt(norm_in)}
        for mode, n in key:
            col = columns[index[mode]]
            for _ in range(n):
                nxt: dict[tuple[int, ...], complex] = {}
                for mono, c in terms.items():
                    for o, u in col:
                        k = tuple(sorted(mono + (o,)))
                        nxt[k] = nxt.get(k, 0j) + c * u
                terms = nxt
        for mono, c in terms.items():
            counts: dict[Mode, int] = {}
            for o in mono:
                m = mmap.modes[o]
                counts[m] = counts.get(m, 0) + 1
            occ = occupation(counts)
            scale = math.sqrt(math.prod(math.factorial(n) for n in counts.values()))
            out[occ] = out.get(occ, 0j) + c * scale
    return FockState._trusted(out, state.prune_tolerance)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, PSD, unit-trace matrix over an explicit basis of hashable keys."""

    basis: tuple
    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "matrix", mat)
        if mat.shape != (len(self.basis), len(self.basis)):
            raise ValueError("matrix shape does not match basis length")
        if self.validate:
            if not np.allclose(mat, mat.conj().T, rtol=0, atol=1e-12):
                raise ValueError("density matrix is not hermitian")
            if abs(np.trace(mat) - 1) > 1e-10:
                raise ValueError(f"density matrix trace {np.trace(mat).real} != 1")
            if np.linalg.eigvalsh(mat).min() < -1e-10:
                raise ValueError("density matrix has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def populations(self) -> dict:
        return dict(zip(self.basis, np.real(np.diag(self.matrix))))


def reduced_density(state: FockState, keep_modes: Iterable[Mode]) -> DensityMatrix:
    """Partial trace over every mode not in ``keep_modes``."""
    keep = frozenset(keep_modes)
    nrm2 = state.norm_squared()
    if nrm2 == 0:
        raise ValueError("reduced density of the zero state")
    by_rest: dict[Occupation, list[tuple[Occupation, complex]]] = {}
    kept_keys: set[Occupation] = set()
    for key, amp in state.items():
        inside, rest = split_occupation(key, keep)
        by_rest.setdefault(rest, []).append((inside, amp))
        kept_keys.add(inside)
    basis = sorted(kept_keys)
    idx = {k: i for i, k in enumerate(basis)}
    rho = np.zeros((len(basis), len(basis)), dtype=complex)
    for entries in by_rest.values():
        vec = np.zeros(len(basis), dtype=complex)
        for inside, amp in entries:
            vec[idx[inside]] += amp
        rho += np.outer(vec, vec.conj())
    return DensityMatrix(tuple(basis), rho / nrm2)


def state_vector(state: FockState, basis: Sequence[Occupation]) -> np.ndarray:
    """Amplitudes of ``state`` on an explicit ket basis; kets off the basis are an error."""
    idx = {k: i for i, k in enumerate(basis)}
    vec = np.zeros(len(basis), dtype=complex)
    for key, amp in state.items():
        if key not in idx:
            raise ValueError(f"ket {format_occupation(key)} is outside the basis")
        vec[idx[key]] = amp
    return vec


def fock_basis(modes: Sequence[Mode], photons: int) -> list[Occupation]:
    """All kets with exactly ``photons`` photons over ``modes``, canonical order."""
    modes = sorted(modes)
    out = []

    def rec(i, left, acc):
        if i == len(modes) - 1:
            out.append(occupation(acc + [(modes[i], left)]))
            return
        for n in range(left, -1, -1):
            rec(i + 1, left - n, acc + [(modes[i], n)])

    if modes:
        rec(0, photons, [])
    return sorted(out)
