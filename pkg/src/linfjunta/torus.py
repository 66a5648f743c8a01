"""Real trigonometric polynomials on the torus T^N = (R/Z)^N.

A :class:`TrigPoly` stores the finite Fourier expansion

    f(x) = sum_k c_k exp(2 pi i k.x)

with Hermitian symmetry c_{-k} = conj(c_k), so f is real valued.  The
operators below act on the coefficients exactly: partial derivatives,
the heat semigroup, conditional expectations onto coordinate subsets and
the Parseval L2 norm.  L1 quantities (gradient mass, Lipschitz constant)
need quadrature and take a :class:`~linfjunta.quadrature.QuadratureSpec`.
"""
from __future__ import annotations

import math
from typing import Iterable, Mapping

import numpy as np

TWO_PI = 2.0 * math.pi
PRUNE_TOL = 1e-15
HERMITIAN_TOL = 1e-12


def coord_set(S: Iterable[int], dim: int) -> tuple[int, ...]:
    """Validate a coordinate set (0-based) and return it sorted."""
    out = sorted(set(int(n) for n in S))
    for n in out:
        if not 0 <= n < dim:
            raise ValueError(f"coordinate {n} out of range for dim={dim}")
    return tuple(out)


class TrigPoly:
    """Immutable real trigonometric polynomial on T^dim.

    Coordinates are 0-based throughout the library.

    Parameters
    ----------
    dim : int
        Ambient dimension N >= 1.
    terms : mapping, optional
        Frequency tuple -> complex amplitude.  Both k and -k must be given
        and agree up to conjugation (use :meth:`from_half` otherwise).
    """

    __slots__ = ("_dim", "_freqs", "_coeffs", "_cache")

    def __init__(self, dim: int, terms: Mapping[tuple, complex] | None = None):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        terms = dict(terms or {})
        if terms:
            freqs = np.array([tuple(k) for k in terms], dtype=np.int64)
            coeffs = np.array([complex(v) for v in terms.values()], dtype=complex)
        else:
            freqs = np.zeros((0, dim), dtype=np.int64)
            coeffs = np.zeros(0, dtype=complex)
        self._set(dim, freqs, coeffs)

    @classmethod
    def from_arrays(cls, dim: int, freqs, coeffs) -> "TrigPoly":
        obj = cls.__new__(cls)
        obj._set(dim, np.asarray(freqs, dtype=np.int64).reshape(-1, dim),
                 np.asarray(coeffs, dtype=complex).ravel())
        return obj

    @classmethod
    def from_half(cls, dim: int, terms: Mapping[tuple, complex]) -> "TrigPoly":
        """Build from one representative per +-k pair; the mirror is implied.

        The zero frequency keeps only its real part.
        """
        full: dict[tuple, complex] = {}
        for k, c in terms.items():
            k = tuple(int(v) for v in k)
            neg = tuple(-v for v in k)
            if k == neg:
                full[k] = full.get(k, 0.0) + complex(c).real
                continue
            full[k] = full.get(k, 0.0) + complex(c)
            full[neg] = full.get(neg, 0.0) + complex(c).conjugate()
        return cls(dim, full)

    @classmethod
    def constant(cls, dim: int, value: float) -> "TrigPoly":
        return cls(dim, {(0,) * dim: float(value)})

    @classmethod
    def cosine(cls, dim: int, k, amplitude: float = 1.0, phase: float = 0.0) -> "TrigPoly":
        """amplitude * cos(2 pi k.x + phase)."""
        k = tuple(int(v) for v in k)
        if len(k) != dim:
            raise ValueError("frequency length must equal dim")
        if not any(k):
            return cls.constant(dim, amplitude * math.cos(phase))
        return cls.from_half(dim, {k: 0.5 * amplitude * complex(math.cos(phase), math.sin(phase))})

    def _set(self, dim, freqs, coeffs):
        if freqs.ndim != 2 or freqs.shape[1] != dim:
            raise ValueError(f"frequencies must have length {dim}")
        if len(freqs):
            # merge duplicates, sort lexicographically
            codes = _row_codes(freqs)
            if codes is None:
                uniq, inv = np.unique(freqs, axis=0, return_inverse=True)
            else:
                _, first, inv = np.unique(codes, return_index=True, return_inverse=True)
                uniq = freqs[first]
            merged = np.zeros(len(uniq), dtype=complex)
            np.add.at(merged, inv.ravel(), coeffs)
            freqs, coeffs = uniq, merged
            # Hermitian check and exact symmetrisation
            partner = _partner_index(freqs)
            scale = max(1.0, float(np.max(np.abs(coeffs))))
            if np.any(partner < 0):
                bad = np.abs(coeffs[partner < 0]) > HERMITIAN_TOL * scale
                if np.any(bad):
                    raise ValueError("coefficients are not Hermitian symmetric (missing -k)")
            mirror = np.where(partner >= 0, np.conj(coeffs[np.maximum(partner, 0)]), 0.0)
            if np.max(np.abs(coeffs - mirror)) > HERMITIAN_TOL * scale:
                raise ValueError("coefficients are not Hermitian symmetric")
            coeffs = 0.5 * (coeffs + mirror)
            coeffs[partner < 0] = 0.0
            keep = np.abs(coeffs) >= PRUNE_TOL
            freqs, coeffs = freqs[keep], coeffs[keep]
            zero = ~np.any(freqs, axis=1)
            coeffs[zero] = coeffs[zero].real
        freqs = np.ascontiguousarray(freqs)
        coeffs = np.ascontiguousarray(coeffs)
        freqs.setflags(write=False)
        coeffs.setflags(write=False)
        self._dim = int(dim)
        self._freqs = freqs
        self._coeffs = coeffs
        self._cache = {}

    # -- basic accessors -------------------------------------------------
    @property
    def dim(self) -> int:
        return self._dim

    @property
    def freqs(self) -> np.ndarray:
        return self._freqs

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def terms(self) -> dict[tuple, complex]:
        return {tuple(int(v) for v in k): complex(c) for k, c in zip(self._freqs, self._coeffs)}

    @property
    def mean(self) -> float:
        zero = ~np.any(self._freqs, axis=1)
        return float(self._coeffs[zero].real.sum()) if np.any(zero) else 0.0

    @property
    def degrees(self) -> tuple[int, ...]:
        """Per-coordinate maximal |k_n|."""
        if not len(self._freqs):
            return (0,) * self._dim
        return tuple(int(v) for v in np.abs(self._freqs).max(axis=0))

    def support(self) -> tuple[int, ...]:
        """Coordinates the polynomial actually depends on."""
        if not len(self._freqs):
            return ()
        return tuple(int(n) for n in np.flatnonzero(np.any(self._freqs != 0, axis=0)))

    def is_zero(self) -> bool:
        return len(self._coeffs) == 0

    def __len__(self):
        return len(self._coeffs)

    def __repr__(self):
        return f"TrigPoly(dim={self._dim}, terms={len(self)})"

    def __eq__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return (self._dim == other._dim and self._freqs.shape == other._freqs.shape
                and np.array_equal(self._freqs, other._freqs)
                and np.array_equal(self._coeffs, other._coeffs))

    def __hash__(self):
        return hash((self._dim, self._freqs.tobytes(), self._coeffs.tobytes()))

    def max_coeff_diff(self, other: "TrigPoly") -> float:
        """Largest coefficientwise |difference| (missing entries count as 0)."""
        return float(np.max(np.abs((self - other)._coeffs), initial=0.0))

    def allclose(self, other: "TrigPoly", atol: float = 1e-12) -> bool:
        return self._dim == other._dim and self.max_coeff_diff(other) <= atol

    # -- arithmetic --------------------------------------------------------
    def _check_dim(self, other):
        if other._dim != self._dim:
            raise ValueError("dimension mismatch")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = TrigPoly.constant(self._dim, other)
        if not isinstance(other, TrigPoly):
            return NotImplemented
        self._check_dim(other)
        return TrigPoly.from_arrays(self._dim, np.vstack([self._freqs, other._freqs]),
                                    np.concatenate([self._coeffs, other._coeffs]))

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly.from_arrays(self._dim, self._freqs, -self._coeffs)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return TrigPoly.from_arrays(self._dim, self._freqs, self._coeffs * float(other))
        if not isinstance(other, TrigPoly):
            return NotImplemented
        self._check_dim(other)
        if self.is_zero() or other.is_zero():
            return TrigPoly(self._dim)
        freqs = (self._freqs[:, None, :] + other._freqs[None, :, :]).reshape(-1, self._dim)
        coeffs = (self._coeffs[:, None] * other._coeffs[None, :]).ravel()
        return TrigPoly.from_arrays(self._dim, freqs, coeffs)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / float(c))

    # -- evaluation ------------------------------------------------------
    def __call__(self, x) -> np.ndarray:
        """Evaluate at points of shape (..., dim); returns shape (...)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self._dim:
            raise ValueError(f"points must have trailing dimension {self._dim}")
        flat = x.reshape(-1, self._dim)
        out = np.empty(len(flat))
        chunk = max(1, 2**22 // max(1, len(self._coeffs)))
        for i in range(0, len(flat), chunk):
            phase = TWO_PI * (flat[i:i + chunk] @ self._freqs.T)
            out[i:i + chunk] = np.cos(phase) @ self._coeffs.real - np.sin(phase) @ self._coeffs.imag
        return out.reshape(x.shape[:-1])

    def dense(self) -> tuple[np.ndarray, tuple[int, ...]]:
        """Coefficient tensor indexed by k + degree, and the degrees."""
        deg = self.degrees
        C = np.zeros(tuple(2 * d + 1 for d in deg), dtype=complex)
        if len(self._freqs):
            C[tuple((self._freqs + np.array(deg)).T)] = self._coeffs
        return C, deg

    def on_grid(self, axes) -> np.ndarray:
        """Values on the tensor grid axes[0] x ... x axes[N-1]."""
        return grid_values([self], axes)[0]

    def to_text(self) -> str:
        lines = ["# trigpoly v1", f"dim {self._dim}"]
        for k, c in zip(self._freqs, self._coeffs):
            lines.append(" ".join(str(int(v)) for v in k) + f" {float(c.real)!r} {float(c.imag)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TrigPoly":
        dim = None
        freqs, coeffs = [], []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "dim":
                dim = int(parts[1])
                continue
            if dim is None:
                raise ValueError("trigpoly file: 'dim' line must precede records")
            if len(parts) != dim + 2:
                raise ValueError(f"trigpoly file: bad record {line!r}")
            freqs.append([int(v) for v in parts[:dim]])
            coeffs.append(complex(float(parts[dim]), float(parts[dim + 1])))
        if dim is None:
            raise ValueError("trigpoly file: missing 'dim' line")
        return cls.from_arrays(dim, np.array(freqs, dtype=np.int64).reshape(-1, dim), coeffs)


def write_trigpoly(f: TrigPoly, path) -> None:
    with open(path, "w") as fh:
        fh.write(f.to_text())


def read_trigpoly(path) -> TrigPoly:
    with open(path) as fh:
        return TrigPoly.from_text(fh.read())


def _row_codes(freqs: np.ndarray):
    """Order-preserving int64 code per row, or None if it would overflow."""
    D = int(np.abs(freqs).max()) if freqs.size else 0
    base = 2 * D + 1
    if freqs.shape[1] * math.log2(base) > 62:
        return None
    weights = base ** np.arange(freqs.shape[1] - 1, -1, -1, dtype=np.int64)
    return (freqs + D) @ weights


def _partner_index(freqs: np.ndarray) -> np.ndarray:
    """Index of -k for every row k of a frequency array (-1 if absent)."""
    codes = _row_codes(freqs)
    if codes is None:
        rows = [tuple(r) for r in freqs.tolist()]
        lookup = {r: i for i, r in enumerate(rows)}
        return np.array([lookup.get(tuple(-v for v in r), -1) for r in rows], dtype=np.int64)
    neg = _row_codes(np.vstack([-freqs, freqs]))[: len(freqs)]
    order = np.argsort(codes, kind="stable")
    pos = np.clip(np.searchsorted(codes, neg, sorter=order), 0, len(codes) - 1)
    idx = order[pos]
    return np.where(codes[idx] == neg, idx, -1).astype(np.int64)


def grid_values(polys: list[TrigPoly], axes) -> np.ndarray:
    """Evaluate several polynomials of one dimension on a tensor grid.

    Uses separable contraction of the dense coefficient tensors, which is far
    cheaper than pointwise summation on large grids.  Returns an array of
    shape (len(polys), len(axes[0]), ..., len(axes[N-1])).
    """
    dim = polys[0].dim
    if len(axes) != dim:
        raise ValueError("need one axis per coordinate")
    deg = np.max([p.degrees for p in polys], axis=0)
    C = np.zeros((len(polys),) + tuple(2 * int(d) + 1 for d in deg), dtype=complex)
    for b, p in enumerate(polys):
        if p.dim != dim:
            raise ValueError("dimension mismatch")
        if len(p.freqs):
            C[(b,) + tuple((p.freqs + deg).T)] = p.coeffs
    V = C
    for n in range(dim):
        ks = np.arange(-deg[n], deg[n] + 1)
        E = np.exp(1j * TWO_PI * np.outer(np.asarray(axes[n], dtype=float), ks))
        V = np.tensordot(V, E, axes=([1], [1]))
    return np.ascontiguousarray(V.real)


# -- operators -----------------------------------------------------------

def partial_derivative(f: TrigPoly, n: int) -> TrigPoly:
    """d f / d x_n (0-based n): multiply each coefficient by 2 pi i k_n."""
    if not 0 <= n < f.dim:
        raise IndexError(f"coordinate {n} out of range for dim={f.dim}")
    return TrigPoly.from_arrays(f.dim, f.freqs, f.coeffs * (1j * TWO_PI * f.freqs[:, n]))


def gradient(f: TrigPoly) -> list[TrigPoly]:
    return [partial_derivative(f, n) for n in range(f.dim)]


def heat(f: TrigPoly, t: float) -> TrigPoly:
    """Heat semigroup exp(t Laplacian): multiplier exp(-4 pi^2 |k|^2 t)."""
    if t < 0:
        raise ValueError("heat time must be non-negative")
    if t == 0:
        return f
    k2 = np.sum(f.freqs.astype(float) ** 2, axis=1)
    return TrigPoly.from_arrays(f.dim, f.freqs, f.coeffs * np.exp(-4.0 * math.pi**2 * k2 * t))


def gaussian_smooth(f: TrigPoly, variance: float) -> TrigPoly:
    """Average of f(x + y) over y ~ N(0, variance)^N, computed exactly.

    The multiplier is exp(-2 pi^2 |k|^2 variance), so this equals
    ``heat(f, variance / 2)``.
    """
    if variance < 0:
        raise ValueError("variance must be non-negative")
    return heat(f, 0.5 * variance)


def cond_exp(f: TrigPoly, S: Iterable[int]) -> TrigPoly:
    """E_S f: integrate out every coordinate not in S."""
    S = coord_set(S, f.dim)
    out = [n for n in range(f.dim) if n not in S]
    if not out:
        return f
    keep = ~np.any(f.freqs[:, out] != 0, axis=1)
    return TrigPoly.from_arrays(f.dim, f.freqs[keep], f.coeffs[keep])


def l2_norm(f: TrigPoly) -> float:
    """Exact L2 norm by Parseval."""
    return float(math.sqrt(np.sum(np.abs(f.coeffs) ** 2)))


def centered_l2_norm(f: TrigPoly) -> float:
    """|| f - int f ||_2."""
    nz = np.any(f.freqs != 0, axis=1)
    return float(math.sqrt(np.sum(np.abs(f.coeffs[nz]) ** 2)))


def partial_l2_norms(f: TrigPoly) -> np.ndarray:
    """(|| d_n f ||_2)_n, exact."""
    w = np.abs(f.coeffs) ** 2
    return np.array([TWO_PI * math.sqrt(float(np.sum(w * f.freqs[:, n] ** 2)))
                     for n in range(f.dim)])


def grad_norm(f: TrigPoly, p: int, quad=None):
    """(sum_n int |d_n f|^p)^(1/p) for p in {1, 2}.

    p = 2 is exact (Parseval, zero half-width); p = 1 integrates each
    partial derivative with the given quadrature.  Returns an
    :class:`~linfjunta.quadrature.Estimate`.
    """
    from .quadrature import Estimate, trig_partial_l1

    if p == 2:
        return Estimate(float(np.sqrt(np.sum(partial_l2_norms(f) ** 2))), 0.0)
    if p == 1:
        vals, hws = trig_partial_l1(f, quad)
        return Estimate(float(vals.sum()), float(hws.sum()))
    raise ValueError(f"unsupported p={p}; use 1 or 2")


def lipschitz_constant(f: TrigPoly, quad=None):
    """Largest value of sum_n |d_n f(x)| over the quadrature nodes.

    This is the l_infinity-product Lipschitz constant sampled on a grid, so
    it is a lower bound on the true supremum.  Returns
    ``LipschitzEstimate(value, mesh)`` where mesh is the node spacing (or
    ``nan`` for Monte-Carlo nodes).
    """
    from .quadrature import LipschitzEstimate, QuadratureSpec, nodes

    quad = quad or QuadratureSpec.grid_for(f.dim)
    if f.is_zero() or all(d == 0 for d in f.degrees):
        return LipschitzEstimate(0.0, quad.mesh)
    grads = gradient(f)
    if quad.scheme == "grid":
        axes = [quad.axis_nodes()] * f.dim
        total = np.abs(grid_values(grads, axes)).sum(axis=0)
    else:
        X = nodes(quad, f.dim)
        total = sum(np.abs(g(X)) for g in grads)
    return LipschitzEstimate(float(np.max(total)), quad.mesh)
