"""Unitary group representations on C^d and the windowed transform V_g f.

The inner product convention is fixed once for the whole package:

    inner(f, g) = sum_i f_i * conj(g_i)

(linear in the first slot).  The windowed transform of f against a window g
is V_g f(x) = inner(f, pi(x) g), sampled on the entire carrier.

The time-frequency representation is projective: pi(x) pi(y) = c(x, y) pi(xy)
with |c(x, y)| = 1.  Everything consumed downstream (spans, moduli of
coefficients) is unaffected by the cocycle.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from framecert.amalgam import GroupFunction
from framecert.groups import Element, GroupModel


class DimensionMismatch(Exception):
    """Vector dimension does not match the representation space."""


class ZeroWindow(Exception):
    """The analyzing window must be nonzero."""


class ZeroResult(Exception):
    """A mollifying kernel annihilated the window."""


def inner(f, g) -> complex:
    """inner(f, g) = sum f_i conj(g_i); conjugate-linear in the second slot."""
    return complex(np.vdot(np.asarray(g), np.asarray(f)))


class Representation:
    """Matrix-free unitary action of a finite group on C^dim."""

    kind: str
    group: GroupModel
    dim: int

    def apply(self, x, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class TranslationRep(Representation):
    """Cyclic shift action of Z_n on C^n: (pi(k) v)(t) = v(t - k)."""

    def __init__(self, n: int):
        self.kind = "translation"
        self.group = GroupModel.cyclic([n])
        self.dim = int(n)

    def apply(self, x, v: np.ndarray) -> np.ndarray:
        return np.roll(v, self.group.canon(x))


class GaborRep(Representation):
    """Time-frequency shifts of Z_n x Z_n on C^n: pi(k, l) = M_l T_k.

    (T_k v)(t) = v(t - k) and (M_l v)(t) = exp(2 pi i l t / n) v(t).
    """

    def __init__(self, n: int):
        self.kind = "gabor"
        self.n = int(n)
        self.group = GroupModel.cyclic([n, n])
        self.dim = int(n)
        self._t = np.arange(self.n)

    def apply(self, x, v: np.ndarray) -> np.ndarray:
        k, l = self.group.canon(x)
        return np.exp(2j * np.pi * l * self._t / self.n) * np.roll(v, k)


class TensorRep(Representation):
    """Tensor product of two cyclic-group representations."""

    def __init__(self, left: Representation, right: Representation):
        if left.group.kind != "cyclic" or right.group.kind != "cyclic":
            raise ValueError("tensor factors must act over cyclic-product groups")
        self.kind = "tensor"
        self.left = left
        self.right = right
        assert left.group.moduli is not None and right.group.moduli is not None
        self.group = GroupModel.cyclic(left.group.moduli + right.group.moduli)
        self.dim = left.dim * right.dim

    def _split(self, x) -> tuple[Element, Element]:
        coords = self.group._coords(self.group.canon(x))
        r = self.left.group.rank
        return self.left.group._from_coords(coords[:r]), self.right.group._from_coords(coords[r:])

    def apply(self, x, v: np.ndarray) -> np.ndarray:
        x1, x2 = self._split(x)
        block = np.asarray(v).reshape(self.left.dim, self.right.dim)
        block = np.stack(
            [self.left.apply(x1, block[:, j]) for j in range(self.right.dim)], axis=1
        )
        block = np.stack(
            [self.right.apply(x2, block[i, :]) for i in range(self.left.dim)], axis=0
        )
        return block.reshape(-1)


def apply_rep(rep: Representation, x, v) -> np.ndarray:
    """pi(x) v with dimension validation; norm is preserved to rounding."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (rep.dim,):
        raise DimensionMismatch(f"expected a vector of dimension {rep.dim}, got shape {v.shape}")
    return rep.apply(x, v)


@dataclass
class VoiceTransform(GroupFunction):
    """Samples of x -> inner(f, pi(x) g) on the whole carrier."""

    source: np.ndarray
    window: np.ndarray


def voice_transform(rep: Representation, g, f) -> VoiceTransform:
    """V_g f(x) = inner(f, pi(x) g) for every carrier element x."""
    g = np.asarray(g, dtype=complex)
    f = np.asarray(f, dtype=complex)
    if g.shape != (rep.dim,) or f.shape != (rep.dim,):
        raise DimensionMismatch(
            f"window/source must have dimension {rep.dim}, got {g.shape} and {f.shape}"
        )
    if np.linalg.norm(g) == 0.0:
        raise ZeroWindow("the analyzing window must be nonzero")
    values = np.array([inner(f, rep.apply(x, g)) for x in rep.group.carrier])
    return VoiceTransform(group=rep.group, values=values, source=f.copy(), window=g.copy())


def mollify_window(rep: Representation, g0, kernel: Mapping) -> np.ndarray:
    """Averaged window sum_x kernel(x) w(x) pi(x) g0 for a finitely supported kernel.

    Raises ZeroResult when the output norm falls below 1e-12 (a destructive
    kernel), since the result could not serve as a window.
    """
    g0 = np.asarray(g0, dtype=complex)
    if g0.shape != (rep.dim,):
        raise DimensionMismatch(f"expected a vector of dimension {rep.dim}, got {g0.shape}")
    out = np.zeros(rep.dim, dtype=complex)
    for x, weight in kernel.items():
        xc = rep.group.canon(x)
        out += complex(weight) * rep.group.haar_weight(xc) * rep.apply(xc, g0)
    if np.linalg.norm(out) < 1e-12:
        raise ZeroResult("mollifying kernel produced a numerically zero window")
    return out


_DIRAC_RE = re.compile(r"dirac(\d+)$")


def dirac_vector(dim: int, index: int = 0) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index % dim] = 1.0
    return v


def flat_vector(dim: int) -> np.ndarray:
    return np.ones(dim, dtype=complex) / np.sqrt(dim)


def periodized_gaussian(dim: int) -> np.ndarray:
    """Unit-norm sampled Gaussian wrapped around Z_dim."""
    t = np.arange(dim, dtype=float)
    acc = np.zeros(dim)
    for m in range(-8, 9):
        acc += np.exp(-np.pi * (t + m * dim) ** 2 / dim)
    return (acc / np.linalg.norm(acc)).astype(complex)


def vector_preset(name: str, dim: int) -> np.ndarray:
    """Named vectors: "dirac<k>", "flat", or "gauss"."""
    match = _DIRAC_RE.match(name)
    if match:
        return dirac_vector(dim, int(match.group(1)))
    if name == "flat":
        return flat_vector(dim)
    if name == "gauss":
        return periodized_gaussian(dim)
    raise ValueError(f"unknown vector preset {name!r}")
