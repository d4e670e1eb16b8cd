"""Finitely supported measures on R^d and the transforms acting on them.

A DiscreteMeasure is an immutable weighted point cloud in canonical form:
atoms sorted lexicographically by coordinates, duplicate atoms merged, zero
weights dropped.  Canonical form makes every downstream computation (entropy,
convolution, decomposition) independent of construction order, which is what
the determinism guarantees of the reporting layer rest on.

Two merge policies exist.  The default merges only atoms whose coordinates
compare equal as float64 values.  The quantized policy keys atoms by
round(x * 2^40) per coordinate, which absorbs roundoff from arithmetic that
is exact in the underlying algebra but not in floats (exact-overlap systems
are the motivating case).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .scales import ScaleVector, _as_scale

__all__ = [
    "MERGE_EXACT",
    "MERGE_QUANTIZED",
    "QUANT_BITS",
    "DiscreteMeasure",
    "ScaleBy",
    "TranslateBy",
    "ProjectTo",
    "from_atoms",
    "delta",
    "convolve",
    "pushforward",
    "bernoulli_power",
    "read_atoms_csv",
    "write_atoms_csv",
]

MERGE_EXACT = "exact"
MERGE_QUANTIZED = "quantized"
QUANT_BITS = 40

# Relative slack on conserved masses (construction, convolution).
MASS_RTOL = 1e-12


def _merge_keys(points: np.ndarray, policy: str) -> np.ndarray:
    if policy == MERGE_EXACT:
        return points
    if policy == MERGE_QUANTIZED:
        return np.round(points * float(2**QUANT_BITS))
    raise ValueError(f"unknown merge policy {policy!r}")


class DiscreteMeasure:
    """Immutable finitely supported measure in canonical form."""

    __slots__ = ("points", "weights", "mass", "merge")

    def __init__(self, points, weights, merge: str = MERGE_EXACT, _canonical: bool = False):
        points = np.asarray(points, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        if points.ndim != 2:
            raise ValueError("points must be a 2-d array of shape (n_atoms, d)")
        if weights.shape != (points.shape[0],):
            raise ValueError("weights must be 1-d with one entry per atom")
        if not np.all(np.isfinite(points)):
            raise ValueError("atom coordinates must be finite")
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        if np.any(weights < 0.0):
            raise ValueError("negative weight")
        if merge not in (MERGE_EXACT, MERGE_QUANTIZED):
            raise ValueError(f"unknown merge policy {merge!r}")

        if not _canonical:
            points, weights = _canonicalize(points, weights, merge)
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "mass", math.fsum(weights.tolist()))
        object.__setattr__(self, "merge", merge)

    def __setattr__(self, name, value):
        raise AttributeError("DiscreteMeasure is immutable")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_atoms(self) -> int:
        return self.points.shape[0]

    def atoms(self) -> Iterable[tuple[tuple[float, ...], float]]:
        for p, w in zip(self.points, self.weights):
            yield tuple(p), float(w)

    def scaled(self, c: float) -> "DiscreteMeasure":
        """Same support, weights multiplied by c >= 0."""
        if c < 0:
            raise ValueError("negative weight")
        return DiscreteMeasure(self.points, self.weights * c, self.merge)

    def restrict(self, mask: np.ndarray) -> "DiscreteMeasure":
        """Restriction to a subset of atoms (mask over canonical order)."""
        return DiscreteMeasure(self.points[mask], self.weights[mask], self.merge)

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return DiscreteMeasure(
            np.concatenate([self.points, other.points]),
            np.concatenate([self.weights, other.weights]),
            self.merge,
        )

    def __repr__(self) -> str:
        return f"DiscreteMeasure(n_atoms={self.n_atoms}, dim={self.dim}, mass={self.mass:.12g})"


def _canonicalize(points: np.ndarray, weights: np.ndarray, merge: str):
    """Sort lexicographically, merge per policy, drop zero weights."""
    keep = weights > 0.0
    points = points[keep]
    weights = weights[keep]
    points = points + 0.0  # normalizes -0.0 to +0.0 so value equality is key equality
    n, d = points.shape
    if n == 0 or d == 0:
        # Zero-dimensional points are all equal: collapse to one atom.
        if d == 0 and n > 0:
            total = math.fsum(weights.tolist())
            return np.empty((1, 0)), np.array([total])
        return points.reshape(n, d), weights

    keys = _merge_keys(points, merge)
    order = np.lexsort(keys.T[::-1])  # sort by x1, then x2, ...
    pts = points[order]
    kys = keys[order]
    wts = weights[order]
    boundary = np.any(kys[1:] != kys[:-1], axis=1)
    starts = np.concatenate(([0], np.nonzero(boundary)[0] + 1))
    merged_w = np.add.reduceat(wts, starts)
    # Representative atom: lexicographically smallest original point in the class.
    merged_p = pts[starts]
    return merged_p, merged_w


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def _as_point_array(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    return arr


def from_atoms(
    atoms: Iterable[tuple[Sequence[float] | float, float]],
    merge: str = MERGE_EXACT,
) -> DiscreteMeasure:
    """Build a measure from (point, weight) pairs.  Scalars are 1-d points."""
    pts = []
    wts = []
    for x, w in atoms:
        pts.append(_as_point_array(x))
        wts.append(float(w))
    if not pts:
        return DiscreteMeasure(np.empty((0, 1)), np.empty(0), merge)
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise ValueError("dimension mismatch among atoms")
    return DiscreteMeasure(np.array(pts).reshape(len(pts), d), np.array(wts), merge)


def delta(x, merge: str = MERGE_EXACT) -> DiscreteMeasure:
    """Unit point mass."""
    return from_atoms([(x, 1.0)], merge)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleBy:
    """Coordinatewise scaling x -> (r_1 x_1, ..., r_d x_d)."""

    factors: ScaleVector

    def __post_init__(self):
        object.__setattr__(self, "factors", _as_scale(self.factors))

    def apply(self, points: np.ndarray) -> np.ndarray:
        if points.shape[1] != len(self.factors):
            raise ValueError("dimension mismatch")
        return points * self.factors.as_array()


@dataclass(frozen=True)
class TranslateBy:
    """Translation x -> x + t."""

    offset: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "offset", tuple(float(v) for v in np.atleast_1d(self.offset)))

    def apply(self, points: np.ndarray) -> np.ndarray:
        if points.shape[1] != len(self.offset):
            raise ValueError("dimension mismatch")
        return points + np.asarray(self.offset, dtype=np.float64)


@dataclass(frozen=True)
class ProjectTo:
    """Orthogonal projection onto the listed 1-based axes, in increasing order.

    The empty projection is allowed and maps everything to the single point of
    R^0; the pushforward is then one atom carrying the whole mass.
    """

    axes: tuple[int, ...]

    def __post_init__(self):
        axes = tuple(int(a) for a in self.axes)
        if any(a < 1 for a in axes):
            raise ValueError("axes are 1-based")
        if list(axes) != sorted(set(axes)):
            raise ValueError("axes must be strictly increasing")
        object.__setattr__(self, "axes", axes)

    def apply(self, points: np.ndarray) -> np.ndarray:
        if self.axes and max(self.axes) > points.shape[1]:
            raise ValueError("projection axis out of range")
        idx = [a - 1 for a in self.axes]
        return points[:, idx]


Transform = ScaleBy | TranslateBy | ProjectTo


def pushforward(mu: DiscreteMeasure, transform: Transform) -> DiscreteMeasure:
    """Image measure under a scaling, translation, or projection."""
    return DiscreteMeasure(transform.apply(mu.points), mu.weights, mu.merge)


# ---------------------------------------------------------------------------
# Convolution
# ---------------------------------------------------------------------------


def convolve(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """Convolution: atoms at all pairwise sums, weights multiplied.

    The result inherits mu's merge policy.  Mass is multiplicative up to
    roundoff in the pairwise products.
    """
    if mu.dim != nu.dim:
        raise ValueError("dimension mismatch")
    pts = (mu.points[:, None, :] + nu.points[None, :, :]).reshape(-1, mu.dim)
    wts = (mu.weights[:, None] * nu.weights[None, :]).ravel()
    out = DiscreteMeasure(pts, wts, mu.merge)
    expected = mu.mass * nu.mass
    if expected > 0 and abs(out.mass - expected) > MASS_RTOL * max(1.0, expected):
        raise AssertionError("convolution failed to conserve mass")
    return out


def bernoulli_power(x, y, k: int, merge: str = MERGE_EXACT) -> DiscreteMeasure:
    """k-fold self-convolution of the fair two-point measure on {x, y}.

    Computed directly from the binomial law on the segment between the two
    endpoints: atoms k*x + i*(y - x) with weights C(k, i) / 2^k.  Repeated
    pairwise convolution would square the intermediate atom counts and leak
    roundoff into the atom positions, so it is never used here.  Weights are
    dyadic rationals, so each is converted from an exact integer ratio and
    carries only the final rounding error.
    """
    from fractions import Fraction

    if k < 1:
        raise ValueError("power k must be >= 1")
    xp = _as_point_array(x)
    yp = _as_point_array(y)
    if xp.shape != yp.shape:
        raise ValueError("dimension mismatch")
    if np.array_equal(xp, yp):
        raise ValueError("the two endpoints must differ")
    i = np.arange(k + 1)
    pts = k * xp[None, :] + i[:, None] * (yp - xp)[None, :]
    denom = 1 << k
    wts = np.empty(k + 1)
    c = 1
    for m in range(k + 1):
        wts[m] = float(Fraction(c, denom))
        c = c * (k - m) // (m + 1)
    return DiscreteMeasure(pts, wts, merge)


# ---------------------------------------------------------------------------
# Atom CSV interchange
# ---------------------------------------------------------------------------


def write_atoms_csv(mu: DiscreteMeasure, path) -> None:
    """Write atoms as CSV with header x1,...,xd,w in canonical order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{j + 1}" for j in range(mu.dim)] + ["w"])
        for p, w in zip(mu.points, mu.weights):
            writer.writerow([repr(float(v)) for v in p] + [repr(float(w))])


def read_atoms_csv(path, merge: str = MERGE_EXACT) -> DiscreteMeasure:
    """Read a measure from CSV with header x1,...,xd,w."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty atom file") from None
        header = [h.strip() for h in header]
        if len(header) < 2 or header[-1] != "w":
            raise ValueError("atom CSV header must be x1,...,xd,w")
        d = len(header) - 1
        if header[:-1] != [f"x{j + 1}" for j in range(d)]:
            raise ValueError("atom CSV header must be x1,...,xd,w")
        pts = []
        wts = []
        for row in reader:
            if not row:
                continue
            if len(row) != d + 1:
                raise ValueError(f"atom row has {len(row)} fields, expected {d + 1}")
            pts.append([float(v) for v in row[:-1]])
            wts.append(float(row[-1]))
    if not pts:
        return DiscreteMeasure(np.empty((0, d)), np.empty(0), merge)
    return DiscreteMeasure(np.array(pts), np.array(wts), merge)
