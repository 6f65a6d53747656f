"""Discrete energies on grid fields.

The diffuse energy of a field u is

    sum over cells of ( |forward-difference gradient|^2
                        + w(u_anchor / sqrt(eps)) / eps ) * cell weight,

with the well sampled at the cell's anchor node.  Pairing the gradient
cell with its anchor sample makes the discrete two-term lower bound
(through the antiderivative of 2*sqrt(w)) exact cell by cell, and makes
the 3- or 5-point Laplacian stencil the exact first variation at interior
nodes.

The sharp energy of a (field, set) pair is the same Dirichlet sum plus
the interface cost constant times the perimeter of the set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import geometry, potential
from .errors import DomainError, InvalidPairError, UnsupportedRegionError
from .geometry import Domain, Region

_SIGN_TOL = 1e-12


@dataclass
class ScalarField:
    """Finite node values on a domain grid.

    The constructor stores a copy of the input, so the finiteness and
    amplitude checks done at construction time stay valid no matter what
    the caller later does with the original array.
    """

    domain: Domain
    values: np.ndarray

    def __post_init__(self):
        self.values = np.array(self.values, dtype=float)
        if self.values.shape != self.domain.node_shape:
            raise DomainError(
                f"values shape {self.values.shape} does not match "
                f"grid {self.domain.node_shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise DomainError("field values must be finite")

    def copy(self) -> "ScalarField":
        return ScalarField(self.domain, self.values.copy())


@dataclass
class PhaseState:
    """A field together with its scale eps and amplitude bound M."""

    field: ScalarField
    epsilon: float
    bound_m: float

    def __post_init__(self):
        if not (self.epsilon > 0):
            raise DomainError(f"epsilon must be positive, got {self.epsilon}")
        if not (self.bound_m > 0):
            raise DomainError(f"bound_m must be positive, got {self.bound_m}")
        sup = float(np.max(np.abs(self.field.values))) if self.field.values.size else 0.0
        if sup > self.bound_m + _SIGN_TOL:
            raise DomainError(
                f"field exceeds the amplitude bound: sup |u| = {sup} > M = {self.bound_m}"
            )

    @property
    def domain(self) -> Domain:
        return self.field.domain

    @property
    def values(self) -> np.ndarray:
        return self.field.values


@dataclass
class SharpPair:
    """A field u and a set, with u >= 0 on the set and u <= 0 off it.

    The set is given either as a Region (preferred, enables exact
    perimeters and signed distances) or as a boolean node mask.
    """

    field: ScalarField
    region: Optional[Region] = None
    mask: Optional[np.ndarray] = None
    bound_m: float = 1.0

    def __post_init__(self):
        if (self.region is None) == (self.mask is None):
            raise InvalidPairError("provide exactly one of region or mask")
        if self.mask is not None:
            self.mask = np.asarray(self.mask, dtype=bool)
            if self.mask.shape != self.field.domain.node_shape:
                raise InvalidPairError("mask shape does not match the grid")
        if not (self.bound_m > 0):
            raise DomainError(f"bound_m must be positive, got {self.bound_m}")
        sup = float(np.max(np.abs(self.field.values)))
        if sup > self.bound_m + _SIGN_TOL:
            raise DomainError(
                f"field exceeds the amplitude bound: sup |u| = {sup} > M = {self.bound_m}"
            )
        mask = self.node_mask()
        vals = self.field.values
        if np.any(vals[mask] < -_SIGN_TOL) or np.any(vals[~mask] > _SIGN_TOL):
            raise InvalidPairError(
                "field sign is inconsistent with the set: "
                "u must be >= 0 on it and <= 0 off it"
            )

    def node_mask(self) -> np.ndarray:
        if self.mask is not None:
            return self.mask
        return geometry.rasterize(self.region, self.field.domain)

    def indicator_difference(self) -> np.ndarray:
        """+1 on the set, -1 off it, per node."""
        return np.where(self.node_mask(), 1.0, -1.0)


@dataclass(frozen=True)
class EnergyBreakdown:
    dirichlet: float
    well: float
    perimeter_weighted: float
    total: float


@dataclass(frozen=True)
class MMSplit:
    """Two-term lower bound data: lhs >= rhs up to O(h) defects."""

    lhs: float
    rhs: float
    tv_term: float
    excess_dirichlet: float


@dataclass(frozen=True)
class PhaseMeasure:
    measure: float
    bound: float
    c_delta: float


def _cell_weights(domain: Domain, subdomain: Optional[Region]) -> np.ndarray:
    w = domain.cell_weights
    if subdomain is not None:
        w = w * geometry.region_cell_fraction(subdomain, domain)
    return w


def _gradient_square_density(field: ScalarField) -> np.ndarray:
    """Per-cell squared forward-difference gradient."""
    v = field.values
    h = field.domain.h
    if field.domain.dim == 1:
        return (np.diff(v) / h) ** 2
    gx = np.diff(v, axis=0)[:, :-1] / h
    gy = np.diff(v, axis=1)[:-1, :] / h
    return gx * gx + gy * gy


def _anchor_values(field: ScalarField) -> np.ndarray:
    if field.domain.dim == 1:
        return field.values[:-1]
    return field.values[:-1, :-1]


def dirichlet_energy(field: ScalarField, subdomain: Optional[Region] = None) -> float:
    """Sum of |forward-difference gradient|^2 times cell weights."""
    dens = _gradient_square_density(field)
    return float(np.sum(dens * _cell_weights(field.domain, subdomain)))


def well_energy(
    field: ScalarField, epsilon: float, subdomain: Optional[Region] = None
) -> float:
    """Sum of w(u / sqrt(eps)) / eps at anchor nodes times cell weights."""
    if not (epsilon > 0):
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    anchors = _anchor_values(field)
    dens = potential.w(anchors / math.sqrt(epsilon)) / epsilon
    return float(np.sum(dens * _cell_weights(field.domain, subdomain)))


def e_eps(state: PhaseState, subdomain: Optional[Region] = None) -> EnergyBreakdown:
    """Diffuse energy of a state, optionally restricted to a subregion."""
    d = dirichlet_energy(state.field, subdomain)
    w = well_energy(state.field, state.epsilon, subdomain)
    return EnergyBreakdown(dirichlet=d, well=w, perimeter_weighted=0.0, total=d + w)


def sharp_energy(pair: SharpPair, subdomain: Optional[Region] = None) -> EnergyBreakdown:
    """Dirichlet energy plus the weighted perimeter of the pair's set."""
    d = dirichlet_energy(pair.field, subdomain)
    domain = pair.field.domain
    if pair.region is not None:
        if subdomain is not None:
            raise UnsupportedRegionError(
                "perimeter restricted to a subdomain is only supported for mask pairs"
            )
        per = geometry.exact_perimeter(pair.region, domain)
    else:
        per = _mask_interface_length(pair.mask, domain, subdomain)
    weighted = potential.C0 * per
    return EnergyBreakdown(
        dirichlet=d, well=0.0, perimeter_weighted=weighted, total=d + weighted
    )


def _mask_interface_length(
    mask: np.ndarray, domain: Domain, subdomain: Optional[Region]
) -> float:
    if subdomain is None:
        return geometry.interface_length(mask, domain)
    # Count only interface segments in cells at least half covered by the
    # subdomain (and, on ball domains, at least half covered by the domain).
    include = geometry.region_cell_fraction(subdomain, domain) >= 0.5
    if domain.kind == "ball":
        include = include & (domain.cell_weights >= 0.5 * domain.h * domain.h)
    vals = np.where(mask, 1.0, -1.0)
    if domain.dim == 1:
        inside = vals >= 0
        return float(np.sum((inside[:-1] != inside[1:]) & include))
    lengths = geometry.per_cell_interface_lengths(vals, domain)
    return float(np.sum(lengths * include) * domain.h)


def tv_phase(state: PhaseState) -> float:
    """Discrete total variation of the compressed phase h_tilde(u / sqrt(eps)).

    Each full transition between the wells contributes 2, so the
    interface content of a state is tv_phase / 2 in multiples of the
    grid's facet area.
    """
    p = potential.h_tilde(state.values / math.sqrt(state.epsilon))
    domain = state.domain
    if domain.dim == 1:
        return float(np.sum(np.abs(np.diff(p))))
    dx = np.diff(p, axis=0)[:, :-1]
    dy = np.diff(p, axis=1)[:-1, :]
    return float(np.sum(np.hypot(dx, dy)) * domain.h)


def modica_mortola_split(state: PhaseState) -> MMSplit:
    """Two-term lower bound for the diffuse energy.

    lhs is the diffuse energy.  rhs pairs half the interface cost with
    the compressed-phase total variation, plus the Dirichlet energy of
    the overshoot sign(u) * max(|u| - sqrt(eps), 0).  On the continuum
    lhs >= rhs; discretely the gap can dip below zero only by an O(h)
    defect from the chain-rule inequality on cells.
    """
    lhs = e_eps(state).total
    root_eps = math.sqrt(state.epsilon)
    vals = state.values
    excess = np.sign(vals) * np.maximum(np.abs(vals) - root_eps, 0.0)
    excess_d = dirichlet_energy(ScalarField(state.domain, excess))
    tv = tv_phase(state)
    rhs = 0.5 * potential.C0 * tv + excess_d
    return MMSplit(lhs=lhs, rhs=rhs, tv_term=tv, excess_dirichlet=excess_d)


def intermediate_phase_measure(state: PhaseState, delta: float) -> PhaseMeasure:
    """Volume where the compressed phase is far from both wells.

    measure is the node-weight volume of {|h_tilde(u/sqrt(eps))| <= 1 - 2*delta};
    bound is C(delta) * eps * well_energy with C(delta) =
    1 / w(h_tilde_inverse(1 - delta)).  The discrete inequality
    measure <= bound holds exactly because both sides share node weights.
    """
    if not (0.0 < delta < 0.5):
        raise DomainError(f"delta must lie in (0, 1/2), got {delta}")
    root_eps = math.sqrt(state.epsilon)
    p = potential.h_tilde(state.values / root_eps)
    band = np.abs(p) <= 1.0 - 2.0 * delta
    measure = float(np.sum(state.domain.node_weights[band]))
    c_delta = 1.0 / potential.w(potential.h_tilde_inverse(1.0 - delta))
    bound = c_delta * state.epsilon * well_energy(state.field, state.epsilon)
    return PhaseMeasure(measure=measure, bound=bound, c_delta=c_delta)


def phase_band_measure(state: PhaseState) -> float:
    """Node-weight volume of the unsaturated band {|u| < sqrt(eps)}."""
    band = np.abs(state.values) < math.sqrt(state.epsilon)
    return float(np.sum(state.domain.node_weights[band]))


def l2_gap(a: np.ndarray, b: np.ndarray, domain: Domain) -> float:
    """Node-weight L2 distance between two node arrays."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return float(math.sqrt(np.sum(domain.node_weights * diff * diff)))


def l1_gap(a: np.ndarray, b: np.ndarray, domain: Domain) -> float:
    """Node-weight L1 distance between two node arrays."""
    diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    return float(np.sum(domain.node_weights * diff))
