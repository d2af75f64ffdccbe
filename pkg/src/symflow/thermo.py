"""Topological pressure and equilibrium states for locally constant potentials.

Pressure is computed spectrally: recode so the potential lives on edges,
weight the transition matrix by e^g, and take the log of the Perron root.
The same Perron data yields the equilibrium chain in closed form, so the
variational identity P = h + integral is available as an exact check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .measures import InvariantMeasure, MarkovComponent, stationary
from .sft import LocallyConstantFunction, Sft, block_recode, is_irreducible, perron_root

__all__ = ["PressureResult", "pressure", "verify_equilibrium"]


@dataclass
class PressureResult:
    """Pressure value with its equilibrium chain and Perron data.

    ``left``/``right`` are the Perron vectors of the weighted matrix on the
    recoded graph whose words are listed in ``states`` (the equilibrium
    component's state list); ``root`` is the Perron root lambda with
    P = log(lambda).
    """

    value: float
    equilibrium: MarkovComponent
    root: float
    left: np.ndarray
    right: np.ndarray

    def gap(self, mu: InvariantMeasure, g: LocallyConstantFunction) -> float:
        return self.value - (mu.entropy() + mu.integrate(g))


def _edge_weights(sft: Sft, g: LocallyConstantFunction):
    """Recode so g becomes an edge potential; return (recoding, W, offset).

    W holds e^(g - offset) on recoded edges, with offset = max g so the
    exponentials never overflow; log lambda(B) = offset + log lambda(W).
    """
    r = max(1, g.memory - 1)
    rec = block_recode(sft, r)
    offset = g.bounds()[1]
    N = len(rec.words)
    W = np.zeros((N, N))
    A = rec.sft.A
    for i in range(N):
        for j in np.flatnonzero(A[i]):
            W[i, j] = np.exp(g(rec.edge_word(i, int(j))) - offset)
    return rec, W, offset


def pressure(sft: Sft, g: LocallyConstantFunction, tol: float = 1e-12, rng=None) -> PressureResult:
    """Topological pressure P(g) = log Perron root of the g-weighted matrix.

    The equilibrium chain is Q(w,w') = B_{w,w'} r(w') / (lambda r(w)) with
    stationary distribution proportional to l*r; it is ergodic and attains
    the variational identity h + integral g = P.
    """
    if not is_irreducible(sft):
        raise DomainError("pressure needs an irreducible SFT", name="reducible")
    rec, W, offset = _edge_weights(sft, g)
    lam, right, left = perron_root(W, tol=tol, rng=rng)
    value = offset + float(np.log(lam))
    Q = W * right[None, :] / (lam * right[:, None])
    Q[W == 0] = 0.0
    Q /= Q.sum(axis=1, keepdims=True)  # absorb the O(tol) Perron residue
    pi = stationary(Q)
    comp = MarkovComponent(sft, rec.m, rec.words, Q, pi)
    return PressureResult(value=value, equilibrium=comp, root=float(np.exp(value)), left=left, right=right)


def verify_equilibrium(sft: Sft, g: LocallyConstantFunction, mu: InvariantMeasure, tol: float = 1e-12) -> float:
    """Variational gap P(g) - (h_mu + integral g dmu); >= 0 up to roundoff."""
    return pressure(sft, g, tol=tol).gap(mu, g)
