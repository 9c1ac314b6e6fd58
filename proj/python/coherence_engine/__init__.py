# Copyright 2026 The coherence-engine Authors
# SPDX-License-Identifier: Apache-2.0
"""Coherence-powered work extraction from a V-type three-level atom.

Density matrices are 3x3 complex numpy arrays in basis order (|2>, |1>, |0>).
"""

from ._core import (  # noqa: F401
    Bath,
    NumericalError,
    __version__,
    analytic_evolution_aligned,
    coherence_state,
    discretized_quasistatic,
    evolve,
    evolve_neardegenerate,
    fed,
    general_state,
    gibbs,
    ground_state,
    l1_coherence,
    lambert_w,
    min_eigenvalue,
    optimal_shift_round1,
    perturbative_solution,
    protocol2,
    quasistatic_work,
    run_protocol1,
    steady_state,
    to_bloch,
    trace_distance,
    von_neumann_entropy,
)
