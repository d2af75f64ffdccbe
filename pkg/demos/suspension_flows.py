"""
Suspension flows over a subshift
================================

A positive roof function turns the shift into a flow; entropies rescale by
the mean roof (Abramov), and the flow's top entropy is the root s of
P(-s * roof) = 0.
"""
import numpy as np

from symflow.measures import InvariantMeasure, random_markov_component
from symflow.sft import Sft, LocallyConstantFunction, topological_entropy
from symflow.spectrum import flow_conditional_spectrum
from symflow.suspension import (
    SuspensionSystem,
    abramov_entropy,
    flow_integral,
    flow_top_entropy,
)

full2 = Sft(np.ones((2, 2), dtype=int))
roof = LocallyConstantFunction(full2, 1, {(0,): 1.0, (1,): 2.0})
system = SuspensionSystem(full2, roof)

s = flow_top_entropy(system)
print("flow top entropy for roof (1, 2):", s)
print("  check e^-s + e^-2s =", np.exp(-s) + np.exp(-2 * s), "(should be 1, so s = log phi)")
print()

# Abramov: flow entropy of a lifted measure = base entropy / mean roof.
rng = np.random.default_rng(1)
print("base entropy   mean roof   flow entropy")
for _ in range(4):
    mu = InvariantMeasure.single(random_markov_component(full2, 1, rng))
    print(f"{mu.entropy():.8f}   {mu.integrate(roof):.6f}   {abramov_entropy(system, mu):.8f}")
print()

# Constant roof 2 simply halves everything.
sys2 = SuspensionSystem(full2, LocallyConstantFunction.constant(full2, 2.0))
print("constant roof 2:", flow_top_entropy(sys2), "= log(2)/2 =", np.log(2) / 2)
print()

# Conditional spectrum for the flow: constrain the time average of phi,
# which for a lifted measure is int phi / int roof.
phi = LocallyConstantFunction.indicator(full2, (1,))
print("alpha   s(alpha)        witness ratio")
for alpha in (0.10, 0.15, 0.20, 0.25, 0.30):
    res = flow_conditional_spectrum(system, phi, alpha)
    wit = InvariantMeasure.single(res.witness)
    print(f"{alpha:.2f}   {res.s:.10f}   {flow_integral(system, wit, phi):.10f}")
