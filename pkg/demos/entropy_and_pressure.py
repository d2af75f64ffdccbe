"""
Entropy and pressure on small subshifts
=======================================

"""
import numpy as np

from symflow.sft import Sft, LocallyConstantFunction, topological_entropy
from symflow.thermo import pressure

full2 = Sft(np.ones((2, 2), dtype=int))
golden = Sft(np.array([[1, 1], [1, 0]]))   # no two 1s in a row

print("h_top(full 2-shift)  =", topological_entropy(full2), "= log 2")
print("h_top(golden mean)   =", topological_entropy(golden), "= log phi")
print("---")

# Pressure of beta * 1_[1] on the full shift, against the closed form
# log(1 + e^beta).  The equilibrium is the Bernoulli measure that puts
# weight e^beta / (1 + e^beta) on symbol 1.
g = LocallyConstantFunction.indicator(full2, (1,))
print("beta     P(beta*g)        closed form      eq. mean of g")
for beta in (-2.0, -1.0, 0.0, 1.0, 2.0):
    res = pressure(full2, g * beta)
    closed = np.log(1.0 + np.exp(beta))
    print(f"{beta:+.1f}   {res.value:.12f}   {closed:.12f}   {res.equilibrium.integrate(g):.6f}")

print("---")

# The variational principle P(g) = sup h + int g is an inequality for every
# measure; res.gap reports the slack, which vanishes only at the equilibrium.
from symflow.measures import InvariantMeasure, random_markov_component

gg = LocallyConstantFunction(golden, 1, {(0,): 0.4, (1,): -0.9})
res = pressure(golden, gg)
rng = np.random.default_rng(0)
print("variational gaps at random Markov measures (all >= 0):")
for _ in range(5):
    mu = InvariantMeasure.single(random_markov_component(golden, 2, rng))
    print(f"  gap = {res.gap(mu, gg):.6f}")
print(f"gap at the equilibrium itself = {res.gap(res.equilibrium, gg):.3e}")
