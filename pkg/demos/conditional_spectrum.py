"""
Conditional entropy spectra via Legendre duality
================================================

H(alpha) = max{ h(mu) : int g dmu = alpha }, computed by tilting the
potential and root-solving on the pressure derivative.
"""
import numpy as np

from symflow.sft import Sft, LocallyConstantFunction
from symflow.spectrum import (
    birkhoff_range,
    conditional_entropy_spectrum,
    conditional_entropy_spectrum_2d,
    rotation_set_2d,
)

full2 = Sft(np.ones((2, 2), dtype=int))
g = LocallyConstantFunction.indicator(full2, (1,))

rng_g = birkhoff_range(full2, g)
print(f"attainable means of 1_[1]: [{rng_g.lo}, {rng_g.hi}]")
print()
print("alpha    H(alpha)         binary entropy   beta")
for alpha in np.linspace(0.1, 0.9, 9):
    res = conditional_entropy_spectrum(full2, g, float(alpha))
    hb = -alpha * np.log(alpha) - (1 - alpha) * np.log(1 - alpha)
    print(f"{alpha:.1f}    {res.entropy:.12f}   {hb:.12f}   {res.beta:+.4f}")

# the witness measure realizes the constrained maximum
res = conditional_entropy_spectrum(full2, g, 0.3)
w = res.witness
print()
print("witness at alpha=0.3: mean =", w.integrate(g), " entropy =", w.entropy())

# --- two observables -------------------------------------------------------
# The pair (1_[1], 1_[11]) has a two-dimensional rotation set; the joint
# spectrum is computed the same way with a vector Legendre transform.
h = LocallyConstantFunction.indicator(full2, (1, 1))
rset = rotation_set_2d(full2, g, h, directions=64)
print()
print("rotation set of (1_[1], 1_[11]): rank", rset.rank,
      "with", len(rset.hull), "hull vertices")

res2 = conditional_entropy_spectrum_2d(full2, g, h, (0.5, 0.25))
print("H(0.5, 0.25) =", res2.entropy, " (Bernoulli(1/2) sits exactly there)")
