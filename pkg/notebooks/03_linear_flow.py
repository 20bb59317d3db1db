# %% [markdown]
# # Linear flow and decay classes
#
# The first nonvanishing moment of the data fixes how fast the solution decays.

# %%
import math
import warnings

import numpy as np

from dispersionlab import KernelDomainExceeded, gaussian, gaussian_derivative, moment_killed, solve_kernel
from dispersionlab.evolution import (classify_decay, evolve_convolution, evolve_expansion,
                                     measure_decay_exponent)

warnings.simplefilter("ignore", KernelDomainExceeded)
F = solve_kernel(1)

for u0 in (gaussian(0.25), gaussian_derivative(0.25), moment_killed(0.25, 3)):
    dc = classify_decay(u0)
    print(f"{u0.name:16s} l*={dc.l_star} predicted {float(dc.rate):+.4f} "
          f"measured {measure_decay_exponent(u0, F):+.4f}")

# %%
u0 = gaussian(0.5)
tau = 1.0
y = np.linspace(-4, 4, 9)
state = evolve_expansion(u0, tau, 12, F, y_grid=y)
s = math.exp(tau / 3)
print(np.c_[y, state.w, s * evolve_convolution(u0, math.exp(tau), y * s, F)])
