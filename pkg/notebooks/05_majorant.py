# %% [markdown]
# # Positive majorant
#
# The kernel changes sign, so the flow is not order preserving.  A positive
# unit-mass kernel that dominates |F| up to a constant restores a comparison
# principle.

# %%
import warnings

import numpy as np

from dispersionlab import InitialData, KernelDomainExceeded, gaussian, solve_kernel
from dispersionlab.evolution import evolve_convolution
from dispersionlab.majorant import compare, majorant_constant, majorant_evolution, majorant_kernel

warnings.simplefilter("ignore", KernelDomainExceeded)
F = solve_kernel(1)
maj = majorant_kernel(1, F)
D = majorant_constant(F, maj)
print(f"omega1 = {maj.omega1:.4f}, grid mass = {maj.mass:.12f}, D = {D.D:.3f} at y = {D.argmax:.2f}")

# %%
u0 = gaussian(0.5)
ubar0 = InitialData(lambda z: D.D * np.abs(u0(z)))
x = np.linspace(-10, 10, 201)
for t in (0.5, 2.0, 8.0):
    u = evolve_convolution(u0, t, x, F)
    ubar = majorant_evolution(maj, ubar0, t, x, u0=u0, D=D.D)
    print(t, compare(u, ubar), float(np.min(ubar - np.abs(u))))
