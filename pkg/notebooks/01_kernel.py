# %% [markdown]
# # The rescaled kernel
#
# For k = 1 the kernel is a rescaled Airy function, which gives a free check
# on the shooting solver.  For k >= 2 we compare against contour quadrature
# of the Fourier integral instead.

# %%
import numpy as np
from scipy.special import airy

from dispersionlab import dispersion_constants, kernel_via_fourier, solve_kernel

F1 = solve_kernel(1)
y = np.linspace(-8, 15, 47)
s = 3 ** (-1 / 3)
print("k=1 max deviation from Airy:", np.max(np.abs(F1(y) - s * airy(-s * y)[0])))

# %%
for k in (2, 3):
    F = solve_kernel(k)
    yy = np.linspace(-10, 20, 31)
    dev = np.max(np.abs(F(yy) - kernel_via_fourier(k, yy).values))
    print(f"k={k}: F(0) = {F(0.0):.6f}, Fourier deviation {dev:.1e}")

# %% [markdown]
# The right tail decays like y^(-(2k-1)/(4k)) while oscillating at rate d_k y^alpha.

# %%
for k in (1, 2, 3):
    prm = dispersion_constants(k)
    F = solve_kernel(k)
    tail = F.grid > 30
    ratio = np.max(np.abs(F.values[tail]) * F.grid[tail] ** prm.envelope_exp)
    print(f"k={k}: alpha={prm.alpha:.4f} d_k={prm.d_k:.5f} scaled tail amplitude {ratio:.4f}")
