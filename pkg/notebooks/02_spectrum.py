# %% [markdown]
# # Eigenfunctions and adjoint polynomials
#
# Derivatives of the kernel are eigenfunctions of the rescaled operator, and
# the adjoint eigenfunctions are polynomials with rational coefficients.

# %%
from dispersionlab.spectral import (adjoint_polynomial, apply_B_star, biorthonormality_matrix,
                                    eigenvalue)

for l in range(7):
    p = adjoint_polynomial(l, 1)
    print(l, eigenvalue(l, 1), [str(c) for c in p.coeffs])

# %%
p = adjoint_polynomial(9, 2)
print("B* psi*_9 - lambda psi*_9 =",
      [a - eigenvalue(9, 2) * c for a, c in zip(apply_B_star(p).coeffs, p.coeffs)])

# %% [markdown]
# The two families are dual under the reflected pairing.

# %%
M = biorthonormality_matrix(6, 1)
print(M)
