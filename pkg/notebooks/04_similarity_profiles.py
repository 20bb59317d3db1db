# %% [markdown]
# # Very singular similarity profiles
#
# Below p_l = 1 + (2k+1)/(l+1) a nontrivial profile branches off the l-th
# eigenfunction.  Its amplitude grows as p decreases.

# %%
from dispersionlab import vss

print("critical exponents k=1:", [str(p) for p in vss.critical_exponents(1, 4)])
for p in ("5", "4", "3"):
    print(p, vss.linearized_spectrum(p, 1).verdict.value)

# %%
for p in (3.3, 2.5, 1.9):
    prof = vss.solve_vss(1, p)
    print(f"p={p}: sup|f| = {prof.sup_norm:.5f}, tail metric {prof.tail_metric:.1e}")

# %%
for k, p in ((2, 5.5), (3, 7.8)):
    prof = vss.solve_vss(k, p)
    print(f"k={k} p={p}: sup|f| = {prof.sup_norm:.5f}, residual {vss.vss_residual(prof):.1e}")

# %%
br = vss.trace_branch(0, 1, (3.0, 3.9), 0.1)
for p, s in br.points:
    print(f"{p:.2f} {s:.5f}")
print("gamma_0 =", vss.gamma_l(0, 1))
