# # Vacuum fidelity versus number of atoms
#
# A hot field (100 thermal photons on average) is cooled with the dyadic
# sequence phi_k = pi / 2**(k-1).  After N atoms only Fock levels that are
# multiples of 2**N survive, so the vacuum fidelity climbs quickly while the
# success probability settles at the initial vacuum population 1/(1+n_t).

import numpy as np

from cavity_cooling import asymptotic_success, choose_truncation, fidelity_sweep, survivors, dyadic_sequence

n_t = 100.0
trunc = choose_truncation(n_t, 1e-8)
print(f"truncation: {trunc.dim} Fock levels")

rows = fidelity_sweep(n_t, 14, trunc)
for n, f, p in rows:
    print(f"N = {n:2d}   F = {f:.6f}   P_post = {p:.6f}")

print("limit 1/(1+n_t) =", asymptotic_success(n_t))

# ## Which photon numbers survive?
print("survivors after 4 atoms (first few):", survivors(dyadic_sequence(4), trunc)[:6])

# Optional plot
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    N, F, P = np.array(rows).T
    fig, ax = plt.subplots()
    ax.plot(N, F, "o-")
    ax.set_xlabel("number of atoms N")
    ax.set_ylabel("vacuum fidelity")
    fig.savefig("fig2_fidelity_sweep.png", dpi=120)
