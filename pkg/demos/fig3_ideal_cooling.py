# # Ideal cooling of a 10 K field with five atoms
#
# n_t = 3.6 thermal photons at 51.1 GHz; five atoms with phases
# pi, pi/2, pi/4, pi/8, pi/16, all detected in |g>.

import numpy as np

from cavity_cooling import (
    PhaseGrid,
    choose_truncation,
    cool_to_vacuum,
    nbar_from_temperature,
    photon_distribution,
    thermal_state,
    wigner_diagonal,
)
from cavity_cooling.oracle import simulate_sequence

omega = 2 * np.pi * 51.1e9
n_t = nbar_from_temperature(omega, 10.0)
print(f"n_t at 10 K: {n_t:.3f}")
n_t = 3.6

trunc = choose_truncation(n_t, 1e-10)
res = cool_to_vacuum(n_t, 5, trunc)
print(f"P_post = {res.p_post:.4f}")
print("vacuum fidelity after each atom:", np.round(res.fidelity_trace, 5))

# The residual is the 32-photon component, the first level no atom removes.
p = photon_distribution(res.final_state)
print("nonzero populations:", {int(n): float(p[n]) for n in np.flatnonzero(p > 1e-20)})

# ## Cross-check with the brute-force joint atom-field simulation
rho_oracle, p_oracle = simulate_sequence(thermal_state(n_t, trunc), res.sequence, "ggggg")
print(f"oracle P_post = {p_oracle:.12f}   closed form = {res.p_post:.12f}")

# ## Wigner functions before and after
grid = PhaseGrid()
w_before = wigner_diagonal(thermal_state(n_t, trunc), grid)
w_after = wigner_diagonal(res.final_state, grid)
print(f"W(0): thermal {w_before[80, 80]:.5f}, cooled {w_after[80, 80]:.5f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, w, title in zip(axes, (w_before, w_after), ("thermal", "after 5 atoms")):
        ax.imshow(w.T, origin="lower", extent=(grid.x_min, grid.x_max, grid.p_min, grid.p_max))
        ax.set_title(title)
    fig.savefig("fig3_wigner.png", dpi=120)
