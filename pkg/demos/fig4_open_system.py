# # Cooling with cavity and atomic losses (about 15-60 s)
#
# Same five-atom sequence, now integrated with the master equation: cavity
# damping time 130 ms, atomic lifetime 30 ms, bath at 10 K (n_t = 3.6) and an
# 82 us atom-free gap after every atom during which the field rethermalizes.

from cavity_cooling import (
    PhysicalParams,
    choose_truncation,
    dyadic_sequence,
    run_open_protocol,
    temperature_from_nbar,
    thermal_state,
)

params = PhysicalParams()
seq = dyadic_sequence(5)
print("interaction times (us):", [round(t * 1e6, 2) for t in params.interaction_times(seq)])

res = run_open_protocol(params, seq, thermal_state(3.6, choose_truncation(3.6, 1e-8)), trajectory_every=100)
print(f"vacuum fidelity      {res.vacuum_fidelity:.4f}")
print(f"success probability  {res.p_total:.4f}  per atom {[round(p, 4) for p in res.p_stage]}")
print(f"closest thermal state n_t = {res.best_thermal_nbar:.4f} (fidelity {res.fidelity_to_best_thermal:.4f}),"
      f" T = {temperature_from_nbar(params.omega, res.best_thermal_nbar):.2f} K")

# ## Mean photon number along the run
for t, n in res.trajectory[::40]:
    print(f"t = {t * 1e6:7.1f} us   <n> = {n:.4f}")
