# # Closed forms versus brute-force simulation
#
# Random small instances: for every ordered detection record the conditional
# state and probability from the closed form agree with explicit joint
# atom-field evolution, including for states with Fock coherences.

from cavity_cooling.verification import run_equivalence

report = run_equivalence(seed=0, n_cases=200)
for key, value in sorted(report.items()):
    if key.startswith("max_"):
        print(f"{key:40s} {value:.2e}")
print("passed:", report["passed"])
