"""Consensus over random graphs: one run by hand, then simulation against the closed form."""

import numpy as np

from censorsense import DetectorParams, NetworkConfig, Thresholds, local_probs
from censorsense.analytics import censoring_pd, censoring_pfa, conventional_pd, conventional_pfa
from censorsense.consensus import global_and, run_consensus
from censorsense.montecarlo import simulate

rng = np.random.default_rng(1)

# a single run: 9 users, 3 exchange steps, links up with probability 0.6
initial = np.array([1, 1, 0, -1, 1, 0, 0, -1, 1])
run = run_consensus(initial, NetworkConfig(m=9, p=0.6, k=3), rng)
print("initial:", initial)
print("votes  :", np.round(run.votes, 3))
print("final  :", run.final, "-> network decision", global_and(run.final))

# closed form against simulation as the number of steps grows
det = DetectorParams(5, 2.0)
cens = local_probs(Thresholds.censoring(7.0, 14.6), det)
conv = local_probs(Thresholds.conventional(10.3), det)

print("\n K  censoring P_d (closed / sim)   conventional P_d (closed / sim)")
for k in (1, 2, 4, 8):
    cfg = NetworkConfig(m=51, p=0.8, k=k)
    sim_c = simulate(cfg, cens, trials=5000, seed=k)
    sim_v = simulate(cfg, conv, trials=5000, seed=k)
    print(
        f"{k:2d}   {censoring_pd(cfg, cens):.4f} / {sim_c.p_d_hat:.4f}"
        f"              {conventional_pd(cfg, conv):.4f} / {sim_v.p_d_hat:.4f}"
    )

cfg = NetworkConfig(m=51, p=0.8, k=8)
print("\nfalse alarm at K=8: censoring", round(censoring_pfa(cfg, cens), 4), "conventional", round(conventional_pfa(cfg, conv), 4))
