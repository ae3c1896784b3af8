"""Local energy-detector decisions with and without a censoring band."""

import numpy as np

from censorsense import DetectorParams, Thresholds, local_probs
from censorsense.montecarlo import draw_trits
from censorsense.sensing import local_decide, sample_statistics

det = DetectorParams(time_bandwidth=5, avg_snr_db=2.0)

# one threshold: every user reports +1 or -1
conv = local_probs(Thresholds.conventional(10.3), det)
print("conventional  H1 (+1, 0, -1):", np.round(conv.row("H1"), 4))
print("conventional  H0 (+1, 0, -1):", np.round(conv.row("H0"), 4))

# two thresholds: users between them stay silent
thr = Thresholds.censoring(7.0, 14.6)
cens = local_probs(thr, det)
print("censoring     H1 (+1, 0, -1):", np.round(cens.row("H1"), 4))
print("censoring     H0 (+1, 0, -1):", np.round(cens.row("H0"), 4))

# fraction of silent users, averaged over equally likely hypotheses
print("silent fraction:", round(0.5 * (cens.p0_h0 + cens.p0_h1), 4))

# draw detector outputs and threshold them; frequencies should match the rows above
rng = np.random.default_rng(0)
x = sample_statistics("H1", det, rng, 200_000)
trits = local_decide(x, thr)
print("simulated H1 frequencies:", [round(float(np.mean(trits == v)), 4) for v in (1, 0, -1)])

# decision-level sampling skips the detector and draws trits from a row directly
trits = draw_trits(cens.row("H0"), 200_000, rng)
print("decision-level H0 frequencies:", [round(float(np.mean(trits == v)), 4) for v in (1, 0, -1)])

# sweep the upper threshold with the lower one fixed
for eta1 in (7.0, 10.0, 14.6, 20.0):
    pr = local_probs(Thresholds.censoring(7.0, eta1), det)
    print(f"eta1={eta1:5.1f}  P(+1|H1)={pr.p1_h1:.4f}  P(+1|H0)={pr.p1_h0:.4f}  silent|H0={pr.p0_h0:.4f}")
