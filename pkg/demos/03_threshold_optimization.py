"""Grid search for the best thresholds and the resulting savings, per network scenario."""

from censorsense import DetectorParams, NetworkConfig
from censorsense.cli import SCENARIOS
from censorsense.optimizer import GridSpec, optimized_comparison

# coarser than the default 0.1 step so the script finishes quickly
grid = GridSpec(lo=0.0, hi=40.0, step=0.2)

for name, (p, gbar_db) in SCENARIOS.items():
    det = DetectorParams(5, gbar_db)
    print(f"{name}: link probability {p}, average SNR {gbar_db} dB")
    for k in (1, 5, 10):
        conv, cens, conv_m, cens_m, gains = optimized_comparison(NetworkConfig(51, p, k), det, grid)
        print(
            f"  K={k:2d}  eta={conv.thresholds.eta:5.1f}  P_e={conv.p_e:.4f}"
            f"  |  band=({cens.thresholds.eta0:.1f}, {cens.thresholds.eta1:.1f})  P_e={cens.p_e:.4f}"
            f"  |  saves {gains.error:5.1f}% error, {gains.energy:5.1f}% energy, {gains.overhead:5.1f}% traffic"
        )
