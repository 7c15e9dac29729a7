"""
Two Luttinger liquids glued together: the XXZ interface.

The left half has K1 = 0.6, the right half K2.  Transmission across the
junction is t = 2 sqrt(K1 K2) / (K1 + K2), and the half-chain entropy grows
with c_eff(t) / 6 ln L.  Small chains only, so expect a few percent of drift.
"""
from critchain import cftkit, fitkit
from critchain.models import anisotropy_from_luttinger, build_xxz
from critchain.mps import DmrgConfig, dmrg_profile

K1 = 0.6
sizes = [24, 32, 48, 64]
cfg = DmrgConfig(chi=48, threshold=1e-9)

print(" K2     t      c_eff fit   prediction")
for K2 in (0.6, 0.45, 0.3):
    pts = []
    for L in sizes:
        spec = build_xxz(L, anisotropy_from_luttinger(K1), anisotropy_from_luttinger(K2))
        pts.append((L, dmrg_profile(spec, cfg).mid()))
    t = cftkit.transmission_boson_interface(K1, K2)[1]
    print(f"{K2:4.2f}  {t:6.4f}   {fitkit.fit_interface_scaling(pts).c:8.4f}    {cftkit.ceff_boson(t):8.4f}")
