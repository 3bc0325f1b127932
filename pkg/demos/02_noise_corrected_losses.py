"""
Unbiased loss correction under class-conditional label noise
============================================================

When pseudo labels flip with known rates (rho_neg, rho_pos), a corrected
loss keeps the expected value equal to the clean loss.  The correction can
go negative; that is the price of unbiasedness.
"""

import numpy as np

import pseudobound as pb

model = pb.NoiseModel(rho_neg=0.1, rho_pos=0.2)
print(f"noise model: rho_neg={model.rho_neg}, rho_pos={model.rho_pos}, "
      f"denominator={model.denominator:.2f}")

for y_pred in (1, -1):
    for y_pseudo in (1, -1):
        val = pb.corrected_loss(y_pred, y_pseudo, 1.0, model)
        raw = pb.zero_m_loss(y_pred, y_pseudo, 1.0)
        print(f"  predict {y_pred:+d}, pseudo {y_pseudo:+d}: "
          f"raw {raw:.3f} -> corrected {val:+.4f}")

# Monte Carlo check of unbiasedness: corrupt a clean label many times and
# average the corrected loss on the corrupted copies.
rng = np.random.default_rng(0)
y_true, y_pred = 1, -1
trials = 200_000
flips = rng.random(trials) < (model.rho_pos if y_true == 1 else model.rho_neg)
observed = np.where(flips, -y_true, y_true)
vals = np.array([pb.corrected_loss(y_pred, int(o), 1.0, model) for o in (-1, 1)])
mean = vals[((observed + 1) // 2)].mean()
clean = pb.zero_m_loss(y_pred, y_true, 1.0)
print(f"mean corrected loss over {trials} corruptions: {mean:.4f} "
      f"(clean value {clean:.1f})")

# With zero noise the correction is the identity.
zero = pb.NoiseModel(0.0, 0.0)
same = all(pb.corrected_loss(p, q, 1.0, zero) == pb.zero_m_loss(p, q, 1.0)
           for p in (-1, 1) for q in (-1, 1))
print("zero-noise model reduces to the plain loss:", same)
