"""The threshold dichotomy along the product Moser sequence.

Below the sharp exponent the functional stays bounded as the sequence
concentrates.  Above it the log of the functional grows linearly in log k,
with slope close to epsilon (n - lambda).
"""

from mtproduct import blowup_sweep, make_grid

grid = make_grid(1.0, 512, 1.05)
ks = [16, 32, 64, 128, 256]
for lam in (0.0, 1.0):
    for eps in (0.0, 0.25):
        res = blowup_sweep(eps, lam, 2, ks, grid)
        vals = ", ".join(f"{r.value:.3g}" for r in res.rows)
        print(f"lambda={lam:g} theta={res.theta:.4f}: slope {res.slope:+.3f} "
              f"(expected >= {res.expected_lower_bound:.3f})  values [{vals}]")
