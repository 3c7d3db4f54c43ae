"""A tour of the sharp constants.

For each product split R^n = R^m x R^(n-m) with n >= 2m we print the classical
Moser-Trudinger exponent alpha_n, the product exponent zeta_{n,m}, the
critical Lebesgue exponent 2_{n,m}, and the Hardy-Littlewood-Sobolev constant
at mu = n/2.  When m = 1 the product exponent collapses to alpha_n.
"""

from mtproduct import sharp_constants

print(f"{'n':>3} {'m':>3} {'alpha_n':>14} {'zeta_nm':>14} {'2_nm':>10} {'C(n, n/2)':>12}")
for n in range(2, 7):
    for m in range(1, n // 2 + 1):
        c = sharp_constants(n, m, mu=n / 2)
        print(f"{n:>3} {m:>3} {c.alpha_n:>14.6f} {c.zeta_nm:>14.6f} {c.two_nm:>10.4f} {c.hls_c:>12.6f}")

print("\nThe singular threshold shrinks linearly in lambda (n = 2, m = 1):")
for lam in (0.0, 0.5, 1.0, 1.5):
    c = sharp_constants(2, 1, lam)
    print(f"  lambda = {lam:3.1f}: kappa = {c.kappa:.6f}")
