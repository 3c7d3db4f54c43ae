"""Closed-form constants for Moser-Trudinger type inequalities.

Everything here is a pure function of small integer/real parameters and is
evaluated in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DimensionParams",
    "SharpConstants",
    "gamma",
    "sphere_area",
    "alpha_n",
    "zeta_nm",
    "two_nm",
    "kappa_singular",
    "hls_constant",
    "lemma_basic_max",
    "split_pair",
    "sharp_constants",
]


@dataclass(frozen=True)
class DimensionParams:
    """Ambient dimension ``n`` and derivative order ``m`` with ``n >= 2m``."""

    n: int
    m: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or int(self.m) != self.m:
            raise ValueError("n and m must be integers")
        if self.m < 1 or self.n < 2 * self.m:
            raise ValueError(f"need m >= 1 and n >= 2m, got n={self.n}, m={self.m}")

    @property
    def critical_exponent(self) -> float:
        """n/(n-m), the exponent inside the exponential."""
        return self.n / (self.n - self.m)

    @property
    def norm_exponent(self) -> float:
        """n/m, the Lebesgue exponent of the m-th gradient."""
        return self.n / self.m


def gamma(x: float) -> float:
    """Gamma function for x > 0 (libm ``tgamma``)."""
    if not x > 0:
        raise ValueError(f"gamma: domain error, x={x} <= 0")
    return math.gamma(x)


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    if n < 1:
        raise ValueError("sphere_area: n must be >= 1")
    return 2.0 * math.pi ** (n / 2) / gamma(n / 2)


def alpha_n(n: int) -> float:
    """Moser constant n * omega_{n-1}^{1/(n-1)}."""
    if n < 2:
        raise ValueError("alpha_n: n must be >= 2")
    return n * sphere_area(n) ** (1.0 / (n - 1))


def zeta_nm(n: int, m: int) -> float:
    """Adams constant for W_0^{m, n/m}; reduces to ``alpha_n(n)`` when m = 1."""
    if not 1 <= m < n:
        raise ValueError(f"zeta_nm: need 1 <= m < n, got n={n}, m={m}")
    if m % 2 == 1:
        ratio = gamma((m + 1) / 2) / gamma((n - m + 1) / 2)
    else:
        ratio = gamma(m / 2) / gamma((n - m) / 2)
    base = math.pi ** (n / 2) * 2.0**m * ratio
    return n / sphere_area(n) * base ** (n / (n - m))


def two_nm(n: int, m: int = 1) -> float:
    """Splitting loss 2^{(n-2m)/(n-m)} of the product norm."""
    DimensionParams(n, m)
    return 2.0 ** ((n - 2 * m) / (n - m))


def kappa_singular(alpha: float, n: int, m: int = 1) -> float:
    """Singular Adams constant (1 - alpha/n) * zeta_{n,m}, for 0 <= alpha < n."""
    if not 0 <= alpha < n:
        raise ValueError(f"kappa_singular: need 0 <= alpha < n, got {alpha}")
    return (1.0 - alpha / n) * zeta_nm(n, m)


def hls_constant(n: int, mu: float) -> float:
    """Sharp HLS constant on the diagonal exponents t = r = 2n/(2n - mu)."""
    if not 0 < mu < n:
        raise ValueError(f"hls_constant: need 0 < mu < n, got mu={mu}")
    return (
        math.pi ** (mu / 2)
        * gamma(n / 2 - mu / 2)
        / gamma(n - mu / 2)
        * (gamma(n / 2) / gamma(n)) ** (-1.0 + mu / n)
    )


def lemma_basic_max(alpha: float) -> tuple[float, float]:
    """Maximiser and maximum of a^alpha + (1-a)^alpha over a in (0, 1).

    The function is concave and symmetric about 1/2, so the maximum is
    2^{1-alpha} at a = 1/2.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"lemma_basic_max: need 0 < alpha < 1, got {alpha}")
    return 0.5, 2.0 ** (1.0 - alpha)


def split_pair(n: int, m: int = 1) -> tuple[float, float]:
    """Coefficients c1 = c2 = 2^{-m/n}.

    They satisfy c1^{n/m} + c2^{n/m} = 1 and c1^{n/(n-m)} + c2^{n/(n-m)} = 2_{n,m}.
    """
    DimensionParams(n, m)
    c = 2.0 ** (-m / n)
    return c, c


@dataclass(frozen=True)
class SharpConstants:
    omega: float
    alpha_n: float
    zeta_nm: float
    two_nm: float
    kappa: float
    hls_c: float | None


def sharp_constants(n: int, m: int = 1, lam: float = 0.0, mu: float | None = None) -> SharpConstants:
    """Bundle every constant for one parameter set; ``hls_c`` is None without ``mu``."""
    DimensionParams(n, m)
    return SharpConstants(
        omega=sphere_area(n),
        alpha_n=alpha_n(n),
        zeta_nm=zeta_nm(n, m),
        two_nm=two_nm(n, m),
        kappa=kappa_singular(lam, n, m),
        hls_c=None if mu is None else hls_constant(n, mu),
    )
