# crwa.py
import math
from dataclasses import dataclass

import numpy as np

from errors import ConfigError, DegenerateDenominatorError
from rwa import check_branch
from utils import setup_logger

logger = setup_logger(__name__)

SQRT2 = math.sqrt(2.0)
OMEGA_FLOOR = 1e-13


@dataclass(frozen=True)
class CrwaLevel:
    """
    Corrected-RWA level (k, n): c0 |up, n> + c1 |down, n+1> + c2 |up, n+2>.
    """

    k: int
    n: int
    energy: float
    c0: float
    c1: float
    c2: float

    @property
    def coefficients(self):
        return np.array([self.c0, self.c1, self.c2])


@dataclass(frozen=True)
class GroundState:
    """
    Ground state |down,0> dressed by |up,1> (first correction) and also |down,2> (second).

    Coefficient vectors are stored renormalized.
    """

    order: int
    d0: float
    d1: float
    d0_2: float
    d1_2: float
    d2_2: float
    energy_1: float
    energy_2: float

    @property
    def energy(self):
        return self.energy_1 if self.order == 1 else self.energy_2

    @property
    def vector(self):
        """Coefficients on (|down,0>, |up,1>, |down,2>) for the selected order."""
        if self.order == 1:
            return np.array([self.d0, self.d1, 0.0])
        return np.array([self.d0_2, self.d1_2, self.d2_2])


def _check_index(n):
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ConfigError(f"Photon index must be non-negative, got {n}")
    return n_arr.astype(float)


def _scalar(value):
    return float(value) if np.ndim(value) == 0 else value


def _warn_off_resonance(delta_atom):
    if delta_atom != 1.0:
        logger.warning(f"delta_atom={delta_atom} is off resonance; CRWA output is unvalidated there")


def cubic_coefficients(n, g, delta_atom=1.0):
    """Coefficients (a2, a1, a0) of E^3 + a2 E^2 + a1 E + a0 at resonance."""
    _warn_off_resonance(delta_atom)
    n = _check_index(n)
    g2 = g * g
    a2 = -(3.0 * n + 3.5)
    a1 = (n + 0.5) * (3.0 * n + 5.5) - (2.0 * n + 3.0) * g2
    a0 = -(n + 0.5) ** 2 * (n + 2.5) + (2.0 * n ** 2 + 6.0 * n + 3.5) * g2
    return _scalar(a2), _scalar(a1), _scalar(a0)


def cubic_residual(n, g, energy):
    a2, a1, a0 = cubic_coefficients(n, g)
    return np.abs(((energy + a2) * energy + a1) * energy + a0)


def cubic_roots(n, g):
    """
    All three roots of the cubic, ascending, from the companion matrix.

    Diagnostic only: the two physical levels plus the superfluous root near n + 5/2
    that the closed form leaves out.
    """
    a2, a1, a0 = cubic_coefficients(n, g)
    roots = np.roots([1.0, a2, a1, a0])
    if np.max(np.abs(roots.imag)) > 1e-8 * max(1.0, np.max(np.abs(roots.real))):
        logger.warning(f"Cubic for n={n}, g={g} returned complex roots {roots}")
    return np.sort(roots.real)


def crwa_block(n, g, delta_atom=1.0):
    """Hamiltonian restricted to {|up,n>, |down,n+1>, |up,n+2>}."""
    half = delta_atom / 2.0
    return np.array([
        [n + half, g * math.sqrt(n + 1), 0.0],
        [g * math.sqrt(n + 1), n + 1 - half, g * math.sqrt(n + 2)],
        [0.0, g * math.sqrt(n + 2), n + 2 + half],
    ])


def crwa_energy_closed(k, n, g):
    """
    Trigonometric root of the cubic for branch k.

    E_kn = [(3n + 7/2) + sqrt((6n+9)g^2 + 4) (cos t + (-1)^k sqrt(3) sin t)] / 3 with
    t = arccos((-8 + 9ng^2) / [4 + (6n+9)g^2]^{3/2}) / 3 + 2 pi / 3.
    """
    sign = check_branch(k)
    n = _check_index(n)
    if g < 0:
        raise ConfigError(f"Coupling must be non-negative, got {g}")
    g2 = g * g
    radius = np.sqrt((6.0 * n + 9.0) * g2 + 4.0)
    # g -> 0 puts the argument at exactly -1
    argument = np.clip((-8.0 + 9.0 * n * g2) / radius ** 3, -1.0, 1.0)
    theta = np.arccos(argument) / 3.0 + 2.0 * math.pi / 3.0
    energy = ((3.0 * n + 3.5) + radius * (np.cos(theta) + sign * math.sqrt(3.0) * np.sin(theta))) / 3.0
    return _scalar(energy)


def crwa_energy_series(k, n, g, order=3):
    """Expansion of E_kn in g, truncated after the g^order term (order 1 is the RWA)."""
    sign = check_branch(k)
    n = _check_index(n)
    if order not in (0, 1, 2, 3):
        raise ConfigError(f"Series order must be 0..3, got {order}")
    terms = [
        n + 0.5,
        sign * np.sqrt(n + 1.0) * g,
        -(n + 2.0) * g ** 2 / 4.0,
        -sign * (n + 2.0) * (3.0 * n + 2.0) * g ** 3 / (32.0 * np.sqrt(n + 1.0)),
    ]
    return _scalar(sum(terms[:order + 1]))


def _normalized(vector):
    vector = np.asarray(vector, dtype=float)
    return vector / np.linalg.norm(vector)


def crwa_coefficients_series(k, n, g, normalize=True):
    sign = check_branch(k)
    if n < 0:
        raise ConfigError(f"Photon index must be non-negative, got {n}")
    root = math.sqrt(n + 1.0)
    c0 = (sign * SQRT2 / 2.0
          + SQRT2 * (n + 2) / (16.0 * root) * g
          - sign * SQRT2 * (n + 2) ** 2 / (256.0 * (n + 1)) * g ** 2)
    c1 = (SQRT2 / 2.0
          - sign * SQRT2 * (n + 2) / (16.0 * root) * g
          - SQRT2 * (n + 2) * (17 * n + 18) / (256.0 * (n + 1)) * g ** 2)
    c2 = (-math.sqrt(2.0 * n + 4.0) / 4.0 * g
          - sign * (3 * n + 2) * math.sqrt(2.0 * n + 4.0) / (32.0 * root) * g ** 2)
    coefficients = np.array([c0, c1, c2])
    if normalize:
        coefficients = _normalized(coefficients)
    return tuple(float(c) for c in coefficients)


def omega_denominator(m, energy, g, delta_atom=1.0):
    """Omega_m(E) = (m - E + Delta/2) / g."""
    return (m - energy + delta_atom / 2.0) / g


def crwa_coefficients_ratio(k, n, g, energy, delta_atom=1.0):
    check_branch(k)
    _warn_off_resonance(delta_atom)
    if g == 0:
        raise DegenerateDenominatorError("Ratio form is singular at g = 0; use the series coefficients")

    omega_n = omega_denominator(n, energy, g, delta_atom)
    omega_n2 = omega_denominator(n + 2, energy, g, delta_atom)
    for label, value in (('n', omega_n), ('n+2', omega_n2)):
        if abs(value) < OMEGA_FLOOR:
            raise DegenerateDenominatorError(
                f"Omega_{label}(E) = {value:.3e} vanishes for k={k}, n={n}, g={g}, E={energy}"
            )

    coefficients = _normalized([-math.sqrt(n + 1.0) / omega_n, 1.0, -math.sqrt(n + 2.0) / omega_n2])
    return tuple(float(c) for c in coefficients)


def crwa_level(k, n, g, method='series'):
    energy = crwa_energy_closed(k, n, g)
    if method == 'series':
        c0, c1, c2 = crwa_coefficients_series(k, n, g)
    elif method == 'ratio':
        c0, c1, c2 = crwa_coefficients_ratio(k, n, g, energy)
    else:
        raise ConfigError(f"Unknown coefficient method '{method}'")
    return CrwaLevel(k=k, n=n, energy=energy, c0=c0, c1=c1, c2=c2)


def crwa_overlap(n, g, method='series'):
    """<(1,n)|(2,n)>; O(g^4) for series states, zero to rounding for ratio states."""
    lower = crwa_level(1, n, g, method)
    upper = crwa_level(2, n, g, method)
    return float(lower.coefficients @ upper.coefficients)


def ground_state(g, order=1):
    if order not in (1, 2):
        raise ConfigError(f"Ground-state order must be 1 or 2, got {order}")
    if g < 0:
        raise ConfigError(f"Coupling must be non-negative, got {g}")

    g2, g3, g4 = g ** 2, g ** 3, g ** 4
    first = _normalized([1.0 - g2 / 8.0 + 11.0 * g4 / 128.0, -g / 2.0 + 3.0 * g3 / 16.0])
    second = _normalized([
        1.0 - g2 / 8.0 - 13.0 * g4 / 128.0,
        -g / 2.0 - g3 / 16.0,
        SQRT2 * g2 / 4.0 - SQRT2 * g4 / 32.0,
    ])
    return GroundState(
        order=order,
        d0=float(first[0]),
        d1=float(first[1]),
        d0_2=float(second[0]),
        d1_2=float(second[1]),
        d2_2=float(second[2]),
        energy_1=-0.5 - g2 / 2.0 + g4 / 8.0,
        energy_2=-0.5 - g2 / 2.0 - g4 / 8.0,
    )
