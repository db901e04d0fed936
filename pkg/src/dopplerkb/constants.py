"""Physical constants and molecular data (SI units).

Values are CODATA 2006 (published 2007) and the 2003 atomic mass evaluation,
the epoch of the ammonia line measurements. The Boltzmann constant below is
only a default for *generating* data and for converting friction
coefficients; the thermometry code derives k_B from widths and never reads it.
"""

C = 299_792_458.0  # m/s, exact
K_B_CODATA2006 = 1.3806504e-23  # J/K
ATOMIC_MASS_UNIT = 1.660538782e-27  # kg, CODATA 2006
ATM = 101_325.0  # Pa

MASS_14N_U = 14.0030740048
MASS_1H_U = 1.00782503207
# neutral-atom masses, electron binding neglected (< 1e-7 relative)
MASS_NH3_U = MASS_14N_U + 3.0 * MASS_1H_U
MASS_NH3 = MASS_NH3_U * ATOMIC_MASS_UNIT

# nu_2 saQ(6,3) line of 14NH3
NU0_SAQ63 = 28_953_693.9e6  # Hz
T_WATER_TRIPLE_ICE = 273.15  # K
# self-diffusion of NH3 at 1 atm (0.15 cm^2/s)
D0_NH3 = 0.15e-4  # m^2/s
