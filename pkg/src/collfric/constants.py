"""Physical constants (SI, CODATA 2018) and unit conversions.

Frequencies quoted in "THz" are angular: 1 THz here means 1e12 rad/s.
"""

HBAR = 1.054571817e-34  # J s
EV = 1.602176634e-19  # J
AMU = 1.66053906660e-27  # kg
C_LIGHT = 299_792_458.0  # m/s

NM = 1e-9
KM_PER_S = 1e3
THZ = 1e12
FS = 1e-15
PS = 1e-12
NN = 1e-9  # nanonewton
MEV = 1e-3 * EV


def ev_to_joule(e_ev):
    return e_ev * EV


def joule_to_ev(e_j):
    return e_j / EV


def hbar_energy_to_rate(e_joule):
    """Angular frequency (rad/s) of an energy E = hbar * omega."""
    return e_joule / HBAR
