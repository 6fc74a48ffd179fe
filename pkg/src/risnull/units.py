"""Decibel conversions.

Power quantities use ``10 ** (x / 10)``, amplitude quantities ``10 ** (x / 20)``.
Every dB <-> linear conversion in the package goes through this module.
"""

import numpy as np

__all__ = [
    "db_to_power",
    "power_to_db",
    "db_to_amplitude",
    "dbm_to_watt",
    "watt_to_dbm",
]


def db_to_power(x_db):
    return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)


def power_to_db(p):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(p, dtype=float))


def db_to_amplitude(x_db):
    """Amplitude gain for a dB value; ``-inf`` maps to exactly 0."""
    return np.power(10.0, np.asarray(x_db, dtype=float) / 20.0)


def dbm_to_watt(x_dbm):
    return db_to_power(np.asarray(x_dbm, dtype=float) - 30.0)


def watt_to_dbm(p):
    return power_to_db(p) + 30.0
