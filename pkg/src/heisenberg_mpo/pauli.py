"""Single-site operators for spin-1/2 (d = 2), basis order (|up>, |down>)."""

from __future__ import annotations

import numpy as np

D = 2

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
# raising: up <- down
SP = (SX + 1j * SY) / 2
SM = (SX - 1j * SY) / 2

UP = np.array([[1, 0], [0, 0]], dtype=complex)
DOWN = np.array([[0, 0], [0, 1]], dtype=complex)

PAULI = {"I": I2, "X": SX, "Y": SY, "Z": SZ}

for _m in (I2, SX, SY, SZ, SP, SM, UP, DOWN):
    _m.setflags(write=False)
del _m
