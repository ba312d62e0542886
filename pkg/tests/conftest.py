import numpy as np
import pytest

import modesplit as ms

GAMMA = 2 * np.pi * 6e6
DOPPLER = 2 * np.pi * 343e6
WAVELENGTH = 780e-9
CELL = 0.05
CAVITY_LENGTH = 0.177


def medium_of_depth(a0_La, mode="approx_doppler", dw=DOPPLER):
    return ms.MediumParams(wavelength=WAVELENGTH, gamma=GAMMA, a0_La=a0_La,
                           length=CELL, doppler_width=dw, mode=mode)


@pytest.fixture(scope="session")
def cavity20():
    return ms.CavityParams(length=CAVITY_LENGTH, R1=0.90, R2=0.995,
                           excess_loss=ms.calibrate_excess_loss(20.0, 0.90, 0.995),
                           wavelength=WAVELENGTH)


@pytest.fixture(scope="session")
def fsr_hz(cavity20):
    return ms.fsr(cavity20)


@pytest.fixture(scope="session")
def kappa_hz(cavity20):
    return ms.linewidth(cavity20)


@pytest.fixture(scope="session")
def window(fsr_hz):
    return (-3.3 * fsr_hz, 3.3 * fsr_hz)


@pytest.fixture(scope="session")
def wide_window(fsr_hz):
    return (-6.6 * fsr_hz, 6.6 * fsr_hz)


@pytest.fixture(scope="session")
def sweep_empty(cavity20, window):
    return ms.sweep(window, 1e6, cavity20, None)


@pytest.fixture(scope="session")
def sweep12(cavity20, window):
    return ms.sweep(window, 1e6, cavity20, medium_of_depth(12.0))


@pytest.fixture(scope="session")
def sweep70(cavity20, window):
    return ms.sweep(window, 1e6, cavity20, medium_of_depth(70.0))
