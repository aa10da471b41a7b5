import pytest

from hosync.model import STRONG_SWITCH_1, STRONG_SWITCH_2, NetworkConfig, OscillatorSpec


@pytest.fixture
def strong_pair():
    def make(i1=720e-6, i2=720e-6, **kw):
        kw.setdefault("delta", 0.5)
        return NetworkConfig.pair(OscillatorSpec(STRONG_SWITCH_1, i1), OscillatorSpec(STRONG_SWITCH_2, i2), **kw)
    return make
