import pytest

import uavplace as up


@pytest.fixture(scope="session")
def urban():
    return up.URBAN


@pytest.fixture(scope="session")
def radio():
    return up.RadioConfig(fc_hz=2e9, pt_dbm=30.0, pn_dbm=-120.0)


@pytest.fixture(scope="session")
def two_classes(radio):
    return (
        up.QosClass.from_radio(1, 50.0, 5.5, radio),
        up.QosClass.from_radio(2, 47.0, 5.5, radio),
    )


@pytest.fixture(scope="session")
def bracket(two_classes, urban, radio):
    return up.altitude_bracket(two_classes, urban, radio)
