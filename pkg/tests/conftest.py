import pytest

from dkcheck import gallery


@pytest.fixture
def ma():
    return gallery.build("appendix_a").model


@pytest.fixture
def intro():
    return gallery.build("intro")


@pytest.fixture
def moore():
    return gallery.build("moore")
