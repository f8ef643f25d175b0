import pytest
from hypothesis import settings

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")


@pytest.fixture
def schema4():
    from altc.corpus import LabelSchema
    return LabelSchema()
