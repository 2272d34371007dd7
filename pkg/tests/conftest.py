import pytest

from khsat.lts import LtsModel


@pytest.fixture
def running_model() -> LtsModel:
    """Four states: s -a-> t, s -a-> v, t -b-> u; p@s, r@{t,v}, q@u."""
    return LtsModel(
        ["s", "t", "u", "v"],
        {"a": [("s", "t"), ("s", "v")], "b": [("t", "u")]},
        {"p": ["s"], "q": ["u"], "r": ["t", "v"]},
    )


@pytest.fixture
def distinguishing_pair() -> tuple[LtsModel, LtsModel]:
    """Two models with identical valuations; only the first has an edge."""
    m = LtsModel(["s", "t"], {"a": [("s", "t")]}, {"p": ["s"], "q": ["t"]})
    m_prime = LtsModel(["s", "t"], {"a": []}, {"p": ["s"], "q": ["t"]})
    return m, m_prime
