from importlib import resources

import pytest
from hypothesis import strategies as st

from arrtopo.arrangement import ArrangementError, CentralArrangement, parse_arrangement

CORPUS_DIR = resources.files("arrtopo").joinpath("corpus")
CORPUS = sorted(p.name[:-4] for p in CORPUS_DIR.iterdir() if p.name.endswith(".arr"))


def load(name: str) -> CentralArrangement:
    return parse_arrangement(CORPUS_DIR.joinpath(f"{name}.arr").read_text())


@pytest.fixture(params=CORPUS)
def corpus_entry(request):
    return request.param, load(request.param)


@st.composite
def small_arrangements(draw, ambient=(2, 3), max_forms=5, coeff=3):
    """Random valid central arrangements with small integer coefficients."""
    k = draw(st.sampled_from(ambient))
    rows = draw(
        st.lists(
            st.lists(st.integers(-coeff, coeff), min_size=k, max_size=k),
            min_size=1,
            max_size=max_forms,
        )
    )
    try:
        return CentralArrangement(k, tuple(tuple(r) for r in rows))
    except ArrangementError:
        from hypothesis import assume

        assume(False)
