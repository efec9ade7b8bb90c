import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from strokemark.corpus import make_corpus
from strokemark.image import load_image


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    """The default 10-page corpus, generated once per session."""
    out = tmp_path_factory.mktemp("corpus")
    make_corpus(out)
    return out


@pytest.fixture(scope="session")
def corpus_pages(corpus_dir):
    return [load_image(corpus_dir / f"{i:03d}.pbm") for i in range(10)]


@pytest.fixture(scope="session")
def small_corpus_dir(tmp_path_factory):
    """Scale-1 corpus with the small (fragile) glyph set."""
    out = tmp_path_factory.mktemp("corpus_small")
    make_corpus(out, scale=1, margin=80, glyph_size="small")
    return out


@pytest.fixture(scope="session")
def small_corpus_pages(small_corpus_dir):
    return [load_image(small_corpus_dir / f"{i:03d}.pbm") for i in range(10)]


def random_payload(rng, n=32):
    return rng.integers(0, 2, n).tolist()
