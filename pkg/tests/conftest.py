import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import pathlib

import pytest

from htsplit.parser import parse_problem

DATA = pathlib.Path(__file__).parent / "data"


def load(name: str):
    return parse_problem((DATA / name).read_text())


@pytest.fixture(scope="session")
def four_models_problem():
    return load("four_models.htsplit")


@pytest.fixture(scope="session")
def blocks_graph_problem():
    return load("blocks_graph.htsplit")


@pytest.fixture(scope="session")
def blocks_split_problem():
    return load("blocks_split.htsplit")


@pytest.fixture(scope="session")
def strong_eq_problem():
    return load("strong_eq.htsplit")


@pytest.fixture(scope="session")
def meta_problem():
    return load("meta.htsplit")


@pytest.fixture(scope="session")
def transforms_problem():
    return load("transforms.htsplit")
