import math

import pytest

import menet as mn


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """Deterministic state/model files used by CLI and golden tests."""
    root = tmp_path_factory.mktemp("fixtures")
    mn.save_state(mn.canonical_state("w"), root / "w.state")
    mn.save_state(mn.canonical_state("ghz"), root / "ghz.state")
    mn.save_state(mn.PureState([0.5] * 4), root / "plusplus.state")
    rot = mn.LocalBasisChange.uniform(mn.rotation(math.pi / 5), 3)
    mn.save_state(
        mn.apply_local_basis_change(mn.canonical_state("ghz"), rot),
        root / "rotghz.state",
    )
    mn.save_state(mn.basis_state(2, 0), root / "zerozero.state")
    mn.save_model(mn.extract_men(mn.PureState([0.5] * 4)), root / "plusplus.model")
    mn.save_model(mn.random_chain_model(4, seed=5), root / "chain4.model")
    return root


@pytest.fixture
def bell():
    amp = 1.0 / math.sqrt(2.0)
    return mn.PureState([amp, 0.0, 0.0, amp])


@pytest.fixture
def plus():
    amp = 1.0 / math.sqrt(2.0)
    return mn.PureState([amp, amp])


@pytest.fixture
def plusplus():
    return mn.PureState([0.5] * 4)


@pytest.fixture
def ghz():
    return mn.canonical_state("ghz")


@pytest.fixture
def w_state():
    return mn.canonical_state("w")
