import pytest
from hypothesis import given
import hypothesis.strategies as st

from netfd.labels import (
    RWA_NOISE, RWA_SYSTEM, XX_NOISE, XX_SYSTEM, NoiseLabel, dagger_label, is_tilde,
    model_of, order_key, project_label, tilde_label,
)

ALL_SYSTEM = RWA_SYSTEM + XX_SYSTEM
labels = st.one_of(
    st.sampled_from(ALL_SYSTEM),
    st.builds(NoiseLabel, st.sampled_from(RWA_NOISE + XX_NOISE), st.integers(0, 50)),
)


@given(labels)
def test_tilde_and_dagger_are_involutions(lab):
    assert tilde_label(tilde_label(lab)) == lab
    assert dagger_label(dagger_label(lab)) == lab


@given(labels)
def test_tilde_commutes_with_dagger(lab):
    assert tilde_label(dagger_label(lab)) == dagger_label(tilde_label(lab))


@given(labels)
def test_projection_lands_on_physical_labels(lab):
    p = project_label(lab)
    assert not is_tilde(p)
    assert model_of(p) == model_of(lab)
    # <<1| removes tildes along tilde-dagger orbits
    assert project_label(dagger_label(tilde_label(lab))) == p


def test_projection_is_not_tilde_invariant():
    # atil projects to adag, a stays a: tilde alone does not commute with projection
    assert project_label(tilde_label("a")) == "adag" != project_label("a")


def test_order_puts_creation_first_and_system_before_noise():
    assert order_key("adag") < order_key("a")
    assert order_key("atildag") < order_key("atil")
    assert order_key("a") < order_key(NoiseLabel("dBdag", 0))
    assert order_key(NoiseLabel("dB", 0)) < order_key(NoiseLabel("dBdag", 1))


def test_bad_labels_rejected():
    with pytest.raises(ValueError):
        NoiseLabel("dZ", 0)
    with pytest.raises(ValueError):
        NoiseLabel("dB", -1)
    with pytest.raises(ValueError):
        tilde_label("q")
