import pytest

from spinchannel import ConfigError
from spinchannel.model import (
    BasisString,
    ModelParams,
    as_basis_string,
    broken_link_preset,
    chain_length,
    perturbed_sites,
    qubit_site,
)


@pytest.mark.parametrize("n,m,L", [(5, 0, 5), (12, 2, 34), (1, 7, 1)])
def test_chain_length(n, m, L):
    assert chain_length(ModelParams(n_qubits=n, spacing=m)) == L


@pytest.mark.parametrize("m,j,site", [(0, 3, 3), (2, 2, 4), (2, 1, 1)])
def test_qubit_site(m, j, site):
    assert qubit_site(ModelParams(n_qubits=4, spacing=m), j) == site


def test_last_qubit_sits_on_last_site():
    p = ModelParams(n_qubits=7, spacing=3)
    assert qubit_site(p, 7) == p.chain_length


@pytest.mark.parametrize("j", [0, 5])
def test_qubit_site_out_of_range(j):
    with pytest.raises(IndexError):
        qubit_site(ModelParams(n_qubits=4), j)


def test_perturbed_sites_examples():
    assert perturbed_sites(ModelParams(n_qubits=5), "ggggg") == frozenset()
    assert perturbed_sites(ModelParams(n_qubits=5), "egeeg") == {1, 3, 4}
    assert perturbed_sites(ModelParams(n_qubits=3, spacing=1), "eeg") == {1, 3}


def test_excited_set_matches_text_example():
    assert BasisString.parse("egeeg").excited_set() == {1, 3, 4}


def test_basis_string_codes_round_trip():
    for code in range(32):
        s = BasisString.from_code(code, 5)
        assert s.code == code
        assert BasisString.parse(str(s)) == s
    assert BasisString.parse("egg").code == 0b100


def test_basis_string_rejects_bad_alphabet():
    with pytest.raises(ValueError):
        BasisString.parse("egx")


def test_as_basis_string_length_check():
    with pytest.raises(ValueError):
        as_basis_string("eg", 3)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_qubits=0),
        dict(n_qubits=2, gamma=1.5),
        dict(n_qubits=2, lam=-0.1),
        dict(n_qubits=2, coupling=0.0),
        dict(n_qubits=2, spacing=-1),
        dict(n_qubits=3, broken_bonds={3}),
        dict(n_qubits=2, zero_modes="fill"),
    ],
)
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        ModelParams(**kwargs)


def test_open_boundary_has_no_wrap_bond():
    c = ModelParams(n_qubits=4).chain()
    assert len(c.active_bonds) == 3


def test_all_bonds_broken_gives_single_sites():
    p = ModelParams(n_qubits=3, spacing=1, broken_bonds={1, 2, 3, 4})
    assert p.chain().blocks() == [(i, i + 1) for i in range(5)]


def test_split_keeps_only_blocks_with_qubits():
    p = ModelParams(n_qubits=2, spacing=3, broken_bonds={2, 3})
    parts = p.chain().split()
    assert [(sub.n_sites, owned) for sub, owned in parts] == [(2, (0,)), (2, (1,))]
    assert [sub.qubit_sites for sub, _ in parts] == [(0,), (1,)]


def test_broken_link_preset_blocks():
    p = broken_link_preset(12, 4)
    c = p.chain()
    sizes = [b - a for a, b in c.blocks()]
    assert sizes == [3] + [5] * 10 + [3]
    for (sub, owned) in c.split():
        assert len(owned) == 1


def test_dict_round_trip():
    p = ModelParams(n_qubits=3, spacing=2, lam=0.7, broken_bonds={2})
    assert ModelParams.from_dict(p.to_dict()) == p
    with pytest.raises(ConfigError):
        ModelParams.from_dict({"n_qubits": 2, "bogus": 1})
