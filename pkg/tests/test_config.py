import pytest

from trielect.lattice import Cell, PortMap, IDENTITY_PORTMAP
from trielect.config import (
    ALL_IN,
    ConfigError,
    Configuration,
    EdgeOrientation,
    IN,
    OUT,
    all_in_configuration,
    deserialize,
    identity_portmaps,
)
from trielect.generators import (
    random_portmaps,
    random_registers,
    random_support,
    triangle3,
)


def pair_config(a_links=ALL_IN, b_links=ALL_IN):
    from trielect.support import Support

    s = Support([Cell(0, 0), Cell(1, 0)])
    return Configuration(
        s,
        identity_portmaps(s),
        {Cell(0, 0): a_links, Cell(1, 0): b_links},
    )


def reg(**ports):
    links = [IN] * 6
    for name, st in ports.items():
        links[int(name[1])] = st
    return tuple(links)


def test_orientation_table():
    a, b = Cell(0, 0), Cell(1, 0)
    # a reaches b through port 0, b reaches a through port 3 (identity maps)
    cases = [
        (ALL_IN, ALL_IN, EdgeOrientation.UNDIRECTED),
        (reg(p0=OUT), ALL_IN, EdgeOrientation.A_TO_B),
        (ALL_IN, reg(p3=OUT), EdgeOrientation.B_TO_A),
        (reg(p0=OUT), reg(p3=OUT), EdgeOrientation.CONFLICT),
    ]
    for la, lb, expected in cases:
        c = pair_config(la, lb)
        assert c.orientation(a, b) is expected
        assert c.orientation(b, a) is expected.mirrored()


def test_orientation_rejects_bad_cells():
    c = pair_config()
    with pytest.raises(ConfigError):
        c.orientation(Cell(0, 0), Cell(5, 5))
    with pytest.raises(ValueError):
        c.orientation(Cell(0, 0), Cell(0, 0))


def test_outgoing_ports():
    c = pair_config(reg(p0=OUT), ALL_IN)
    assert c.outgoing_ports(Cell(0, 0)) == (0,)
    assert c.outgoing_ports(Cell(1, 0)) == ()
    single = all_in_configuration(random_support(1, 3))
    assert single.outgoing_ports(Cell(0, 0)) == ()


def test_empty_port_out_rejected():
    with pytest.raises(ConfigError) as exc:
        pair_config(reg(p1=OUT), ALL_IN)
    assert "(0 0)" in str(exc.value) and "port 1" in str(exc.value)


def test_with_register_validates():
    c = pair_config()
    with pytest.raises(ConfigError):
        c.with_register(Cell(0, 0), reg(p2=OUT))
    c2 = c.with_register(Cell(0, 0), reg(p0=OUT))
    assert c2.orientation(Cell(0, 0), Cell(1, 0)) is EdgeOrientation.A_TO_B
    # original untouched
    assert c.orientation(Cell(0, 0), Cell(1, 0)) is EdgeOrientation.UNDIRECTED


def test_constructor_requires_matching_keys(tri):
    pms = identity_portmaps(tri)
    regs = {c: ALL_IN for c in tri}
    del regs[Cell(0, 0)]
    with pytest.raises(ConfigError):
        Configuration(tri, pms, regs)


def test_serialize_roundtrip_random():
    for seed in range(8):
        s = random_support(7, seed)
        cfg = random_registers(s, seed, 0.3, random_portmaps(s, seed + 99))
        again = deserialize(cfg.serialize())
        assert again == cfg
        assert again.serialize() == cfg.serialize()


def test_serialize_deterministic(tri):
    a = all_in_configuration(tri).serialize()
    b = all_in_configuration(tri).serialize()
    assert a == b
    assert a.splitlines()[0] == "shape"


def test_deserialize_errors_name_location():
    good = all_in_configuration(triangle3()).serialize()
    # flip one register to Out toward an empty cell
    bad = good.replace("0 1 | 0 +1 | I I I I I I", "0 1 | 0 +1 | I I O I I I")
    with pytest.raises(ConfigError) as exc:
        deserialize(bad)
    assert "(0 1)" in str(exc.value) and "port 2" in str(exc.value)

    missing = "\n".join(good.splitlines()[:-1]) + "\n"
    with pytest.raises(ConfigError) as exc:
        deserialize(missing)
    assert "missing" in str(exc.value)

    with pytest.raises(ConfigError):
        deserialize(good.replace("shape", "shap", 1))


def test_deserialize_rejects_duplicates_and_unknown_cells():
    good = all_in_configuration(triangle3()).serialize()
    lines = good.splitlines()
    dup = "\n".join(lines + [lines[-1]]) + "\n"
    with pytest.raises(ConfigError):
        deserialize(dup)
    alien = good + "9 9 | 0 +1 | I I I I I I\n"
    with pytest.raises(ConfigError):
        deserialize(alien)


def test_comments_and_blank_lines_ignored(tri):
    cfg = all_in_configuration(tri)
    text = "# header\n\n" + cfg.serialize().replace("cells", "cells\n# mid comment")
    assert deserialize(text) == cfg


def test_port_of_uses_private_portmap():
    from trielect.support import Support

    s = Support([Cell(0, 0), Cell(1, 0)])
    pms = {Cell(0, 0): PortMap(2, -1), Cell(1, 0): IDENTITY_PORTMAP}
    c = Configuration(s, pms, {Cell(0, 0): ALL_IN, Cell(1, 0): ALL_IN})
    # direction 0 under offset 2, chirality -1: port = -(0 - 2) = 2
    assert c.port_of(Cell(0, 0), Cell(1, 0)) == 2
    assert c.port_of(Cell(1, 0), Cell(0, 0)) == 3
