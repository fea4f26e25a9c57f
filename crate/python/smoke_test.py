"""Smoke test for the quadlat extension module."""

import quadlat


def main():
    l1 = quadlat.fixture("L1")
    assert l1.discriminant == 729
    assert l1.profile(3) == [0, 1, 2, 3]
    assert l1.g_plus() == 2

    genus = l1.genus()
    assert genus.class_number == 3 and genus.g == 2
    me = genus.classes.index(l1.canonical())
    assert genus.spinor_class_number(me) == 1

    t = quadlat.Lattice.from_form(3, [1, 1, 9, 0, 0, 1])
    assert t.discriminant == 54
    assert quadlat.Lattice.parse("3:[1,1,9,0,0,1]") == t

    e = quadlat.Lattice.parse("fixture:E16")
    assert e.theta(2) == [1, 5, 6, 14]
    assert e.mu(2).is_isometric(quadlat.fixture("E10"))

    rows = quadlat.ternary_table()
    assert len(rows) == 45 and sum(r[2] for r in rows) == 18

    found = quadlat.find_one_class_spinor(729)
    assert found == [l1.canonical()] or found[0].is_isometric(l1)

    try:
        quadlat.Lattice([[1, 2], [2, 1]])
    except ValueError:
        pass
    else:
        raise AssertionError("indefinite Gram accepted")

    for v in quadlat.verify("quick"):
        print("PASS" if v["pass"] else "FAIL", v["id"], v["detail"])
    print("smoke test ok")


if __name__ == "__main__":
    main()
