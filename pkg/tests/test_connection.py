from fractions import Fraction

import pytest

from toricmirror import errors, linalg
from toricmirror.connection import (at_zero, birkhoff_extract, box_points, compare_quantum_rings,
                                    connection_data, constant, flatness_report, in_box, jacobian,
                                    minverse, mmul, origin_connection, pairing_report,
                                    qmatrix_to_json, qmatrix_to_text, residue_nilpotency)
from toricmirror.hypergeometric import substitute_log_free
from toricmirror.series import LogLaurentSeries

from conftest import series_data, toric


def flat_extraction(name, N=3):
    t, sd = toric(name), series_data(name, N)
    GJ = substitute_log_free(sd.G, sd.mm, t.ga)
    ex = birkhoff_extract(t.ga, t.esd, GJ)
    return t, sd, ex


def test_origin_connection_projective_line():
    t = toric("p1")
    A0, Ainf = origin_connection(t.ga, t.esd)
    assert A0 == [[0, 0], [-2, 0]]
    assert Ainf == [[0, 0], [0, 1]]


def test_origin_connection_commutator(data):
    A0, Ainf = origin_connection(data.ga, data.esd)
    comm = linalg.matmul(Ainf, A0)
    other = linalg.matmul(A0, Ainf)
    assert [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(comm, other)] == A0


def test_projective_line_connection():
    _, _, ex = flat_extraction("p1", 6)
    assert ex.z_free
    assert qmatrix_to_text(ex.Omega[0]) == [["0", "q1"], ["1", "0"]]


def test_projective_plane_connection():
    _, _, ex = flat_extraction("p2", 4)
    assert ex.Omega[0] == [[{}, {}, {(1,): 1}], [{(0,): 1}, {}, {}], [{}, {(0,): 1}, {}]]
    assert qmatrix_to_json(ex.Omega[0])[0][2] == {"1": "1/1"}


def test_factorization_shape(data):
    _, sd, ex = flat_extraction(data.name, 2)
    assert ex.words[0] == ()
    assert linalg.det(ex.Y0) != 0
    for e, parts in ex.Y.items():
        if any(e):
            assert all(j < 0 for j in parts)
    for parts in ex.R.values():
        assert all(j >= 0 for j in parts)


def test_connection_is_flat_and_compatible(data):
    t, _, ex = flat_extraction(data.name)
    cd = connection_data(t.ga, t.esd, ex)
    flat = flatness_report(cd, t.esd)
    assert flat.passed, flat.witnesses
    pair = pairing_report(t.ga, cd)
    assert pair.passed, pair.witnesses
    assert pair["mu_identity"] and pair["z_pole_order"]
    assert residue_nilpotency(cd)


def test_residue_equals_cup_product(data):
    t, _, ex = flat_extraction(data.name, 2)
    for a, Om in enumerate(ex.Omega):
        assert at_zero(Om, t.esd.r) == t.ga.cup_matrix(t.ga.generator(a))


def test_flat_and_raw_agree_for_fano():
    for name in ("p1", "p2", "p1xp1", "f1"):
        t, sd, ex = flat_extraction(name)
        raw = birkhoff_extract(t.ga, t.esd, sd.G)
        assert raw.Omega == ex.Omega


def test_quantum_rings_match_after_mirror_map(data):
    t, sd, ex = flat_extraction(data.name)
    cmp = compare_quantum_rings(sd.qring, ex.Omega, t.esd.r, sd.N, sd.mm)
    assert cmp.match, cmp.witness


def test_f2_needs_mirror_map():
    t, sd, ex = flat_extraction("f2")
    naive = compare_quantum_rings(sd.qring, ex.Omega, t.esd.r, sd.N)
    assert not naive.match
    assert naive.witness["q"] == [2, 1]
    with pytest.raises(errors.Mismatch):
        compare_quantum_rings(sd.qring, ex.Omega, t.esd.r, sd.N, strict=True)
    fixed = compare_quantum_rings(sd.qring, ex.Omega, t.esd.r, sd.N, sd.mm)
    assert fixed.match
    # the twist and basis change are visibly non-trivial
    assert fixed.jacobian_twist[0][0] == {(0, 0): 1, (1, 0): 2, (2, 0): 6, (3, 0): 20}
    assert fixed.basis_change[2][1] == {(1, 0): -1, (2, 0): -3, (3, 0): -10}


def test_f2_raw_series_gives_batyrev_ring_directly():
    t, sd = toric("f2"), series_data("f2", 3)
    raw = birkhoff_extract(t.ga, t.esd, sd.G)
    assert raw.z_free
    assert compare_quantum_rings(sd.qring, raw.Omega, t.esd.r, sd.N).match


def test_jacobian_is_identity_without_map():
    assert jacobian(None, 2, 3) == [[{(0, 0): 1}, {}], [{}, {(0, 0): 1}]]


def test_z_residual_for_foreign_series():
    t, sd = toric("p2"), series_data("p2", 3)
    bent = sd.G + LogLaurentSeries.monomial(1, 3, t.ga.one(), e=[1], j=1)
    with pytest.raises(errors.ZResidual) as info:
        birkhoff_extract(t.ga, t.esd, bent)
    assert info.value.witness["z"] != 0
    loose = birkhoff_extract(t.ga, t.esd, bent, strict=False)
    assert not loose.z_free and loose.residuals


def test_singular_word_basis():
    t, sd = toric("p2"), series_data("p2", 2)
    with pytest.raises(errors.WordBasisSingular):
        birkhoff_extract(t.ga, t.esd, sd.G, words=[(), (1,), (1,)])
    with pytest.raises(errors.WordBasisSingular):
        birkhoff_extract(t.ga, t.esd, sd.G, words=[(), (1,)])


def test_series_matrix_inverse():
    r, N = 2, 3
    keep = in_box(N)
    A = [[{(0, 0): Fraction(1), (1, 0): Fraction(2)}, {(0, 1): Fraction(1)}],
         [{(1, 1): Fraction(-3)}, {(0, 0): Fraction(2), (2, 0): Fraction(1, 2)}]]
    inv = minverse(A, r, keep, box_points(r, N))
    assert mmul(A, inv, keep) == constant(linalg.identity(2), r)
