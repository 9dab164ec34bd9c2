"""Observable translation layer and the meson catalogue."""

import csv
import io
import json

import numpy as np
import pytest

from cuq.core import BlochState
from cuq.meson import (BlochParameters, Damping, MesonObservables,
                       UnphysicalObservables, bloch_from_observables,
                       catalogue, catalogue_to_csv, catalogue_to_json,
                       classify_damping, flavour_asymmetry,
                       observables_from_bloch)


class TestForwardMap:
    def test_cp_conserving_angles_give_unit_qop(self):
        for theta in (0.0, 180.0):
            o = observables_from_bloch(BlochParameters(0.7, theta, 1.0))
            assert o.q_over_p == pytest.approx(1.0, abs=1e-14)

    def test_qop_extremal_at_right_angles(self):
        # |q/p|^4 = (1+r^2-2r sin th)/(1+r^2+2r sin th): extremes at +-90
        thetas = np.linspace(-179.0, 179.0, 719)
        vals = [observables_from_bloch(BlochParameters(0.4, t, 1.0)).q_over_p
                for t in thetas]
        assert thetas[int(np.argmin(vals))] == pytest.approx(90.0, abs=0.5)
        assert thetas[int(np.argmax(vals))] == pytest.approx(-90.0, abs=0.5)

    def test_oscillatory_splittings(self):
        # z = sqrt(1 - r^2 - 2 i r cos th): for theta = 90 the argument is
        # real positive, so Delta E = 2|E| sqrt(1-r^2), Delta Gamma = 0
        r, E = 0.6, 2.0
        o = observables_from_bloch(BlochParameters(r, 90.0, E))
        assert o.delta_E == pytest.approx(2 * E * np.sqrt(1 - r * r),
                                          rel=1e-14)
        assert o.delta_Gamma == pytest.approx(0.0, abs=1e-14)

    def test_overdamped_perpendicular(self):
        # r > 1, theta = 90: pure decay splitting, no mass splitting
        r, E = 1.5, 1.0
        o = observables_from_bloch(BlochParameters(r, 90.0, E))
        assert o.delta_E == pytest.approx(0.0, abs=1e-14)
        assert abs(o.delta_Gamma) == pytest.approx(4 * E * np.sqrt(r * r - 1),
                                                   rel=1e-14)

    def test_splitting_invariant(self):
        # Delta E^2 - Delta Gamma^2/4 = 4|E|^2 (1 - r^2) for any angle
        r, E, th = 0.945, 2.64652e-3, 179.6322
        o = observables_from_bloch(BlochParameters(r, th, E))
        lhs = o.delta_E ** 2 - o.delta_Gamma ** 2 / 4
        assert lhs == pytest.approx(4 * E * E * (1 - r * r), rel=1e-12)


class TestInversion:
    @pytest.mark.parametrize("r", [1e-3, 0.1, 0.5, 0.945, 1.5])
    @pytest.mark.parametrize("theta", [-90.0, 10.0, 90.0, 179.0])
    def test_roundtrip(self, r, theta):
        src = BlochParameters(r, theta, 1.7e-3)
        inv = bloch_from_observables(observables_from_bloch(src))
        got = inv.params if abs(np.cos(np.radians(inv.params.theta_eg_deg))
                                - np.cos(np.radians(theta))) < \
            abs(np.cos(np.radians(inv.mirror.theta_eg_deg))
                - np.cos(np.radians(theta))) else inv.mirror
        assert got.r == pytest.approx(r, abs=1e-10)
        assert got.E_mag == pytest.approx(1.7e-3, rel=1e-10)
        assert np.sin(np.radians(got.theta_eg_deg)) == pytest.approx(
            np.sin(np.radians(theta)), abs=1e-9)
        assert np.cos(np.radians(got.theta_eg_deg)) == pytest.approx(
            np.cos(np.radians(theta)), abs=1e-9)

    def test_mirror_branch_flips_cosine(self):
        inv = bloch_from_observables(
            observables_from_bloch(BlochParameters(0.5, 60.0, 1.0)))
        c1 = np.cos(np.radians(inv.params.theta_eg_deg))
        c2 = np.cos(np.radians(inv.mirror.theta_eg_deg))
        assert c1 == pytest.approx(-c2, abs=1e-12)

    def test_zero_gamma_splitting_forces_cuq_branch(self):
        o = MesonObservables(delta_E=1.0, delta_Gamma=0.0, q_over_p=0.9)
        inv = bloch_from_observables(o)
        assert inv.forced_cuq_branch
        assert abs(np.sin(np.radians(inv.params.theta_eg_deg))) == \
            pytest.approx(1.0, abs=1e-12)

    def test_rejects_unphysical(self):
        with pytest.raises(UnphysicalObservables):
            MesonObservables(delta_E=-1.0, delta_Gamma=0.0, q_over_p=1.0)
        with pytest.raises(UnphysicalObservables):
            MesonObservables(delta_E=1.0, delta_Gamma=0.0, q_over_p=-0.5)


class TestAsymmetry:
    def test_reads_third_component(self):
        s = BlochState(b=[0.1, -0.2, 0.45], tau=3.0)
        assert flavour_asymmetry(s) == pytest.approx(0.45)


class TestDamping:
    def test_classification(self):
        assert classify_damping(0.5) is Damping.OSCILLATORY
        assert classify_damping(2.0) is Damping.OVERDAMPED
        assert classify_damping(1.0) is Damping.CRITICAL
        assert classify_damping(1.0 + 1e-13) is Damping.CRITICAL


class TestCatalogue:
    def test_systems_present(self):
        names = [e.name for e in catalogue()]
        assert names == ["K0", "D0", "Bd0", "Bs0"]

    def test_k0_values(self):
        k0 = catalogue()[0]
        assert k0.bloch.r == pytest.approx(0.945)
        assert k0.bloch.theta_eg_deg == pytest.approx(179.6322)
        assert k0.bloch.E_mag == pytest.approx(2.64652e-3)
        assert k0.observables.delta_E == pytest.approx(0.005293)
        assert k0.damping is Damping.OSCILLATORY

    def test_damping_classes(self):
        by_name = {e.name: e.damping for e in catalogue()}
        assert by_name["K0"] is Damping.OSCILLATORY
        assert by_name["D0"] is Damping.OVERDAMPED
        assert by_name["Bd0"] is Damping.OSCILLATORY
        assert by_name["Bs0"] is Damping.OSCILLATORY

    def test_csv_roundtrip(self):
        rows = list(csv.DictReader(io.StringIO(catalogue_to_csv())))
        assert len(rows) == 4
        assert float(rows[3]["delta_E"]) == pytest.approx(17.765)
        assert float(rows[1]["r"]) == pytest.approx(1.5)

    def test_json_roundtrip(self):
        rows = json.loads(catalogue_to_json())
        assert rows[0]["system"] == "K0"
        assert rows[2]["theta_eg_deg"] == pytest.approx(-90.0)
