from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from carleson import io
from carleson.cli import main
from carleson.conformal import Composition, QuadPoly
from carleson.errors import SpecError
from carleson.geometry import Circle, CircularDomain, MobiusMap
from carleson.measures import AtomicMeasure

ANNULUS = {"outer": {"center": [0, 0], "radius": 1}, "inner": [{"center": [0, 0], "radius": 0.25}]}


def put(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def measure_file(tmp_path, name, atoms):
    return put(tmp_path, name, {"atoms": [{"z": [complex(z).real, complex(z).imag], "w": w} for z, w in atoms]})


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestRoundTrip:
    def test_domain(self):
        dom = CircularDomain(Circle(1j, 2.0), (Circle(0.5j, 0.3),))
        assert io.domain_from_spec(io.domain_to_spec(dom)) == dom

    def test_measure(self):
        mu = AtomicMeasure([0.1 + 0.2j, -0.3], [0.5, 2.0])
        back = io.measure_from_spec(json.loads(io.dumps(io.measure_to_spec(mu))))
        assert np.array_equal(back.points, mu.points) and np.array_equal(back.weights, mu.weights)

    def test_maps(self):
        m = Composition((QuadPoly(0.2 - 0.1j), MobiusMap(1, -0.3, -0.3, 1)))
        back = io.map_from_spec(io.map_to_spec(m))
        assert back(0.4 + 0.1j) == m(0.4 + 0.1j)

    def test_openset(self):
        spec = {"components": [ANNULUS, {"outer": {"center": [3, 0], "radius": 1}}], "weights": [0.6, 0.3]}
        G = io.openset_from_spec(spec)
        assert G.weights == (0.6, 0.3)
        assert io.openset_from_spec(spec, [0.5, 0.5]).weights == (0.5, 0.5)

    @pytest.mark.parametrize("bad", [
        {"atoms": [{"z": "x", "w": 1}]},
        {"atoms": [{"z": [0, 0]}]},
        {"atoms": [{"z": [0, 0], "w": "1"}]},
        {"points": []},
    ])
    def test_bad_measures(self, bad):
        with pytest.raises(SpecError):
            io.measure_from_spec(bad)

    def test_unknown_map_kind(self):
        with pytest.raises(SpecError):
            io.map_from_spec({"kind": "exp"})


class TestCli:
    def test_annulus_box(self, tmp_path, capsys):
        d = put(tmp_path, "d.json", ANNULUS)
        m = measure_file(tmp_path, "m.json", [(0.3, 1.0)])
        code, out, _ = run(capsys, "box", "--domain", d, "--measure", m)
        rep = json.loads(out)
        assert code == 0
        assert rep["kappa"] == pytest.approx(24.0, rel=1e-14)
        assert rep["witness"]["boundary_index"] == 1

    def test_empty_measure(self, tmp_path, capsys):
        code, out, _ = run(capsys, "box", "--measure", put(tmp_path, "m.json", {"atoms": []}))
        assert code == 0 and json.loads(out)["kappa"] == 0.0

    def test_malformed_json(self, tmp_path, capsys):
        bad = put(tmp_path, "bad.json", '{"atoms": [\n  {"z": [0, 0], "w": 1,}\n]}')
        code, _, err = run(capsys, "box", "--measure", bad)
        assert code == 2
        assert "line 2 column" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, _ = run(capsys, "box", "--measure", str(tmp_path / "nope.json"))
        assert code == 2

    def test_atom_outside_domain(self, tmp_path, capsys):
        code, _, err = run(capsys, "box", "--measure", measure_file(tmp_path, "m.json", [(1.5, 1.0)]))
        assert code == 2 and err.startswith("error:")

    def test_numerical_failure(self, tmp_path, capsys):
        inv = put(tmp_path, "inv.json", {"kind": "mobius", "coeffs": [0, 1, 1, 0]})
        code, _, err = run(capsys, "pushforward", "--map", inv, "--measure", measure_file(tmp_path, "m.json", [(0, 1.0)]))
        assert code == 3 and "numerical failure" in err

    def test_bad_q(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["constant", "--q", "0.5", "--measure", "m.json"])
        assert exc.value.code == 2

    def test_constant_point_mass(self, tmp_path, capsys):
        code, out, _ = run(capsys, "constant", "--measure", measure_file(tmp_path, "m.json", [(0, 1.0)]), "--q", "4")
        assert code == 0 and json.loads(out)["c_hat"] == pytest.approx(1.0, abs=1e-9)

    def test_family_writes_trend_and_csv(self, tmp_path, capsys):
        ms = [measure_file(tmp_path, f"m{k}.json", [(1 - 2.0**-k, 2.0 ** (-k / 2))]) for k in range(3, 9)]
        out = tmp_path / "fam.json"
        args = ["box", "--out", str(out)]
        for m in ms:
            args += ["--measure", m]
        assert run(capsys, *args)[0] == 0
        payload = json.loads(out.read_text())
        assert payload["trend"]["classification"] == "divergent"
        with open(tmp_path / "fam.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["index", "value"] and len(rows) == 7
        assert float(rows[1][1]) == pytest.approx(2**1.5)

    def test_harmonic_is_reproducible(self, tmp_path, capsys):
        d = put(tmp_path, "d.json", ANNULUS)
        args = ["harmonic", "--domain", d, "--point", "0.5", "--walks", "10000", "--seed", "7", "--arcs", "4"]
        a = run(capsys, *args)[1]
        b = run(capsys, *args)[1]
        assert a == b
        probs = json.loads(a)["probabilities"]
        assert len(probs) == 8 and sum(probs) == pytest.approx(1.0)

    def test_harmonic_exact(self, tmp_path, capsys):
        d = put(tmp_path, "d.json", {"outer": {"center": [0, 0], "radius": 1}})
        code, out, _ = run(capsys, "harmonic", "--domain", d, "--point", "0", "--exact", "--arcs", "4")
        assert code == 0 and json.loads(out)["probabilities"] == pytest.approx([0.25] * 4, abs=1e-12)

    def test_harmonic_point_outside(self, tmp_path, capsys):
        d = put(tmp_path, "d.json", ANNULUS)
        assert run(capsys, "harmonic", "--domain", d, "--point", "0.1")[0] == 2

    def test_pushforward_identity_and_reload(self, tmp_path, capsys):
        ident = put(tmp_path, "id.json", {"kind": "mobius", "coeffs": [1, 0, 0, 1]})
        m = measure_file(tmp_path, "m.json", [(0.2 + 0.1j, 1.0), (-0.4j, 0.5)])
        out = tmp_path / "out.json"
        assert run(capsys, "pushforward", "--map", ident, "--measure", m, "--out", str(out))[0] == 0
        back = io.load(out, io.measure_from_spec)
        assert np.array_equal(back.points, io.load(m, io.measure_from_spec).points)

    def test_pushforward_through_chart(self, tmp_path, capsys):
        d = put(tmp_path, "p.json", {"base": {"outer": {"center": [0, 0], "radius": 1}},
                                     "chart": {"kind": "quadpoly", "beta": [0.3, 0]}})
        code, out, _ = run(capsys, "pushforward", "--domain", d, "--measure", measure_file(tmp_path, "m.json", [(0.65, 1.0)]))
        assert code == 0
        z = io.measure_from_spec(json.loads(out)).points[0]
        assert z + 0.3 * z**2 == pytest.approx(0.65, abs=1e-12)

    def test_openset(self, tmp_path, capsys):
        comps = [{"outer": {"center": [3 * n, 0], "radius": 1}} for n in range(3)]
        G = put(tmp_path, "g.json", {"components": comps})
        m = measure_file(tmp_path, "m.json", [(0, 0.25), (3, 1 / 16), (6, 1 / 64)])
        code, out, _ = run(capsys, "openset", "--openset", G, "--measure", m, "--q", "1")
        rep = json.loads(out)
        assert code == 0 and rep["c_star"] == 0.5 and rep["verdict"] == "PASS"
        code, out, _ = run(capsys, "openset", "--openset", G, "--measure", m, "--q", "1", "--weights", "0.25,0.25,0.25")
        assert json.loads(out)["c_star"] == 1.0

    def test_openset_bad_weights(self, tmp_path, capsys):
        comps = [{"outer": {"center": [3 * n, 0], "radius": 1}} for n in range(2)]
        G = put(tmp_path, "g.json", {"components": comps})
        m = measure_file(tmp_path, "m.json", [(0, 1.0)])
        assert run(capsys, "openset", "--openset", G, "--measure", m, "--weights", "0.9,0.9")[0] == 2

    def test_suite_pass_and_injected_failure(self, capsys):
        code, out, err = run(capsys, "suite", "--battery", "homogeneity")
        assert code == 0 and "PASS" in err and json.loads(out)["passed"]
        code, out, err = run(capsys, "suite", "--battery", "homogeneity", "--tolerance", "homogeneity=-1")
        assert code == 1 and "FAIL" in err
        assert json.loads(out)["batteries"][0]["passed"] is False

    def test_suite_bad_tolerance_name(self, capsys):
        assert run(capsys, "suite", "--tolerance", "nonsense=1")[0] == 2
