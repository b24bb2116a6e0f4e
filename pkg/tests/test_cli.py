"""The command-line surface: verbs, formats, exit codes, config, caching."""

import io
import json
import os

import pytest

from qkgr import bethe, cli, products
from qkgr.bethe import BetheRoot
from qkgr.localization import opposite_class, qk_pairing, restrict
from qkgr.scalars import CoeffRing, LaurentScalar, QKValue, RatScalar
from qkgr.shapes import BoxPartition
from qkgr.vertex import ModuleElement, transfer
from qkgr.weyl import apply_rho


def run_cli(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run_cli(*argv)
    assert code == 0, text
    return json.loads(text)


class TestParsing:
    def test_partition_strings(self):
        assert cli.parse_parts("2,1") == (2, 1)
        assert cli.parse_parts("") == ()
        assert cli.parse_parts(" 3 1 ") == (3, 1)
        with pytest.raises(cli.UsageError):
            cli.parse_parts("a,b")

    def test_partition_outside_the_box_is_a_usage_error(self):
        code, _ = run_cli("product", "--n", "2", "--k", "1",
                          "--a", "3", "--b", "1")
        assert code == 2

    def test_bad_ranks_are_a_usage_error(self):
        code, _ = run_cli("product", "--n", "2", "--k", "2",
                          "--a", "", "--b", "")
        assert code == 2

    def test_unknown_verb_is_a_usage_error(self):
        code, _ = run_cli("unknown-verb")
        assert code == 2


class TestProductVerb:
    def test_box_squared_on_the_projective_line(self):
        doc = run_json("product", "--n", "2", "--k", "1",
                       "--a", "1", "--b", "1")
        got = ModuleElement.from_json(doc)
        a = ModuleElement.basis(1, 2, BoxPartition(1, 2, (1,)))
        assert (got - products.qk_product(a, a)).is_zero()

    def test_output_is_deterministic(self):
        _, first = run_cli("product", "--n", "3", "--k", "1",
                           "--a", "2", "--b", "1")
        _, second = run_cli("product", "--n", "3", "--k", "1",
                            "--a", "2", "--b", "1")
        assert first == second

    def test_text_format(self):
        code, text = run_cli("product", "--n", "2", "--k", "1",
                             "--a", "1", "--b", "1", "--format", "text")
        assert code == 0
        assert "O_(1)" in text and "q" in text

    def test_latex_format(self):
        code, text = run_cli("product", "--n", "2", "--k", "1",
                             "--a", "1", "--b", "1", "--format", "latex")
        assert code == 0
        assert "\\mathcal{O}" in text and "\\varepsilon" in text


class TestTransferVerb:
    def test_full_transfer_matches_the_library(self):
        doc = run_json("transfer", "--n", "2", "--k", "1", "--lambda", "")
        got = ModuleElement.from_json(doc)
        r = CoeffRing(2)
        want = transfer(r.y(), ModuleElement.basis(1, 2, BoxPartition(1, 2)))
        assert (got - want).is_zero()

    def test_monodromy_entry(self):
        doc = run_json("transfer", "--n", "2", "--k", "1", "--lambda", "",
                       "--entry", "00")
        got = ModuleElement.from_json(doc)
        assert not got.is_zero()


class TestActVerb:
    def test_rotation_on_the_empty_class(self):
        doc = run_json("act", "--n", "2", "--k", "1", "--lambda", "",
                       "--word", "rho")
        got = ModuleElement.from_json(doc)
        want = ModuleElement.basis(1, 2, BoxPartition(1, 2, (1,)))
        assert (got - want).is_zero()

    def test_rotation_on_the_box_picks_up_a_q(self):
        doc = run_json("act", "--n", "2", "--k", "1", "--lambda", "1",
                       "--word", "rho")
        got = ModuleElement.from_json(doc)
        r = CoeffRing(2)
        want = ModuleElement.basis(1, 2, BoxPartition(1, 2)).scale(r.q())
        assert (got - want).is_zero()

    def test_second_translation_on_the_empty_class(self):
        doc = run_json("act", "--n", "2", "--k", "1", "--lambda", "",
                       "--word", "t2")
        got = ModuleElement.from_json(doc)
        want = ModuleElement.basis(1, 2, BoxPartition(1, 2, (1,)))
        assert (got - want).is_zero()

    def test_translation_inverse_pair_is_the_identity(self):
        doc = run_json("act", "--n", "3", "--k", "1", "--lambda", "2",
                       "--word", "t1 t1-")
        got = ModuleElement.from_json(doc)
        want = ModuleElement.basis(1, 3, BoxPartition(1, 3, (2,)))
        assert (got - want).is_zero()

    def test_word_order_is_rightmost_first(self):
        doc = run_json("act", "--n", "2", "--k", "1", "--lambda", "",
                       "--word", "s1 rho")
        got = ModuleElement.from_json(doc)
        r = CoeffRing(2)
        want = cli.apply_simple(1, apply_rho(
            ModuleElement.basis(1, 2, BoxPartition(1, 2)), q_val=r.q()))
        assert (got - want).is_zero()

    def test_empty_word_is_a_usage_error(self):
        code, _ = run_cli("act", "--n", "2", "--k", "1", "--lambda", "",
                          "--word", "  ")
        assert code == 2

    def test_unknown_generator_is_a_usage_error(self):
        code, _ = run_cli("act", "--n", "2", "--k", "1", "--lambda", "",
                          "--word", "z9")
        assert code == 2


class TestPairVerb:
    def test_opposite_box_against_the_box(self):
        doc = run_json("pair", "--n", "2", "--k", "1", "--a", "1",
                       "--b", "1", "--opposite-a")
        val = QKValue.from_json(doc)
        box = BoxPartition(1, 2, (1,))
        want = qk_pairing(opposite_class(box), ModuleElement.basis(1, 2, box))
        assert val == want
        assert doc["den_pow"] == 1
        assert val.is_single_monomial_over_1mq() == (1, rat_one(2))

    def test_class_against_the_unit(self):
        doc = run_json("pair", "--n", "2", "--k", "1", "--a", "1", "--b", "")
        val = QKValue.from_json(doc)
        assert val.is_single_monomial_over_1mq() == (0, rat_one(2))


def rat_one(n):
    return RatScalar.from_laurent(CoeffRing(n).one())


class TestBetheVerb:
    def test_first_order_root_on_the_projective_line(self):
        doc = run_json("bethe", "--n", "2", "--k", "1", "--lambda", "",
                       "--order", "1")
        root = BetheRoot.from_json(1, 2, doc)
        r = CoeffRing(2)
        x = root.roots[0]
        assert rat(x.coefficient(0)) == rat(r.eps(1))
        assert x.coefficient(1) == RatScalar(r.eps(1) * r.eps(2),
                                             r.eps(1) - r.eps(2))

    def test_cache_dir_round_trip(self, tmp_path):
        args = ("bethe", "--n", "2", "--k", "1", "--lambda", "",
                "--order", "1", "--cache-dir", str(tmp_path))
        _, first = run_cli(*args)
        path = bethe.cache_path(str(tmp_path), 1, 2, 1)
        assert os.path.exists(path)
        _, second = run_cli(*args)
        assert first == second


def rat(value):
    if isinstance(value, LaurentScalar):
        return RatScalar.from_laurent(value)
    return value


class TestLocalizeVerb:
    def test_restriction_values(self):
        doc = run_json("localize", "--n", "2", "--k", "1", "--lambda", "1")
        rows = {tuple(item["at"]): LaurentScalar.from_json(item["value"])
                for item in doc["restrictions"]}
        lam = BoxPartition(1, 2, (1,))
        assert rows[()] == CoeffRing(2).zero()
        assert rows[(1,)] == restrict(lam, lam)

    def test_single_point_flag(self):
        doc = run_json("localize", "--n", "2", "--k", "1", "--lambda", "1",
                       "--at", "1")
        assert len(doc["restrictions"]) == 1


class TestVerifyVerb:
    def test_all_suites_pass_at_small_rank(self):
        doc = run_json("verify", "--suite", "all", "--n-max", "3",
                       "--q-order", "2")
        assert doc["failures"] == 0
        assert len(doc["checks"]) > 20
        assert all(c["ok"] for c in doc["checks"])

    def test_single_suite_selection(self):
        doc = run_json("verify", "--suite", "rings", "--n-max", "2")
        assert {c["name"] for c in doc["checks"]} == {
            "rings/functional", "rings/whitney", "rings/wedge-duality"}

    def test_text_report(self):
        code, text = run_cli("verify", "--suite", "rings", "--n-max", "2",
                             "--format", "text")
        assert code == 0
        assert "0 failures" in text

    def test_too_small_rank_bound(self):
        code, _ = run_cli("verify", "--suite", "rings", "--n-max", "1")
        assert code == 2


class TestCacheVerb:
    def test_write_then_verify(self, tmp_path):
        code, _ = run_cli("cache", "--n", "2", "--k", "1", "--dir",
                          str(tmp_path), "--action", "write", "--order", "1")
        assert code == 0
        assert os.path.exists(bethe.cache_path(str(tmp_path), 1, 2, 1))
        assert os.path.exists(products.structure_path(str(tmp_path), 1, 2))
        doc = run_json("cache", "--n", "2", "--k", "1", "--dir",
                       str(tmp_path), "--action", "verify", "--order", "1")
        assert doc["identical"] is True

    def test_doctored_file_fails_verification(self, tmp_path):
        run_cli("cache", "--n", "2", "--k", "1", "--dir", str(tmp_path),
                "--action", "write", "--order", "1")
        path = bethe.cache_path(str(tmp_path), 1, 2, 1)
        with open(path) as fh:
            doc = json.load(fh)
        coef = doc["roots"][0]["roots"][0]["coeffs"][0]["num"]["terms"][0]
        coef["coef"] = str(int(coef["coef"]) + 1)
        with open(path, "w") as fh:
            json.dump(doc, fh)
        code, _ = run_cli("cache", "--n", "2", "--k", "1", "--dir",
                          str(tmp_path), "--action", "verify",
                          "--order", "1")
        assert code == 3

    def test_clear_removes_the_box_directory(self, tmp_path):
        run_cli("cache", "--n", "2", "--k", "1", "--dir", str(tmp_path),
                "--action", "write", "--order", "1")
        doc = run_json("cache", "--n", "2", "--k", "1", "--dir",
                       str(tmp_path), "--action", "clear")
        assert doc["removed"] is True
        code, _ = run_cli("cache", "--n", "2", "--k", "1", "--dir",
                          str(tmp_path), "--action", "verify",
                          "--order", "1")
        assert code == 2

    def test_missing_directory_is_a_usage_error(self, monkeypatch):
        monkeypatch.delenv("QKGR_CACHE_DIR", raising=False)
        monkeypatch.delenv("QKGR_CONFIG", raising=False)
        code, _ = run_cli("cache", "--n", "2", "--k", "1",
                          "--action", "write")
        assert code == 2


class TestConfig:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("QKGR_CACHE_DIR", raising=False)
        monkeypatch.delenv("QKGR_CONFIG", raising=False)
        cfg = cli.load_config()
        assert cfg == {"n_max": 3, "q_order": 2, "cache_dir": None}

    def test_file_overrides_defaults(self, tmp_path, monkeypatch):
        monkeypatch.delenv("QKGR_CACHE_DIR", raising=False)
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"n_max": 2, "q_order": 1}))
        cfg = cli.load_config(str(conf))
        assert cfg["n_max"] == 2 and cfg["q_order"] == 1

    def test_environment_locates_the_file(self, tmp_path, monkeypatch):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"cache_dir": str(tmp_path / "boxes")}))
        monkeypatch.setenv("QKGR_CONFIG", str(conf))
        monkeypatch.delenv("QKGR_CACHE_DIR", raising=False)
        cfg = cli.load_config()
        assert cfg["cache_dir"] == str(tmp_path / "boxes")

    def test_environment_overrides_the_cache_path(self, tmp_path,
                                                  monkeypatch):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"cache_dir": "/nowhere"}))
        monkeypatch.setenv("QKGR_CONFIG", str(conf))
        monkeypatch.setenv("QKGR_CACHE_DIR", str(tmp_path))
        cfg = cli.load_config()
        assert cfg["cache_dir"] == str(tmp_path)

    def test_config_defaults_flow_into_verbs(self, tmp_path, monkeypatch):
        monkeypatch.delenv("QKGR_CACHE_DIR", raising=False)
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps(
            {"q_order": 1, "cache_dir": str(tmp_path / "boxes")}))
        code, _ = run_cli("bethe", "--n", "2", "--k", "1", "--lambda", "",
                          "--config", str(conf))
        assert code == 0
        assert os.path.exists(
            bethe.cache_path(str(tmp_path / "boxes"), 1, 2, 1))

    def test_broken_config_is_a_usage_error(self, tmp_path):
        conf = tmp_path / "conf.json"
        conf.write_text("{not json")
        code, _ = run_cli("verify", "--suite", "rings", "--n-max", "2",
                          "--config", str(conf))
        assert code == 2
