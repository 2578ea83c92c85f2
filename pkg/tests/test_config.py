import pytest

from mhdlimit.config import ConfigError, RunConfig, load_config, parse_config, serialize_config
from mhdlimit.littlewood_paley import BesovIndex


class TestDefaults:
    def test_values(self):
        cfg = RunConfig()
        assert (cfg.grid.d, cfg.grid.n) == (2, 64)
        assert cfg.data.gamma == 6.5 and cfg.data.band == (1.0, 8.0)
        assert cfg.sweep.values == tuple(0.1 * 2.0**-k for k in range(1, 7))
        assert cfg.norms.s == 2.5

    def test_output_dir_precedence(self, monkeypatch):
        monkeypatch.delenv("MHDLIMIT_OUT", raising=False)
        assert RunConfig().output_dir() == "mhdlimit-out"
        monkeypatch.setenv("MHDLIMIT_OUT", "/tmp/env")
        assert RunConfig().output_dir() == "/tmp/env"
        assert RunConfig().with_values({"output.dir": "here"}).output_dir() == "here"


class TestParse:
    def test_full_example(self):
        text = """
        # comment line
        grid.n = 32          # trailing comment
        solver.mu = 0.01
        solver.t_end = 1
        norms.indices = 2.5,2,2; 2.1,4,2
        sweep.values = 0.1, 0.05, 0.025
        data.band = 1, 6
        """
        cfg = parse_config(text)
        assert cfg.grid.n == 32 and cfg.solver.mu == 0.01 and cfg.solver.t_end == 1.0
        assert cfg.norms.indices == (BesovIndex(2.5, 2, 2), BesovIndex(2.1, 4, 2))
        assert cfg.sweep.values == (0.1, 0.05, 0.025)
        assert cfg.data.band == (1.0, 6.0)

    def test_empty_gives_defaults(self):
        assert parse_config("") == RunConfig()

    @pytest.mark.parametrize("text,key", [
        ("grid.n = 12", "grid.n"),
        ("grid.n = abc", "grid.n"),
        ("grid.d = 4", "grid.d"),
        ("solver.mu = -1", "solver.mu"),
        ("solver.t_end = 0", "solver.t_end"),
        ("solver.dt = nan", "solver.dt"),
        ("sweep.kind = bogus", "sweep.kind"),
        ("sweep.values = 0.01, 0.02", "sweep.values"),
        ("sweep.perturb = w", "sweep.perturb"),
        ("data.gamma = 0", "data.gamma"),
        ("data.band = 1, 30", "data.band"),
        ("norms.indices = 1,2", "norms.indices"),
        ("run.jobs = 0", "run.jobs"),
        ("nope.x = 1", "nope.x"),
        ("grid.q = 1", "grid.q"),
        ("grid.n = 32\ngrid.n = 64", "grid.n"),
        ("just text", "line 1"),
    ])
    def test_errors_name_the_key(self, text, key):
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert err.value.key == key
        assert str(err.value).startswith(key)

    def test_round_trip(self):
        cfg = RunConfig().with_values({"solver.mu": "0.0123456789012345", "norms.indices": "2.5,2,2;2.1,4,2",
                                       "output.dir": "x"})
        assert parse_config(serialize_config(cfg)) == cfg

    def test_load(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("grid.n = 16\ndata.band = 1,5\n")
        assert load_config(p).grid.n == 16

    def test_solver_config(self):
        sc = RunConfig().with_values({"solver.nu": "0.2"}).solver_config(0.01, 5)
        assert sc.nu == 0.2 and sc.dt == 0.01 and sc.snapshot_stride == 5
