import json

import numpy as np
import pytest

from bosonlab import (
    FormatError,
    HashMismatchWarning,
    ParseError,
    ProfileRecord,
    RadialGrid,
    RadialProfile,
    RunConfig,
    ValidationError,
    config_hash,
    load_profile,
    parse_config,
    save_profile,
    serialize,
)


class TestConfigParsing:
    def test_empty_file_gives_defaults(self, tmp_path):
        p = tmp_path / "empty.cfg"
        p.write_text("")
        cfg = parse_config(p)
        assert cfg == RunConfig()
        assert cfg.grid_n == 2048
        assert cfg.solver_tol == 1e-10
        assert cfg.linearization_ell_max == 3

    def test_comments_and_values(self, tmp_path):
        p = tmp_path / "a.cfg"
        p.write_text("# a comment\ngrid.n = 512  # trailing\nsolver.init = ball\n")
        cfg = parse_config(p)
        assert cfg.grid_n == 512
        assert cfg.solver_init == "ball"

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "a.cfg"
        p.write_text("grid.m = 3\n")
        with pytest.raises(ValidationError) as ei:
            parse_config(p)
        assert "grid.m" in str(ei.value)

    def test_negative_n_rejected(self, tmp_path):
        p = tmp_path / "a.cfg"
        p.write_text("grid.n = -5\n")
        with pytest.raises(ValidationError) as ei:
            parse_config(p)
        assert "grid.n" in str(ei.value)

    def test_bad_number_parse_error(self, tmp_path):
        p = tmp_path / "a.cfg"
        p.write_text("grid.n = twelve\n")
        with pytest.raises(ParseError) as ei:
            parse_config(p)
        assert ei.value.line == 1

    def test_missing_equals(self, tmp_path):
        p = tmp_path / "a.cfg"
        p.write_text("grid.n\n")
        with pytest.raises(ParseError):
            parse_config(p)

    def test_serialize_round_trip(self, tmp_path):
        p = tmp_path / "a.cfg"
        p.write_text("grid.n=300\ntgrid.t_max = 12.5\n")
        cfg = parse_config(p)
        q = tmp_path / "b.cfg"
        q.write_text(serialize(cfg))
        assert parse_config(q) == cfg
        assert serialize(parse_config(q)) == serialize(cfg)

    def test_hash_tracks_content(self):
        a = RunConfig()
        b = a.with_overrides(grid_n=1024)
        assert config_hash(a) != config_hash(b)
        assert config_hash(a) == config_hash(RunConfig())

    def test_overrides_skip_none(self):
        cfg = RunConfig().with_overrides(grid_n=None, solver_seed=11)
        assert cfg.grid_n == 2048 and cfg.solver_seed == 11


class TestProfileRoundTrip:
    def _record(self):
        g = RadialGrid(64, 20.0)
        rng = np.random.default_rng(0)
        prof = RadialProfile(g, np.exp(-g.r) * (1 + 0.01 * rng.standard_normal(64)))
        return ProfileRecord(
            profile=prof, kind="test", eigenvalue=1.0, mass=2.5,
            residual=1e-11, config_hash="cafe0123",
        )

    def test_bit_exact_round_trip(self, tmp_path):
        rec = self._record()
        path = tmp_path / "prof.csv"
        save_profile(rec, path)
        back = load_profile(path)
        assert np.array_equal(back.profile.values, rec.profile.values)
        assert back.kind == "test"
        assert back.profile.grid == rec.profile.grid

    def test_truncated_file(self, tmp_path):
        rec = self._record()
        path = tmp_path / "prof.csv"
        save_profile(rec, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-5]) + "\n")
        with pytest.raises(FormatError):
            load_profile(path)

    def test_bad_header(self, tmp_path):
        rec = self._record()
        path = tmp_path / "prof.csv"
        save_profile(rec, path)
        body = path.read_text().replace("r,value", "radius,val", 1)
        path.write_text(body)
        with pytest.raises(FormatError):
            load_profile(path)

    def test_missing_sidecar(self, tmp_path):
        rec = self._record()
        path = tmp_path / "prof.csv"
        save_profile(rec, path)
        path.with_suffix(".json").unlink()
        with pytest.raises(FormatError):
            load_profile(path)

    def test_hash_mismatch_warns(self, tmp_path):
        rec = self._record()
        path = tmp_path / "prof.csv"
        save_profile(rec, path)
        sidecar = path.with_suffix(".json")
        meta = json.loads(sidecar.read_text())
        meta["config_hash"] = "deadbeef"
        sidecar.write_text(json.dumps(meta))
        with pytest.warns(HashMismatchWarning):
            load_profile(path, expected_hash="cafe0123")

    def test_matching_hash_silent(self, tmp_path, recwarn):
        rec = self._record()
        path = tmp_path / "prof.csv"
        save_profile(rec, path)
        load_profile(path, expected_hash="cafe0123")
        assert not any(
            isinstance(w.message, HashMismatchWarning) for w in recwarn.list
        )
