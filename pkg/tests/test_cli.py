from emberfield.cli import main


def test_gen_and_ingest(tmp_path, capsys):
    out = tmp_path / "scn"
    assert main(["gen", "--out", str(out), "--seed", "3", "--width", "16",
                 "--height", "16", "--frames", "2"]) == 0
    assert (out / "scenario.json").is_file()
    assert (out / "stations.json").is_file()
    assert main(["ingest", "--scenario", str(out)]) == 0
    captured = capsys.readouterr()
    assert "flux extrema" in captured.out
    assert (out / "extrema.json").is_file()


def test_render_kinds(tmp_path):
    out = tmp_path / "scn"
    main(["gen", "--out", str(out), "--seed", "3", "--width", "12",
          "--height", "12", "--frames", "1"])
    for kind in ("thermal", "intensity", "fuel", "fused"):
        target = tmp_path / f"{kind}.ppm"
        assert main(["render", "--scenario", str(out), "--kind", kind,
                     "--frame", "0", "--out", str(target)]) == 0
        assert target.read_bytes().startswith(b"P6\n")
    png = tmp_path / "fuel.png"
    assert main(["render", "--scenario", str(out), "--kind", "fuel",
                 "--out", str(png)]) == 0
    assert png.read_bytes().startswith(b"\x89PNG")


def test_render_depth_f32(tmp_path):
    out = tmp_path / "scn"
    main(["gen", "--out", str(out), "--seed", "3", "--width", "12",
          "--height", "12", "--frames", "1"])
    target = tmp_path / "depth.f32"
    assert main(["render", "--scenario", str(out), "--kind", "depth",
                 "--out", str(target), "--width", "9", "--height", "9",
                 "--cam-x", "1500", "--cam-y", "1500"]) == 0
    assert target.stat().st_size == 9 * 9 * 4


def test_forest_digest_stable(tmp_path, capsys):
    out = tmp_path / "scn"
    main(["gen", "--out", str(out), "--seed", "3", "--width", "8",
          "--height", "8", "--frames", "1"])
    assert main(["forest", "--scenario", str(out), "--seed", "4"]) == 0
    first = capsys.readouterr().out
    assert main(["forest", "--scenario", str(out), "--seed", "4", "--parallel"]) == 0
    second = capsys.readouterr().out
    d1 = [l for l in first.splitlines() if l.startswith("digest:")]
    d2 = [l for l in second.splitlines() if l.startswith("digest:")]
    assert d1 == d2


def test_bench_runs(capsys):
    assert main(["bench", "--emitters", "900", "--frames", "5",
                 "--max-active", "128"]) == 0
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert lines[0].startswith("frame\tms\t")
    assert len(lines) == 1 + 5  # header + one line per frame
    assert "median_ms" in out
