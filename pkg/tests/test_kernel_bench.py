import numpy as np

from gatepilot.kernel_bench import available_backends, run_kernel_bench, \
    write_kernel_bench_csv

KERNELS = ("rgb_to_ycbcr", "color_mask", "search_vertical",
           "search_horizontal", "patch_centroid", "edge_fitness",
           "column_counts", "raycast_gates")


def test_python_backend_always_available():
    names = [n for n, _ in available_backends()]
    assert "python" in names


def test_rows_cover_all_kernels_and_backends():
    rows = run_kernel_bench(repeats=1, width=120, height=80)
    backends = [n for n, _ in available_backends()]
    assert len(rows) == len(KERNELS) * len(backends)
    seen = {(k, b) for k, b, _ in rows}
    for k in KERNELS:
        for b in backends:
            assert (k, b) in seen
    assert all(ms > 0 and np.isfinite(ms) for _, _, ms in rows)


def test_csv_format(tmp_path):
    rows = [("color_mask", "python", 1.234567)]
    path = tmp_path / "kb.csv"
    write_kernel_bench_csv(path, rows)
    lines = path.read_text().splitlines()
    assert lines[0] == "kernel,backend,ms_per_call"
    assert lines[1] == "color_mask,python,1.23457"
