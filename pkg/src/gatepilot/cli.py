"""Command-line front end wiring all the pieces together.

Subcommands: gen-corpus, detect, roc, pose-bench, ekf-replay,
feasibility, race, kernel-bench. Every command takes --config/--seed/
--out, echoes the resolved configuration it ran with into the output
directory, and emits plain CSV artifacts so a re-run with the same
config and seed is byte-for-byte comparable.

Exit codes: 0 success, 2 configuration invalid, 1 runtime failure.
"""

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import ekf
from ._kernels import BACKEND
from .config import echo_config, load_config
from .control import feasibility_region, write_boundary_csv, \
    write_feasibility_csv
from .detect import evaluate_roc, evaluate_tpr_by_distance, \
    snake_gate_detect
from .errors import ConfigError, CorpusError, GatepilotError
from .imaging import generate_corpus, read_ppm
from .kernel_bench import run_kernel_bench, write_kernel_bench_csv
from .pose import histogram_noise_benchmark, pose_noise_benchmark
from .racesim import run_race, write_race_summary


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _out_path(cfg, name):
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


# -- gen-corpus ----------------------------------------------------------

def cmd_gen_corpus(cfg, args):
    n = cfg.corpus["n_images"] if args.n_images is None else args.n_images
    if n < 0:
        raise ConfigError(f"n_images must be >= 0: {n}")
    corpus_dir = args.corpus_dir or _out_path(cfg, "corpus")
    kw = dict(cfg.corpus)
    kw.pop("n_images")
    kw["distance_range"] = tuple(kw["distance_range"])
    kw["clutter_size_range"] = tuple(kw["clutter_size_range"])
    kw["exposure_range"] = tuple(kw["exposure_range"])
    manifest = generate_corpus(corpus_dir, n, cfg.camera, seed=cfg.seed,
                               **kw)
    echo_config(cfg, cfg.out)
    print("wrote %d images to %s (seed %d)"
          % (len(manifest["images"]), corpus_dir, cfg.seed))
    return 0


# -- detect --------------------------------------------------------------

def cmd_detect(cfg, args):
    if not os.path.exists(args.image):
        raise CorpusError(f"image not found: {args.image}")
    img = read_ppm(args.image)
    params = replace(cfg.detector, seed=cfg.seed)
    dets = snake_gate_detect(img, params, cfg.bounds)
    csv_path = args.csv or _out_path(cfg, "detections.csv")
    with open(csv_path, "w", newline="") as fh:
        fh.write("det,u_tl,v_tl,u_tr,v_tr,u_bl,v_bl,u_br,v_br,cf\n")
        for i, det in enumerate(dets):
            coords = ",".join("%.10g" % v for v in det.corners.ravel())
            fh.write("%d,%s,%.10g\n" % (i, coords, det.cf))
    echo_config(cfg, cfg.out)
    for i, det in enumerate(dets):
        c = det.corners
        print("det %d: cf=%.3f TL(%.1f,%.1f) TR(%.1f,%.1f) "
              "BL(%.1f,%.1f) BR(%.1f,%.1f)"
              % (i, det.cf, c[0, 0], c[0, 1], c[1, 0], c[1, 1],
                 c[2, 0], c[2, 1], c[3, 0], c[3, 1]))
    print("%d detection(s) in %s -> %s" % (len(dets), args.image, csv_path))
    return 0


# -- roc -----------------------------------------------------------------

def _ensure_corpus(cfg, corpus_dir):
    if not os.path.exists(os.path.join(corpus_dir, "manifest.json")):
        kw = dict(cfg.corpus)
        n = kw.pop("n_images")
        kw["distance_range"] = tuple(kw["distance_range"])
        kw["clutter_size_range"] = tuple(kw["clutter_size_range"])
        kw["exposure_range"] = tuple(kw["exposure_range"])
        generate_corpus(corpus_dir, n, cfg.camera, seed=cfg.seed, **kw)
        print("generated %d-image corpus in %s (seed %d)"
              % (n, corpus_dir, cfg.seed))
    return corpus_dir


def cmd_roc(cfg, args):
    corpus_dir = _ensure_corpus(cfg, args.corpus_dir
                                or _out_path(cfg, "corpus"))
    base = replace(cfg.detector, seed=cfg.seed)
    rows = evaluate_roc(corpus_dir, args.sigma_l, args.sigma_cf,
                        args.repeats, cfg.bounds, base,
                        match_tol=args.match_tol)
    roc_path = _out_path(cfg, "roc.csv")
    with open(roc_path, "w", newline="") as fh:
        fh.write("sigma_l,sigma_cf,tpr,fp_per_image\n")
        for sl, scf, tpr, fp in rows:
            fh.write("%.10g,%.10g,%.10g,%.10g\n" % (sl, scf, tpr, fp))

    edges = args.bins
    centers, tpr_d = evaluate_tpr_by_distance(corpus_dir, edges,
                                              args.repeats, cfg.bounds,
                                              base,
                                              match_tol=args.match_tol)
    dist_path = _out_path(cfg, "tpr_distance.csv")
    with open(dist_path, "w", newline="") as fh:
        fh.write("distance,tpr\n")
        for c, t in zip(centers, tpr_d):
            fh.write("%.10g,%s\n" % (c, "" if math.isnan(t)
                                     else "%.10g" % t))
    echo_config(cfg, cfg.out)

    for sl, scf, tpr, fp in rows:
        print("sigma_L=%-5g sigma_cf=%-4g  TPR %.3f  FPs/img %.3f"
              % (sl, scf, tpr, fp))
    fps_by_sl = {}
    for sl, _, _, fp in rows:
        fps_by_sl.setdefault(sl, []).append(fp)
    means = [np.mean(fps_by_sl[sl]) for sl in sorted(fps_by_sl)]
    mono = all(b <= a + 1e-12 for a, b in zip(means, means[1:]))
    print("FPs/image non-increasing in sigma_L: %s"
          % ("yes" if mono else "NO"))
    print("wrote %s and %s" % (roc_path, dist_path))
    return 0


# -- pose-bench ----------------------------------------------------------

def cmd_pose_bench(cfg, args):
    rows = pose_noise_benchmark(args.distances, args.pixel_sigma,
                                args.att_noise, args.trials, cfg.seed,
                                cam=cfg.camera)
    bench_path = _out_path(cfg, "pose_bench.csv")
    with open(bench_path, "w", newline="") as fh:
        fh.write("method,distance,att_noise_deg,rmse\n")
        for method, dist, att_deg, rmse in rows:
            fh.write("%s,%.10g,%.10g,%.10g\n"
                     % (method, dist, att_deg, rmse))

    hist_rows = histogram_noise_benchmark(args.hist_distances,
                                          args.headings,
                                          args.pixel_sigma, args.trials,
                                          cfg.seed)
    hist_path = _out_path(cfg, "hist_bench.csv")
    with open(hist_path, "w", newline="") as fh:
        fh.write("distance,heading_deg,rmse\n")
        for dist, hdg, rmse in hist_rows:
            fh.write("%.10g,%.10g,%.10g\n" % (dist, hdg, rmse))
    echo_config(cfg, cfg.out)

    by_cell = {}
    for method, dist, att_deg, rmse in rows:
        by_cell.setdefault((dist, att_deg), {})[method] = rmse
    wins = sum(1 for cell in by_cell.values()
               if cell.get("LS", math.inf) < cell.get("PnP", math.inf))
    for (dist, att_deg), cell in sorted(by_cell.items()):
        print("d=%-4g att=%-3gdeg  LS %.4f m  PnP %.4f m"
              % (dist, att_deg, cell["LS"], cell["PnP"]))
    print("LS beats PnP in %d/%d cells" % (wins, len(by_cell)))
    for dist, hdg, rmse in hist_rows:
        print("histogram d=%-4g heading=%-4gdeg  RMSE %.4f m"
              % (dist, hdg, rmse))
    print("wrote %s and %s" % (bench_path, hist_path))
    return 0


# -- ekf-replay ----------------------------------------------------------

def _synth_hover_log(cfg, t_end, gap, fix_hz=20.0):
    """Stationary-hover IMU log with position fixes and a mid-log
    vision dropout of `gap` seconds."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    noise = cfg.noise
    bias = np.asarray(noise.accel_bias, dtype=float)
    dt = cfg.race.dt_ekf
    n = int(round(t_end / dt))
    every = max(1, int(round(1.0 / (fix_hz * dt))))
    gap_start = 0.5 * (t_end - gap)
    gap_end = gap_start + gap
    sigma_fix = math.sqrt(float(cfg.r_diag[0]))
    records = []
    for i in range(n + 1):
        t = i * dt
        w = rng.normal(0.0, 1.0, 8)
        u = ekf.ImuInput(
            phi=noise.att_sigma * w[0], theta=noise.att_sigma * w[1],
            psi=noise.att_sigma * w[2],
            ax=bias[0] + noise.accel_sigma * w[3],
            ay=bias[1] + noise.accel_sigma * w[4],
            az=-ekf.G + bias[2] + noise.accel_sigma * w[5],
            p=noise.gyro_sigma * w[6], q=noise.gyro_sigma * w[7])
        z = None
        if i % every == 0 and not gap_start <= t < gap_end:
            z = sigma_fix * rng.normal(0.0, 1.0, 3)
        records.append((t, u, z))
    return records


def cmd_ekf_replay(cfg, args):
    if args.log is not None:
        if not os.path.exists(args.log):
            raise CorpusError(f"log file not found: {args.log}")
        records = ekf.read_imu_log(args.log)
        log_path = args.log
    else:
        records = _synth_hover_log(cfg, args.t_end, args.gap)
        log_path = _out_path(cfg, "imu_log.csv")
        ekf.write_imu_log(log_path, records)
        print("synthesized hover log %s (t_end %g s, vision gap %g s)"
              % (log_path, args.t_end, args.gap))
    if not records:
        raise CorpusError(f"log is empty: {log_path}")

    rows = ekf.run_replay(records, cfg.drag, Q=cfg.q_matrix(),
                          R=cfg.r_matrix())
    out_path = _out_path(cfg, "ekf_out.csv")
    ekf.write_filter_output(out_path, rows)
    echo_config(cfg, cfg.out)

    last = rows[-1]
    print("final state t=%.2f  pos (%.3f, %.3f, %.3f)  bias "
          "(%.4f, %.4f, %.4f)" % (last[0], last[1], last[2], last[3],
                                  last[5], last[6], last[7]))
    # the post-dropout correction: largest estimate step at a fix that
    # follows a measurement-free stretch
    jump = 0.0
    t_jump = None
    prev_fix_t = records[0][0] if records[0][2] is not None else None
    for (t, _, z), prev, cur in zip(records[1:], rows, rows[1:]):
        if z is None:
            continue
        if prev_fix_t is not None and t - prev_fix_t > 2.5 / 20.0:
            step = math.dist(cur[1:4], prev[1:4])
            if step > jump:
                jump = step
                t_jump = t
        prev_fix_t = t
    if t_jump is not None:
        print("reacquisition jump: %.3f m at t=%.2f s" % (jump, t_jump))
    print("wrote %s (%d rows)" % (out_path, len(rows)))
    return 0


# -- feasibility ---------------------------------------------------------

def cmd_feasibility(cfg, args):
    half = cfg.track.gates[0].size / 2.0 - cfg.race.drone_radius
    results = []
    for v in args.speeds:
        res = feasibility_region(v, grid_n=args.grid_n,
                                 gate_half_width=half,
                                 k_y=cfg.drag.k_y, k_p=args.k_p,
                                 k_v=args.k_v)
        results.append(res)
        tag = "%.10g" % v
        write_feasibility_csv(_out_path(cfg, f"feasibility_v{tag}.csv"),
                              res)
        write_boundary_csv(_out_path(cfg, f"boundary_v{tag}.csv"), res)
        print("v_x=%-4g  feasible %d/%d cells"
              % (v, int(res.feasible.sum()), res.feasible.size))
    echo_config(cfg, cfg.out)
    for a, b in zip(results, results[1:]):
        extra = int((b.feasible & ~a.feasible).sum())
        frac = extra / b.feasible.size
        print("feasible(v=%g) subset of feasible(v=%g): %d violations "
              "(%.2f%%)" % (b.v_x, a.v_x, extra, 100.0 * frac))
    return 0


# -- race ----------------------------------------------------------------

def cmd_race(cfg, args):
    summaries = []
    for k in range(args.seeds):
        seed = cfg.seed + k
        log = run_race(cfg.track, drag=cfg.drag, cfg=cfg.race,
                       noise=cfg.noise, seed=seed)
        log.write_csv(_out_path(cfg, f"race_seed{seed}.csv"))
        log.write_events(_out_path(cfg, f"race_events_seed{seed}.jsonl"))
        s = log.summary
        summaries.append(s)
        status = "completed" if s["completed"] else \
            (s["crash_reason"] or "incomplete")
        print("seed %d: %d/%d gates, avg %.2f m/s, t_end %.1f s  [%s]"
              % (seed, s["gates_passed"], s["n_gates"], s["avg_speed"],
                 s["t_end"], status))
    write_race_summary(_out_path(cfg, "race_summary.csv"), summaries)
    echo_config(cfg, cfg.out)
    done = sum(1 for s in summaries if s["completed"])
    print("%d/%d runs completed all %d gates"
          % (done, len(summaries), summaries[0]["n_gates"]))
    return 0


# -- kernel-bench --------------------------------------------------------

def cmd_kernel_bench(cfg, args):
    rows = run_kernel_bench(repeats=args.repeats,
                            width=cfg.camera.width,
                            height=cfg.camera.height, seed=cfg.seed)
    path = _out_path(cfg, "kernel_bench.csv")
    write_kernel_bench_csv(path, rows)
    echo_config(cfg, cfg.out)
    by_kernel = {}
    for kernel, backend, ms in rows:
        by_kernel.setdefault(kernel, {})[backend] = ms
    for kernel, per in by_kernel.items():
        line = "%-18s" % kernel
        for backend in sorted(per):
            line += "  %s %8.4f ms" % (backend, per[backend])
        if "native" in per and "python" in per and per["native"] > 0:
            line += "  (%.1fx)" % (per["python"] / per["native"])
        print(line)
    print("active backend: %s; wrote %s" % (BACKEND, path))
    return 0


# -- parser --------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="gatepilot",
        description="gate detection, pose, filtering, control, and race "
                    "simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML config file")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--out", help="override output directory")

    p = sub.add_parser("gen-corpus", help="render a labeled image corpus")
    common(p)
    p.add_argument("-n", "--n-images", type=int, default=None)
    p.add_argument("--corpus-dir", help="corpus directory "
                   "(default <out>/corpus)")
    p.set_defaults(fn=cmd_gen_corpus)

    p = sub.add_parser("detect", help="run the detector on one image")
    common(p)
    p.add_argument("image", help="PPM image path")
    p.add_argument("--csv", help="corner CSV path "
                   "(default <out>/detections.csv)")
    p.set_defaults(fn=cmd_detect)

    p = sub.add_parser("roc", help="ROC sweep over a labeled corpus")
    common(p)
    p.add_argument("--corpus-dir", help="corpus directory "
                   "(default <out>/corpus, generated when missing)")
    p.add_argument("--sigma-l", type=_floats,
                   default=[10.0, 15.0, 20.0, 25.0, 30.0, 40.0],
                   help="comma list of length thresholds")
    p.add_argument("--sigma-cf", type=_floats, default=[0.5],
                   help="comma list of fitness thresholds")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--match-tol", type=float, default=10.0)
    p.add_argument("--bins", type=_floats,
                   default=[1.0, 1.75, 2.5, 3.25, 4.0, 4.75, 5.5],
                   help="distance bin edges for the TPR curve")
    p.set_defaults(fn=cmd_roc)

    p = sub.add_parser("pose-bench",
                       help="LS vs PnP and histogram noise benchmarks")
    common(p)
    p.add_argument("--distances", type=_floats,
                   default=[1.0, 2.0, 3.0, 4.0, 5.0])
    p.add_argument("--att-noise", type=_floats, default=[0.0, 1.0, 2.0],
                   help="attitude noise sigmas, degrees")
    p.add_argument("--pixel-sigma", type=float, default=3.5)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--hist-distances", type=_floats,
                   default=[0.6, 0.9, 1.2, 1.5])
    p.add_argument("--headings", type=_floats, default=[-30.0, 0.0, 30.0],
                   help="relative headings for the histogram bench, "
                        "degrees")
    p.set_defaults(fn=cmd_pose_bench)

    p = sub.add_parser("ekf-replay", help="run the filter over a log")
    common(p)
    p.add_argument("--log", help="IMU log CSV; synthesized when omitted")
    p.add_argument("--t-end", type=float, default=20.0,
                   help="synthetic log length, seconds")
    p.add_argument("--gap", type=float, default=2.0,
                   help="synthetic vision dropout, seconds")
    p.set_defaults(fn=cmd_ekf_replay)

    p = sub.add_parser("feasibility", help="PD alignment feasibility grid")
    common(p)
    p.add_argument("--speeds", type=_floats, default=[1.5, 2.0])
    p.add_argument("--grid-n", type=int, default=100)
    p.add_argument("--k-p", type=float, default=1.0)
    p.add_argument("--k-v", type=float, default=2.0)
    p.set_defaults(fn=cmd_feasibility)

    p = sub.add_parser("race", help="closed-loop race runs")
    common(p)
    p.add_argument("--seeds", type=int, default=1,
                   help="number of sequential seeds starting at --seed")
    p.set_defaults(fn=cmd_race)

    p = sub.add_parser("kernel-bench",
                       help="time kernels, compiled vs fallback")
    common(p)
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(fn=cmd_kernel_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config,
                          overrides={"seed": args.seed, "out": args.out})
        return args.fn(cfg, args)
    except ConfigError as e:
        print("config error: %s" % e, file=sys.stderr)
        return 2
    except GatepilotError as e:
        print("error: %s" % e, file=sys.stderr)
        return 1
    except OSError as e:
        print("i/o error: %s" % e, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
