"""qpuf command line: construct, enroll, reconstruct, fer, leakage, report.

All state comes from the TOML config (plus ``--seed``/``--frames``
overrides).  Exit status 0 on success, 2 for usage or config errors, 1 for
any other documented failure; messages are tagged with the failing stage.
"""

import argparse
import hashlib
import json
import os
import sys
import time

import jsonschema

from qpuf import __version__, _accel, config, experiment, formats, profile


class StageError(Exception):
    def __init__(self, stage, msg, code=1):
        super().__init__(f"{stage}: {msg}")
        self.code = code


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except (ValueError, RuntimeError, OSError, KeyError) as e:
        raise StageError(name, str(e)) from e


def _load_config(args):
    if not args.config:
        raise StageError("config", "--config is required", 2)
    try:
        cfg = config.load(args.config)
    except config.ConfigError as e:
        raise StageError("config", str(e), 2) from e
    except OSError as e:
        raise StageError("config", str(e), 2) from e
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.frames is not None:
        if args.frames < 1:
            raise StageError("config", "--frames must be >= 1", 2)
        cfg["budgets"]["fer_frames" if args.command == "fer" else "construction_frames"] = args.frames
    try:
        config.validate(cfg)
    except config.ConfigError as e:
        raise StageError("config", str(e), 2) from e
    return cfg


def _out_dir(cfg):
    d = cfg["output"]["dir"]
    os.makedirs(d, exist_ok=True)
    return d


def _profile_path(args, cfg):
    return args.profile or os.path.join(cfg["output"]["dir"], "profile.json")


def _manifest(command, cfg, construction_hash):
    ident = {
        "command": command,
        "config_hash": config.config_hash(cfg),
        "construction_hash": construction_hash,
        "tool_version": __version__,
    }
    return dict(ident, manifest_hash=profile.sha256_hex(ident))


def _write_manifest(path, man, timings, outputs):
    files = []
    for p in outputs:
        with open(p, "rb") as fh:
            files.append({"path": os.path.basename(p), "sha256": hashlib.sha256(fh.read()).hexdigest()})
    body = dict(man, timings=timings, outputs=files, backend=_accel.backend_name())
    with open(path, "w") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_text(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _load_profile(args, cfg):
    path = _profile_path(args, cfg)
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as e:
        raise StageError("profile", str(e)) from e
    want = config.construction_config_hash(cfg)
    if d.get("config_hash") != want:
        raise StageError("profile", f"{path} was built from a different config (hash mismatch); refusing")
    c = _stage("profile", profile.from_dict, d)
    return c, d


def cmd_construct(args, cfg):
    t0 = time.perf_counter()
    c = _stage("construct", experiment.construct, cfg)
    t_build = time.perf_counter() - t0
    digest = profile.construction_digest(c).hex()
    man = _manifest("construct", cfg, digest)
    path = _profile_path(args, cfg)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    text = profile.dumps(c, config_hash=config.construction_config_hash(cfg),
                         manifest_hash=man["manifest_hash"], tool_version=__version__)
    _write_text(path, text)
    _write_manifest(f"{path}.manifest.json", man, {"construct": t_build}, [path])
    rates = c.error_rates
    print(f"profile: {path}")
    print(f"construction hash: {digest}")
    print(f"positions with error rate < 1e-4: {int((rates < 1e-4).sum())} of {c.n_len}")
    return 0


def cmd_enroll(args, cfg):
    c, _ = _load_profile(args, cfg)
    out = _out_dir(cfg)
    t0 = time.perf_counter()
    probs = _stage("enroll", experiment.make_device, cfg)
    h, key = _stage("enroll", experiment.enroll_device, cfg, c, probs)
    t_enroll = time.perf_counter() - t0
    helper_path = os.path.join(out, "helper.qfe1")
    puf_path = os.path.join(out, "puf.bin")
    formats.write_bytes(helper_path, formats.pack_helper(h))
    formats.write_bytes(puf_path, formats.pack_puf_array(probs, experiment.puf_params(cfg), cfg["seed"]))
    man = _manifest("enroll", cfg, h.construction_hash.hex())
    _write_manifest(os.path.join(out, "enroll.manifest.json"), man, {"enroll": t_enroll},
                    [helper_path, puf_path])
    print(f"helper data: {helper_path}")
    print(f"key: {key.hex()}")
    return 0


def cmd_reconstruct(args, cfg):
    c, _ = _load_profile(args, cfg)
    out = cfg["output"]["dir"]
    h = _stage("reconstruct", lambda: formats.unpack_helper(formats.read_bytes(os.path.join(out, "helper.qfe1"))))
    probs, _, _ = _stage("reconstruct", lambda: formats.unpack_puf_array(formats.read_bytes(os.path.join(out, "puf.bin"))))
    key = _stage("reconstruct", experiment.reconstruct_device, cfg, c, h, probs, args.zero_noise)
    print(f"key: {key.hex()}")
    return 0


def cmd_fer(args, cfg):
    frames = cfg["budgets"]["fer_frames"]
    if frames > experiment.LONG_RUN_FRAMES and not args.long_run:
        raise StageError("fer", f"{frames} frames exceeds {experiment.LONG_RUN_FRAMES}; pass --long-run", 2)
    c, _ = _load_profile(args, cfg)
    out = _out_dir(cfg)
    ck = os.path.join(out, "fer.checkpoint.json") if args.long_run else None

    def progress(done, total, fails):
        if args.long_run:
            print(f"  {done}/{total} frames, {fails} failures", file=sys.stderr, flush=True)

    t0 = time.perf_counter()
    res = _stage("fer", experiment.run_fer, cfg, c, frames, args.zero_noise, ck, progress)
    elapsed = time.perf_counter() - t0
    digest = profile.construction_digest(c).hex()
    man = _manifest("fer", cfg, digest)
    report = dict(kind="fer", manifest_hash=man["manifest_hash"], construction_hash=digest, **res)
    jsonschema.validate(report, config.load_schema("fer_report"))
    path = os.path.join(out, "fer.json")
    _write_text(path, json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write_manifest(os.path.join(out, "fer.manifest.json"), man, {"fer": elapsed}, [path])
    lo, hi = res["ci95"]
    print(f"frames {res['frames']}  failures {res['failures']}  FER {res['fer']:.3g}  95% CI [{lo:.3g}, {hi:.3g}]")
    return 0


def cmd_leakage(args, cfg):
    c, _ = _load_profile(args, cfg)
    out = _out_dir(cfg)

    def progress(done, total):
        if args.long_run:
            print(f"  enumeration chunk {done}/{total}", file=sys.stderr, flush=True)

    t0 = time.perf_counter()
    rows = _stage("leakage", experiment.leakage_rows, cfg, c, args.long_run, progress,
                  checkpoint_dir=out if args.long_run else None)
    elapsed = time.perf_counter() - t0
    digest = profile.construction_digest(c).hex()
    man = _manifest("leakage", cfg, digest)
    report = {"kind": "leakage", "manifest_hash": man["manifest_hash"], "construction_hash": digest,
              "n": c.n_len, "rows": rows}
    jsonschema.validate(report, config.load_schema("leakage_report"))
    path = os.path.join(out, "leakage.json")
    _write_text(path, json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write_manifest(os.path.join(out, "leakage.manifest.json"), man, {"leakage": elapsed}, [path])
    print(experiment.format_leakage_table(rows))
    return 0


def cmd_report(args, cfg):
    out = cfg["output"]["dir"]
    shown = 0
    lk = os.path.join(out, "leakage.json")
    if os.path.exists(lk):
        with open(lk) as fh:
            rep = json.load(fh)
        jsonschema.validate(rep, config.load_schema("leakage_report"))
        print(f"leakage bounds, N = {rep['n']}, construction {rep['construction_hash'][:16]}")
        print(experiment.format_leakage_table(rep["rows"]))
        shown += 1
    fr = os.path.join(out, "fer.json")
    if os.path.exists(fr):
        with open(fr) as fh:
            rep = json.load(fh)
        jsonschema.validate(rep, config.load_schema("fer_report"))
        lo, hi = rep["ci95"]
        print(f"\nFER (L = {rep['list_size']}): {rep['failures']}/{rep['frames']} = {rep['fer']:.3g}, "
              f"95% CI [{lo:.3g}, {hi:.3g}]")
        print("note: decoding assumes a memoryless symmetric channel; the device channel is a mixture over cells")
        shown += 1
    if not shown:
        raise StageError("report", f"no leakage.json or fer.json in {out}")
    return 0


COMMANDS = {
    "construct": cmd_construct,
    "enroll": cmd_enroll,
    "reconstruct": cmd_reconstruct,
    "fer": cmd_fer,
    "leakage": cmd_leakage,
    "report": cmd_report,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="qpuf", description="Quaternary PUF key generation experiments.")
    ap.add_argument("--version", action="version", version=f"qpuf {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config (TOML)")
    common.add_argument("--profile", help="construction profile path (default <output.dir>/profile.json)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--frames", type=int, help="override construction or FER frame budget")
    common.add_argument("--threads", type=int, help="cap on worker threads")
    common.add_argument("--long-run", action="store_true", help="allow long runs; enables checkpointing")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("reconstruct", "fer"):
            p.add_argument("--zero-noise", action="store_true",
                           help="reuse the enrollment responses instead of a fresh read")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.seed is not None and args.seed < 0:
            raise StageError("config", "--seed must be nonnegative", 2)
        if args.threads:
            _accel.set_threads(args.threads)
        return COMMANDS[args.command](args, cfg)
    except StageError as e:
        print(f"qpuf: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
