"""Pipelines behind the CLI: construction, enrollment, FER and leakage tables."""

import json
import os
import time

import numpy as np
from scipy import stats

from qpuf import channel, fe, quantizer
from qpuf import puf_model as pm
from qpuf import rng as _rng
from qpuf.leakage import (
    BoundNotApplicable,
    check_masses,
    leakage_bound,
    subcode_rows,
    weight_histogram,
)
from qpuf.polar.construction import genie_construct
from qpuf.polar.decoder import DecoderConfig
from qpuf.polar.code import encode
from qpuf.profile import construction_digest

FER_CHUNK = 2048
LONG_RUN_FRAMES = 10**6
LONG_RUN_DIMENSION = 16


def puf_params(cfg):
    return pm.PufModelParams(cfg["puf"]["lambda1"], cfg["puf"]["lambda2"])


def thresholds(cfg):
    q = cfg["quantizer"]
    if "thresholds" in q:
        return quantizer.QuantizerThresholds(*q["thresholds"])
    return quantizer.thresholds_for_masses(puf_params(cfg), q["masses"])


def main_channel(cfg):
    """(W_m, additive channel) for the configured device model."""
    params, t, trials = puf_params(cfg), thresholds(cfg), cfg["puf"]["trials"]
    if cfg["channel"]["estimator"] == "monte-carlo":
        est = channel.estimate_main_matrix(params, t, trials, cfg["channel"]["cells"], cfg["seed"])
        return est.matrix, est.additive()
    w, joint = channel.main_matrix_expected(params, t, trials)
    return w, channel.additive_channel(joint)


def construct(cfg, backend=None):
    _, a = main_channel(cfg)
    return genie_construct(a, cfg["code"]["n"], cfg["budgets"]["construction_frames"], cfg["seed"],
                           clamp=cfg["code"]["llr_clamp"], backend=backend)


def decoder_config(cfg):
    return DecoderConfig(cfg["code"]["list_size"], cfg["code"]["llr_clamp"])


# --- device ------------------------------------------------------------------


def make_device(cfg):
    n_cells = cfg["code"]["n"] * cfg["code"]["blocks"]
    return pm.sample_cells(puf_params(cfg), n_cells, cfg["seed"])


def read_responses(cfg, probs, purpose):
    return quantizer.extract_responses(probs, cfg["puf"]["trials"], thresholds(cfg), cfg["seed"], purpose)


def enroll_device(cfg, c, probs):
    code = cfg["code"]
    p = fe.partition(c, code["r"], code["s"])
    q = read_responses(cfg, probs, "enroll")
    gen = _rng.stream(cfg["seed"], "secret")
    seed = gen.integers(0, 4, size=code["blocks"] * code["s"], dtype=np.uint8)
    salt = _rng.stream(cfg["seed"], "salt").bytes(fe.DEFAULT_SALT_BYTES)
    return fe.enroll(seed, q, p, c, cfg["seed"], salt=salt, key_bits=code["key_bits"])


def reconstruct_device(cfg, c, h, probs, zero_noise=False, backend=None):
    q = read_responses(cfg, probs, "enroll" if zero_noise else "reconstruct")
    return fe.reconstruct(h, q, c, decoder_config(cfg), cfg["code"]["key_bits"], backend)


# --- frame error rate --------------------------------------------------------


def clopper_pearson(k, n, level=0.95):
    ci = stats.binomtest(int(k), int(n)).proportion_ci(confidence_level=level, method="exact")
    return float(ci.low), float(ci.high)


def fer_chunk(cfg, c, p, index, frames, zero_noise=False, backend=None):
    """Failures among ``frames`` fresh devices, each enrolled then reconstructed."""
    n_len = c.n_len
    seed = cfg["seed"]
    params, t, trials = puf_params(cfg), thresholds(cfg), cfg["puf"]["trials"]
    gen = _rng.stream(seed, "fer", index)
    probs = pm.one_probability_from_normal(gen.standard_normal((frames, n_len)), params)
    q = quantizer.extract_responses(probs, trials, t, seed, f"fer-enroll/{index}")
    q2 = q if zero_noise else quantizer.extract_responses(probs, trials, t, seed, f"fer-reconstruct/{index}")
    secret = gen.integers(0, 4, size=(frames, p.s), dtype=np.uint8)
    mask = gen.integers(0, 4, size=(frames, p.r), dtype=np.uint8)
    salts = gen.integers(0, 256, size=(frames, fe.DEFAULT_SALT_BYTES), dtype=np.uint8)
    payload = encode(fe.assemble(secret, mask, p)) ^ q
    got = fe.decode_seeds(payload ^ q2, p, c, decoder_config(cfg), backend)
    bits = cfg["code"]["key_bits"]
    fails = 0
    for f in range(frames):
        salt = salts[f].tobytes()
        if fe.kdf(got[f], salt, key_bits=bits) != fe.kdf(secret[f], salt, key_bits=bits):
            fails += 1
    return fails


def run_fer(cfg, c, frames, zero_noise=False, checkpoint=None, progress=None, backend=None):
    code = cfg["code"]
    p = fe.partition(c, code["r"], code["s"])
    key = f"{construction_digest(c).hex()}:{cfg['seed']}:{code['r']}:{code['s']}:{code['list_size']}:{zero_noise}"
    done_chunks, failures = 0, 0
    if checkpoint and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            state = json.load(fh)
        if state.get("key") == key:
            done_chunks, failures = state["chunks"], state["failures"]
    for i, a, b in _rng.chunks(frames, FER_CHUNK):
        if i < done_chunks:
            continue
        failures += fer_chunk(cfg, c, p, i, b - a, zero_noise, backend)
        if checkpoint:
            tmp = f"{checkpoint}.tmp"
            with open(tmp, "w") as fh:
                json.dump({"key": key, "chunks": i + 1, "failures": failures}, fh)
            os.replace(tmp, checkpoint)
        if progress:
            progress(b, frames, failures)
    lo, hi = clopper_pearson(failures, frames)
    return {
        "frames": int(frames),
        "failures": int(failures),
        "fer": failures / frames,
        "ci95": [lo, hi],
        "list_size": int(code["list_size"]),
        "zero_noise": bool(zero_noise),
    }


# --- leakage table -----------------------------------------------------------


def _row_masses(row):
    if "masses" in row:
        return [float(v) for v in row["masses"]]
    p0 = float(row["p0"])
    q = (1.0 - p0) / 3.0
    return [p0, q, q, q]


def leakage_rows(cfg, c, long_run=False, progress=None, backend=None, checkpoint_dir=None):
    """One bound row per configured (masses, r, s, blocks) entry."""
    code, cap = cfg["code"], cfg["budgets"]["enumeration_cap"]
    order = np.asarray(c.reliability_order)
    hists = {}
    rows = []
    for row in cfg["leakage"]["rows"]:
        masses = _row_masses(row)
        r = int(row["r"])
        s = int(row.get("s", code["r"] + code["s"] - r))
        out = {
            "masses": masses,
            "entropy": quantizer.response_entropy(masses),
            "mask": r,
            "secret": s,
            "blocks": int(row.get("blocks", 1)),
            "status": "ok",
            "bound_bits": None,
            "raw_bound_bits": None,
            "key_bits": None,
            "weight_histogram": None,
            "enumeration_seconds": None,
        }
        rows.append(out)
        try:
            p0 = check_masses(masses)
            if not 0.25 <= p0 <= 1.0:
                raise BoundNotApplicable(f"p0 = {p0} outside [1/4, 1]")
        except BoundNotApplicable as e:
            out.update(status="not applicable", reason=str(e))
            continue
        if r + s > c.n_len:
            out.update(status="not applicable", reason=f"r + s exceeds N = {c.n_len}")
            continue
        if r > cap:
            out.update(status="skipped", reason=f"mask dimension {r} above enumeration cap {cap}")
            continue
        if r >= LONG_RUN_DIMENSION and not long_run:
            out.update(status="skipped", reason=f"mask dimension {r} needs --long-run")
            continue
        if r not in hists:
            sub = subcode_rows(c.n_len, order[:r])
            ck = os.path.join(checkpoint_dir, f"hist-r{r}.json") if checkpoint_dir else None
            hists[r] = weight_histogram(sub, cap=cap, backend=backend, checkpoint=ck, progress=progress)
        h = hists[r]
        b = leakage_bound(h, p0)
        out.update(
            bound_bits=b.bits,
            raw_bound_bits=b.raw_bits,
            key_bits=fe.key_bits_budget(s, b.bits, out["blocks"]),
            weight_histogram=[int(v) for v in h.counts],
            enumeration_seconds=h.seconds,
        )
    return rows


def format_leakage_table(rows):
    head = f"{'p0':>7} {'p1':>7} {'p2':>7} {'p3':>7} {'entropy':>8} {'mask':>5} {'bound':>14} {'blocks':>6} {'key bits':>8}"
    lines = [head, "-" * len(head)]
    for r in rows:
        m = r["masses"]
        if r["status"] == "ok":
            bound, key = f"{r['bound_bits']:.4f}", str(r["key_bits"])
        else:
            bound, key = r["status"], "-"
        lines.append(f"{m[0]:7.4f} {m[1]:7.4f} {m[2]:7.4f} {m[3]:7.4f} {r['entropy']:8.4f} "
                     f"{r['mask']:5d} {bound:>14} {r['blocks']:6d} {key:>8}")
    return "\n".join(lines)


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0
