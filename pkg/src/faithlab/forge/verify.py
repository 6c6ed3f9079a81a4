"""Oracle verification of built networks.

Checks, per environment:

* agreement with a direct pixel-counting oracle on generated samples, and
  exhaustive integer agreement of the modulo head over [0, capacity];
* sensitivity: adding/removing any single ground-truth pixel moves the
  relevant count output by exactly 1;
* symmetry: that unit change is position-independent (spread <= 1e-9);
* layer and parameter counts (informational).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from faithlab.errors import VerificationFailure
from faithlab.forge.configs import MultiColorConfig, SingleColorConfig
from faithlab.graph import NetGraph, forward

_EXACT = 1e-6
_SPREAD = 1e-9


@dataclass
class VerificationReport:
    environment: str
    n_layers: int
    n_params: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks.values())

    def record(self, name: str, ok: bool, detail: str):
        self.checks[name] = {"ok": bool(ok), "detail": detail}

    def raise_if_failed(self):
        bad = {k: v["detail"] for k, v in self.checks.items() if not v["ok"]}
        if bad:
            lines = "; ".join(f"{k}: {v}" for k, v in bad.items())
            raise VerificationFailure(f"network verification failed: {lines}")

    def summary(self) -> str:
        lines = [
            f"environment: {self.environment}",
            f"layers: {self.n_layers} (graph entries), parameters: {self.n_params}",
        ]
        for name, chk in self.checks.items():
            lines.append(f"[{'ok' if chk['ok'] else 'FAIL'}] {name}: {chk['detail']}")
        return "\n".join(lines)


def _tap_forward(net, x, tap_label):
    idx = net.tap_index(tap_label)
    _, trace = forward(net, x)
    out = trace.outputs[idx]
    return out if trace.batched else out[0]


def _subnet_from(net, start_index):
    from faithlab.graph import NetGraph as _NG

    return _NG(net.layers[start_index:], input_shape=net.shape_after(start_index - 1))


def _flip_deltas(net, image, positions, new_value, tap, chunk=256):
    """Count-tap outputs after setting each given pixel to new_value."""
    idx = net.tap_index(tap)
    base = _tap_forward(net, image, tap).reshape(-1)
    deltas = []
    for lo in range(0, len(positions), chunk):
        part = positions[lo : lo + chunk]
        batch = np.repeat(image[None], len(part), axis=0)
        for b, (r, c) in enumerate(part):
            batch[b, :, r, c] = new_value
        out = _tap_forward(net, batch, tap).reshape(len(part), -1)
        deltas.extend(out - base[None, :])
    return base, np.array(deltas)


def verify_single_color(
    net: NetGraph, cfg: SingleColorConfig, sample_budget: int = 100, seed: int = 99
) -> VerificationReport:
    from faithlab.data.generate import gen_single_color

    report = VerificationReport("single-color", net.n_layers, net.n_params)

    # modulo head alone, exhaustively over the contract range
    flat_idx = net.tap_index("flatten")
    head = _subnet_from(net, flat_idx + 1)
    xs = np.arange(cfg.capacity + 1, dtype=np.float64)[:, None]
    ys, _ = forward(head, xs)
    want = np.mod(np.arange(cfg.capacity + 1), cfg.modulus)
    worst = np.max(np.abs(ys[:, 0] - want))
    report.record(
        "modulo-exhaustive",
        worst <= _EXACT,
        f"max |out - x mod {cfg.modulus}| = {worst:.2e} over [0, {cfg.capacity}]",
    )

    # generated samples against the white-count oracle
    samples = gen_single_color(cfg, sample_budget, seed=seed)
    imgs = np.stack([s.image for s in samples])
    ys, _ = forward(net, imgs)
    labels = np.array([s.label for s in samples])
    worst = np.max(np.abs(ys[:, 0] - labels))
    report.record(
        "sample-agreement",
        worst <= _EXACT,
        f"max |out - oracle| = {worst:.2e} over {len(samples)} samples",
    )

    # sensitivity + symmetry on the pre-modulo count
    spread_lo, spread_hi = np.inf, -np.inf
    bad = None
    for s in samples:
        whites = np.argwhere(s.gt_signed > 0)
        base, deltas = _flip_deltas(net, s.image, whites, 0.0, "count")
        deltas = deltas.reshape(len(whites))
        off = np.abs(deltas + 1.0)
        if off.max() > _SPREAD and bad is None:
            bad = (s.meta["index"], tuple(whites[int(off.argmax())]))
        spread_lo = min(spread_lo, deltas.min())
        spread_hi = max(spread_hi, deltas.max())
        blacks = np.argwhere(s.gt_signed == 0)
        take = blacks[:: max(1, len(blacks) // 16)][:16]
        _, add = _flip_deltas(net, s.image, take, 255.0, "count")
        add = add.reshape(len(take))
        worst_add = np.abs(add - 1.0).max()
        if worst_add > _SPREAD and bad is None:
            bad = (s.meta["index"], tuple(take[int(np.abs(add - 1.0).argmax())]))
    spread = spread_hi - spread_lo
    report.record(
        "sensitivity",
        bad is None,
        "every single-pixel flip moved the count by exactly 1"
        if bad is None
        else f"sample {bad[0]} pixel {bad[1]} broke the unit-change property",
    )
    report.record(
        "symmetry",
        spread <= _SPREAD,
        f"count delta spread over positions = {spread:.2e}",
    )
    return report


def verify_multi_color(
    net: NetGraph, cfg: MultiColorConfig, sample_budget: int = 100, seed: int = 99
) -> VerificationReport:
    from faithlab.data.generate import gen_multi_color

    report = VerificationReport("multi-color", net.n_layers, net.n_params)

    # detector truth table around each decision boundary
    bad = None
    offs = [-1, 0, 1]
    probes = []
    for color in list(cfg.colors) + [cfg.background, (1, 2, 3), (0, 0, 0)]:
        for dr in offs:
            for dg in offs:
                for db in offs:
                    probes.append(
                        (color[0] + dr, color[1] + dg, color[2] + db)
                    )
    probes = sorted(set(probes))
    det = NetGraph(
        net.layers[: net.tap_index("detector.out") + 1],
        input_shape=(3, len(probes), 1),
    )
    image = np.array(probes, dtype=np.float64).T[:, :, None]  # (3, P, 1)
    out, _ = forward(det, image)  # (C, P, 1)
    for p, probe in enumerate(probes):
        is_target = [probe == tuple(c) for c in cfg.colors]
        is_bg = probe == tuple(cfg.background)
        want = np.array(
            [1.0 if hit else 0.0 for hit in is_target]
            + [0.0 if (any(is_target) or is_bg) else 1.0] * cfg.n_redundant
        )
        got = out[:, p, 0]
        if np.max(np.abs(got - want)) > _EXACT:
            bad = probe
            break
    report.record(
        "detector-boundaries",
        bad is None,
        "indicator channels exact on all boundary probes"
        if bad is None
        else f"detector wrong at pixel {bad}",
    )

    # logits equal exact counts; labels agree with the counting oracle
    samples = gen_multi_color(cfg, sample_budget, seed=seed)
    imgs = np.stack([s.image for s in samples])
    logits = _tap_forward(net, imgs, "logits")
    worst = 0.0
    agree = 0
    for i, s in enumerate(samples):
        counts = s.meta["color_counts"]
        worst = max(worst, float(np.max(np.abs(logits[i] - counts))))
        agree += int(np.argmax(logits[i]) == s.label)
    detail = f"max |logit - count| = {worst:.2e}, label agreement {agree}/{len(samples)}"
    if cfg.redundant_scale == 0:
        report.record(
            "logit-exactness", worst <= _EXACT and agree == len(samples), detail
        )
    else:
        report.record(
            "logit-exactness-in-distribution",
            worst <= _EXACT and agree == len(samples),
            detail + " (in-distribution images only)",
        )

    # sensitivity/symmetry: remove ground-truth pixels to background
    from faithlab.data.generate import color_index_map

    spread_lo, spread_hi = np.inf, -np.inf
    bad = None
    bg = np.array(cfg.background, dtype=np.float64)
    for s in samples[: min(len(samples), 25)]:
        cmap = color_index_map(s.image, cfg)
        fg = np.argwhere(s.gt_signed != 0)
        take = fg[:: max(1, len(fg) // 64)][:64]
        _, deltas = _flip_deltas(net, s.image, take, bg, "logits")
        for b, (r, c) in enumerate(take):
            color_idx = cmap[r, c]
            d = deltas[b]
            expect = np.zeros(cfg.n_classes)
            expect[color_idx] = -1.0
            if np.max(np.abs(d - expect)) > _SPREAD and bad is None:
                bad = (s.meta["index"], (int(r), int(c)))
            spread_lo = min(spread_lo, d[color_idx])
            spread_hi = max(spread_hi, d[color_idx])
    report.record(
        "sensitivity",
        bad is None,
        "every ground-truth pixel removal moved its logit by exactly -1"
        if bad is None
        else f"sample {bad[0]} pixel {bad[1]} broke the unit-change property",
    )
    report.record(
        "symmetry",
        spread_hi - spread_lo <= _SPREAD,
        f"logit delta spread over positions = {spread_hi - spread_lo:.2e}",
    )
    return report


def verify_net(net: NetGraph, cfg, sample_budget: int = 100, seed: int = 99):
    if isinstance(cfg, SingleColorConfig):
        return verify_single_color(net, cfg, sample_budget, seed)
    if isinstance(cfg, MultiColorConfig):
        return verify_multi_color(net, cfg, sample_budget, seed)
    raise TypeError(f"unknown config type {type(cfg).__name__}")
