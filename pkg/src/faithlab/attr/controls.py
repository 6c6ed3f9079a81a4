"""Control baselines: uniform-random and constant attribution maps."""

import numpy as np

from faithlab.attr.maps import AttributionMap, fingerprint


def control_random(net, sample, target=None, seed: int = 0) -> AttributionMap:
    h, w = sample.image.shape[1:]
    rng = np.random.default_rng(seed)
    return AttributionMap(
        values=rng.uniform(0.0, 1.0, size=(h, w)),
        method="random",
        fingerprint=fingerprint("random", {"seed": seed}),
        target="scalar" if int(np.prod(net.output_shape)) == 1 else int(
            sample.label if target is None else target
        ),
        signed=False,
    )


def control_constant(net, sample, target=None, value: float = 1.0) -> AttributionMap:
    h, w = sample.image.shape[1:]
    return AttributionMap(
        values=np.full((h, w), float(value)),
        method="constant",
        fingerprint=fingerprint("constant", {"value": value}),
        target="scalar" if int(np.prod(net.output_shape)) == 1 else int(
            sample.label if target is None else target
        ),
        signed=False,
    )
