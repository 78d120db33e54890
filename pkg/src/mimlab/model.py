"""Small attention backbone with per-layer state tracing.

Two token-routing regimes are supported:

* ``encoder_masked`` — masked positions are substituted with the shared
  mask token before the encoder, so every traced layer carries all N
  tokens (SimMIM-style routing).
* ``decoder_masked`` — the encoder sees only visible tokens; the mask
  token enters at the decoder input, and the traced states are the
  decoder's (MAE-style routing).  The decoder has its own positional
  table, so encoder positional rows at masked positions are never
  consumed on this path.

Everything is plain numpy in float64.  ``forward_trace`` optionally
returns a cache that :func:`backward` consumes to produce exact
parameter gradients; losses may inject gradients at any traced state as
well as at the pixel prediction.

Parameters live in a flat ``{name: array}`` dict; see
:func:`parameter_shapes` for the exact inventory, which is also the
checkpoint file schema.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np
from scipy.special import erf

from .errors import ConfigError, DimensionError, NumericError
from .patches import MaskSpec, PatchGrid

ROUTING_ENCODER_MASKED = "encoder_masked"
ROUTING_DECODER_MASKED = "decoder_masked"
ROUTINGS = (ROUTING_ENCODER_MASKED, ROUTING_DECODER_MASKED)

CHECKPOINT_FORMAT_VERSION = 1
INIT_STD = 0.02
# Attention/MLP weights start smaller than the embeddings so residual
# branches perturb rather than dominate early states; positional tables
# start larger so position is a first-class signal from step one.
BLOCK_INIT_STD = 0.005
POS_INIT_STD = 0.2
LN_EPS = 1e-6


@dataclasses.dataclass(frozen=True)
class ArchitectureConfig:
    routing: str = ROUTING_ENCODER_MASKED
    image_height: int = 32
    image_width: int = 32
    patch_size: int = 8
    width: int = 64
    heads: int = 4
    depth: int = 4
    decoder_depth: int = 2
    mlp_ratio: int = 4

    def __post_init__(self):
        if self.routing not in ROUTINGS:
            raise ConfigError(f"unknown routing {self.routing!r}, expected {ROUTINGS}")
        if self.image_height % self.patch_size or self.image_width % self.patch_size:
            raise DimensionError(
                f"image {self.image_height}x{self.image_width} not divisible "
                f"by patch_size {self.patch_size}"
            )
        if self.width % self.heads:
            raise ConfigError(
                f"width {self.width} not divisible by heads {self.heads}"
            )
        if self.depth < 1:
            raise ConfigError("depth must be >= 1")
        if self.routing == ROUTING_DECODER_MASKED and self.decoder_depth < 1:
            raise ConfigError("decoder_depth must be >= 1 for decoder_masked routing")

    @property
    def n_patches(self) -> int:
        return (self.image_height // self.patch_size) * (
            self.image_width // self.patch_size
        )

    @property
    def patch_dim(self) -> int:
        return 3 * self.patch_size**2

    @property
    def traced_depth(self) -> int:
        """Number of blocks on the traced (masked-token) path."""
        if self.routing == ROUTING_ENCODER_MASKED:
            return self.depth
        return self.decoder_depth

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ArchitectureConfig":
        return cls(**d)


@dataclasses.dataclass
class LayerTrace:
    """Token states along the path where masked tokens exist.

    states[0] is the initial embedding (depth 0) of that path and
    states[l] the output of block l; every entry has shape (B, T, width).
    For decoder_masked routing the encoder's visible-only states are kept
    separately in encoder_states.
    """

    states: list[np.ndarray]
    masks: tuple[MaskSpec, ...]
    routing: str
    encoder_states: list[np.ndarray] | None = None
    batched: bool = True

    @property
    def n_layers(self) -> int:
        return len(self.states) - 1

    @property
    def batch_size(self) -> int:
        return self.states[0].shape[0]

    def layer(self, depth: int, image: int = 0) -> np.ndarray:
        """Single-image (T, width) state matrix at the given depth."""
        return self.states[depth][image]


# ---------------------------------------------------------------------------
# parameter inventory and initialization
# ---------------------------------------------------------------------------


def _block_shapes(prefix: str, d: int, hidden: int) -> dict:
    return {
        f"{prefix}.ln1.g": (d,),
        f"{prefix}.ln1.b": (d,),
        f"{prefix}.attn.wq": (d, d),
        f"{prefix}.attn.bq": (d,),
        f"{prefix}.attn.wk": (d, d),
        f"{prefix}.attn.bk": (d,),
        f"{prefix}.attn.wv": (d, d),
        f"{prefix}.attn.bv": (d,),
        f"{prefix}.attn.wo": (d, d),
        f"{prefix}.attn.bo": (d,),
        f"{prefix}.ln2.g": (d,),
        f"{prefix}.ln2.b": (d,),
        f"{prefix}.mlp.w1": (d, hidden),
        f"{prefix}.mlp.b1": (hidden,),
        f"{prefix}.mlp.w2": (hidden, d),
        f"{prefix}.mlp.b2": (d,),
    }


def parameter_shapes(config: ArchitectureConfig) -> dict:
    """Ordered {name: shape} inventory; doubles as the checkpoint schema."""
    d, n, pd = config.width, config.n_patches, config.patch_dim
    hidden = d * config.mlp_ratio
    shapes: dict = {
        "patch_proj.w": (pd, d),
        "patch_proj.b": (d,),
        "pos_embed": (n, d),
        "mask_token": (d,),
    }
    for i in range(config.depth):
        shapes.update(_block_shapes(f"enc{i}", d, hidden))
    if config.routing == ROUTING_DECODER_MASKED:
        shapes["enc_norm.g"] = (d,)
        shapes["enc_norm.b"] = (d,)
        shapes["dec_pos_embed"] = (n, d)
        for i in range(config.decoder_depth):
            shapes.update(_block_shapes(f"dec{i}", d, hidden))
    shapes["head_norm.g"] = (d,)
    shapes["head_norm.b"] = (d,)
    shapes["head.w"] = (d, pd)
    shapes["head.b"] = (pd,)
    return shapes


def init_parameters(config: ArchitectureConfig, seed: int = 0) -> dict:
    """Gaussian init: patch projection and the shared mask token at std
    0.02, positional tables at 0.2, block weights at 0.005; zero biases;
    unit layer-norm gains."""
    rng = np.random.default_rng(seed)
    params = {}
    for name, shape in parameter_shapes(config).items():
        leaf = name.rsplit(".", 1)[-1]
        if leaf == "g":
            params[name] = np.ones(shape)
        elif leaf.startswith("b"):
            params[name] = np.zeros(shape)
        elif "pos_embed" in name:
            params[name] = rng.normal(0.0, POS_INIT_STD, size=shape)
        elif name.startswith(("enc", "dec")):
            params[name] = rng.normal(0.0, BLOCK_INIT_STD, size=shape)
        else:
            params[name] = rng.normal(0.0, INIT_STD, size=shape)
    return params


# ---------------------------------------------------------------------------
# primitive layers with caches
# ---------------------------------------------------------------------------


def _layer_norm_fwd(x, g, b):
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = (x - mu) * inv
    return g * xhat + b, (xhat, inv, g)


def _layer_norm_bwd(dy, cache):
    xhat, inv, g = cache
    dg = np.sum(dy * xhat, axis=tuple(range(dy.ndim - 1)))
    db = np.sum(dy, axis=tuple(range(dy.ndim - 1)))
    dxhat = dy * g
    m1 = dxhat.mean(axis=-1, keepdims=True)
    m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
    dx = inv * (dxhat - m1 - xhat * m2)
    return dx, dg, db


def _gelu_fwd(x):
    cdf = 0.5 * (1.0 + erf(x / np.sqrt(2.0)))
    return x * cdf, (x, cdf)


def _gelu_bwd(dy, cache):
    x, cdf = cache
    pdf = np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)
    return dy * (cdf + x * pdf)


def _linear_fwd(x, w, b):
    return x @ w + b, x


def _linear_bwd(dy, x, w):
    dw = np.tensordot(x, dy, axes=(tuple(range(x.ndim - 1)),) * 2)
    db = dy.sum(axis=tuple(range(dy.ndim - 1)))
    dx = dy @ w.T
    return dx, dw, db


def _attention_fwd(x, params, prefix, heads):
    b, t, d = x.shape
    hd = d // heads
    q, _ = _linear_fwd(x, params[f"{prefix}.wq"], params[f"{prefix}.bq"])
    k, _ = _linear_fwd(x, params[f"{prefix}.wk"], params[f"{prefix}.bk"])
    v, _ = _linear_fwd(x, params[f"{prefix}.wv"], params[f"{prefix}.bv"])
    q = q.reshape(b, t, heads, hd).transpose(0, 2, 1, 3)
    k = k.reshape(b, t, heads, hd).transpose(0, 2, 1, 3)
    v = v.reshape(b, t, heads, hd).transpose(0, 2, 1, 3)
    scale = 1.0 / np.sqrt(hd)
    logits = (q @ k.transpose(0, 1, 3, 2)) * scale
    logits -= logits.max(axis=-1, keepdims=True)
    a = np.exp(logits)
    a /= a.sum(axis=-1, keepdims=True)
    ctx = a @ v
    ctx = ctx.transpose(0, 2, 1, 3).reshape(b, t, d)
    out, _ = _linear_fwd(ctx, params[f"{prefix}.wo"], params[f"{prefix}.bo"])
    return out, (x, q, k, v, a, ctx, scale, heads)


def _attention_bwd(dout, cache, params, prefix, grads):
    x, q, k, v, a, ctx, scale, heads = cache
    b, t, d = x.shape
    hd = d // heads

    dctx, dwo, dbo = _linear_bwd(dout, ctx, params[f"{prefix}.wo"])
    grads[f"{prefix}.wo"] += dwo
    grads[f"{prefix}.bo"] += dbo

    dctx = dctx.reshape(b, t, heads, hd).transpose(0, 2, 1, 3)
    da = dctx @ v.transpose(0, 1, 3, 2)
    dv = a.transpose(0, 1, 3, 2) @ dctx
    # softmax backward: dS = A * (dA - sum(dA * A))
    dlogits = a * (da - np.sum(da * a, axis=-1, keepdims=True))
    dlogits *= scale
    dq = dlogits @ k
    dk = dlogits.transpose(0, 1, 3, 2) @ q

    dx = np.zeros_like(x)
    for name, dval in (("q", dq), ("k", dk), ("v", dv)):
        flat = dval.transpose(0, 2, 1, 3).reshape(b, t, d)
        dxi, dw, db = _linear_bwd(flat, x, params[f"{prefix}.w{name}"])
        grads[f"{prefix}.w{name}"] += dw
        grads[f"{prefix}.b{name}"] += db
        dx += dxi
    return dx


def _block_fwd(x, params, prefix, heads):
    n1, ln1_cache = _layer_norm_fwd(x, params[f"{prefix}.ln1.g"], params[f"{prefix}.ln1.b"])
    attn_out, attn_cache = _attention_fwd(n1, params, f"{prefix}.attn", heads)
    y = x + attn_out
    n2, ln2_cache = _layer_norm_fwd(y, params[f"{prefix}.ln2.g"], params[f"{prefix}.ln2.b"])
    h1, _ = _linear_fwd(n2, params[f"{prefix}.mlp.w1"], params[f"{prefix}.mlp.b1"])
    act, gelu_cache = _gelu_fwd(h1)
    mlp_out, _ = _linear_fwd(act, params[f"{prefix}.mlp.w2"], params[f"{prefix}.mlp.b2"])
    z = y + mlp_out
    return z, (ln1_cache, attn_cache, y, ln2_cache, n2, gelu_cache, act)


def _block_bwd(dz, cache, params, prefix, grads):
    ln1_cache, attn_cache, y, ln2_cache, n2, gelu_cache, act = cache

    dact, dw2, db2 = _linear_bwd(dz, act, params[f"{prefix}.mlp.w2"])
    grads[f"{prefix}.mlp.w2"] += dw2
    grads[f"{prefix}.mlp.b2"] += db2
    dh1 = _gelu_bwd(dact, gelu_cache)
    dn2, dw1, db1 = _linear_bwd(dh1, n2, params[f"{prefix}.mlp.w1"])
    grads[f"{prefix}.mlp.w1"] += dw1
    grads[f"{prefix}.mlp.b1"] += db1
    dy, dg2, db_ln2 = _layer_norm_bwd(dn2, ln2_cache)
    dy += dz
    grads[f"{prefix}.ln2.g"] += dg2
    grads[f"{prefix}.ln2.b"] += db_ln2

    dn1 = _attention_bwd(dy, attn_cache, params, f"{prefix}.attn", grads)
    dx, dg1, db_ln1 = _layer_norm_bwd(dn1, ln1_cache)
    dx += dy
    grads[f"{prefix}.ln1.g"] += dg1
    grads[f"{prefix}.ln1.b"] += db_ln1
    return dx


# ---------------------------------------------------------------------------
# embedding and full forward
# ---------------------------------------------------------------------------


def _as_batch(grid, masks, config) -> tuple[np.ndarray, tuple[MaskSpec, ...], bool]:
    if isinstance(grid, PatchGrid):
        grid = grid.patches
    grid = np.asarray(grid, dtype=float)
    batched = grid.ndim == 3
    if not batched:
        grid = grid[None]
    if grid.ndim != 3:
        raise DimensionError(f"expected (N, D) or (B, N, D) patches, got {grid.shape}")
    if isinstance(masks, MaskSpec):
        masks = (masks,) * grid.shape[0]
    masks = tuple(masks)
    if len(masks) != grid.shape[0]:
        raise DimensionError(
            f"{len(masks)} masks for a batch of {grid.shape[0]} images"
        )
    n, pd = config.n_patches, config.patch_dim
    if grid.shape[1] != n or grid.shape[2] != pd:
        raise DimensionError(
            f"patches have shape {grid.shape[1:]}, architecture expects ({n}, {pd})"
        )
    for m in masks:
        if m.n_patches != n:
            raise DimensionError(f"mask covers {m.n_patches} tokens, expected {n}")
        if m.masked_indices.size and m.masked_indices.max() >= n:
            raise IndexError(f"mask index {m.masked_indices.max()} >= N={n}")
    return grid, masks, batched


def _bool_masks(masks, n) -> np.ndarray:
    return np.stack([m.bool_mask() for m in masks])


def embed(grid, mask, params, config: ArchitectureConfig, add_positions: bool = True):
    """Initial token embedding for the configured routing.

    encoder_masked: (B, N, width) rows; each masked row is the shared
    mask token, each visible row the patch projection, plus positional
    embeddings when ``add_positions``.  decoder_masked: (B, V, width)
    visible rows only; mask substitution happens at the decoder input.
    Single-image inputs return 2-D arrays.
    """
    grid, masks, batched = _as_batch(grid, mask, config)
    out, _ = _embed_fwd(grid, masks, params, config, add_positions)
    return out if batched else out[0]


def _embed_fwd(grid, masks, params, config, add_positions=True):
    bm = _bool_masks(masks, config.n_patches)
    if config.routing == ROUTING_ENCODER_MASKED:
        tokens = grid @ params["patch_proj.w"] + params["patch_proj.b"]
        tokens = np.where(bm[..., None], params["mask_token"], tokens)
        if add_positions:
            tokens = tokens + params["pos_embed"][None]
        return tokens, {"grid": grid, "bm": bm}
    counts = {m.n_masked for m in masks}
    if len(counts) != 1:
        raise DimensionError("decoder_masked batches need a uniform masked count")
    vis_idx = np.stack([m.visible_indices for m in masks])
    if vis_idx.shape[1] == 0:
        raise ValueError("decoder_masked routing needs at least one visible token")
    grid_vis = np.take_along_axis(grid, vis_idx[..., None], axis=1)
    tokens = grid_vis @ params["patch_proj.w"] + params["patch_proj.b"]
    if add_positions:
        tokens = tokens + params["pos_embed"][vis_idx]
    return tokens, {"grid_vis": grid_vis, "vis_idx": vis_idx, "bm": bm}


def _check_finite(x, where):
    if not np.isfinite(x).all():
        raise NumericError(f"non-finite activations at {where}")


def forward_trace(
    grid, mask, params, config: ArchitectureConfig, want_cache: bool = False
):
    """Run the model, recording states X^0..X^L along the masked-token path.

    Returns a :class:`LayerTrace`; with ``want_cache=True`` returns
    ``(trace, cache)`` where the cache feeds :func:`backward`.
    """
    grid, masks, batched = _as_batch(grid, mask, config)
    cache: dict = {"config": config, "masks": masks, "batched": batched}

    x, embed_cache = _embed_fwd(grid, masks, params, config)
    cache["embed"] = embed_cache
    _check_finite(x, "initial embedding")

    if config.routing == ROUTING_ENCODER_MASKED:
        states = [x]
        blocks = []
        for i in range(config.depth):
            x, bc = _block_fwd(x, params, f"enc{i}", config.heads)
            _check_finite(x, f"encoder block {i}")
            blocks.append(bc)
            states.append(x)
        cache["enc_blocks"] = blocks
        trace = LayerTrace(states=states, masks=masks, routing=config.routing,
                           batched=batched)
    else:
        enc_states = [x]
        blocks = []
        for i in range(config.depth):
            x, bc = _block_fwd(x, params, f"enc{i}", config.heads)
            _check_finite(x, f"encoder block {i}")
            blocks.append(bc)
            enc_states.append(x)
        cache["enc_blocks"] = blocks
        enc_out, enc_norm_cache = _layer_norm_fwd(
            x, params["enc_norm.g"], params["enc_norm.b"]
        )
        cache["enc_norm"] = enc_norm_cache

        bm = embed_cache["bm"]
        b = grid.shape[0]
        z = np.empty((b, config.n_patches, config.width))
        z[bm] = params["mask_token"]
        z[~bm] = enc_out.reshape(-1, config.width)
        z = z + params["dec_pos_embed"][None]
        _check_finite(z, "decoder input")
        cache["dec_embed"] = {"bm": bm, "enc_out_shape": enc_out.shape}

        states = [z]
        dec_blocks = []
        for i in range(config.decoder_depth):
            z, bc = _block_fwd(z, params, f"dec{i}", config.heads)
            _check_finite(z, f"decoder block {i}")
            dec_blocks.append(bc)
            states.append(z)
        cache["dec_blocks"] = dec_blocks
        trace = LayerTrace(states=states, masks=masks, routing=config.routing,
                           encoder_states=enc_states, batched=batched)

    cache["final_state"] = states[-1]
    if want_cache:
        return trace, cache
    return trace


def predict_pixels(trace: LayerTrace, params: dict, cache: dict | None = None):
    """Pixel-space prediction: norm + linear head on the final traced state.

    Rows follow the original patch order, one patch_dim vector per token;
    visible rows are produced too (the reconstruction loss ignores them).
    """
    final = trace.states[-1]
    normed, ln_cache = _layer_norm_fwd(final, params["head_norm.g"], params["head_norm.b"])
    pred = normed @ params["head.w"] + params["head.b"]
    if cache is not None:
        cache["head_norm"] = ln_cache
        cache["head_in"] = normed
    return pred if trace.batched else pred[0]


def forward_model(grid, mask, params, config: ArchitectureConfig):
    """Traced forward pass plus pixel prediction, with a backward cache."""
    trace, cache = forward_trace(grid, mask, params, config, want_cache=True)
    prediction = predict_pixels(trace, params, cache=cache)
    return trace, prediction, cache


def backward(
    cache: dict,
    params: dict,
    d_prediction: np.ndarray | None = None,
    d_states: list | None = None,
) -> dict:
    """Exact gradients of a scalar loss given its direct derivatives.

    d_prediction is dLoss/dPrediction (same shape as the prediction) and
    d_states[l] is the loss gradient injected at traced state l (None
    entries allowed).  Returns {name: grad} covering every parameter.
    """
    config: ArchitectureConfig = cache["config"]
    grads = {name: np.zeros(shape) for name, shape in parameter_shapes(config).items()}

    final = cache["final_state"]
    dx = np.zeros_like(final)
    if d_prediction is not None:
        d_pred = np.asarray(d_prediction, dtype=float)
        if d_pred.ndim == 2:
            d_pred = d_pred[None]
        head_in = cache["head_in"]
        d_normed, dw, db = _linear_bwd(d_pred, head_in, params["head.w"])
        grads["head.w"] += dw
        grads["head.b"] += db
        d_final, dg, db_ln = _layer_norm_bwd(d_normed, cache["head_norm"])
        grads["head_norm.g"] += dg
        grads["head_norm.b"] += db_ln
        dx += d_final

    n_traced = config.traced_depth
    injected = [None] * (n_traced + 1)
    if d_states is not None:
        if len(d_states) != n_traced + 1:
            raise DimensionError(
                f"d_states must have {n_traced + 1} entries, got {len(d_states)}"
            )
        injected = list(d_states)

    def _inject(dx, g):
        if g is None:
            return dx
        g = np.asarray(g, dtype=float)
        if g.ndim == 2:
            g = g[None]
        return dx + g

    if config.routing == ROUTING_ENCODER_MASKED:
        dx = _inject(dx, injected[config.depth])
        for i in reversed(range(config.depth)):
            dx = _block_bwd(dx, cache["enc_blocks"][i], params, f"enc{i}", grads)
            dx = _inject(dx, injected[i])
        _embed_bwd(dx, cache["embed"], params, config, grads)
        return grads

    # decoder_masked: walk the decoder, split its input gradient, then
    # walk the encoder.
    dz = dx
    dz = _inject(dz, injected[config.decoder_depth])
    for i in reversed(range(config.decoder_depth)):
        dz = _block_bwd(dz, cache["dec_blocks"][i], params, f"dec{i}", grads)
        dz = _inject(dz, injected[i])

    bm = cache["dec_embed"]["bm"]
    grads["dec_pos_embed"] += dz.sum(axis=0)
    grads["mask_token"] += dz[bm].sum(axis=0)
    d_enc_out = dz[~bm].reshape(cache["dec_embed"]["enc_out_shape"])
    d_enc, dg, db = _layer_norm_bwd(d_enc_out, cache["enc_norm"])
    grads["enc_norm.g"] += dg
    grads["enc_norm.b"] += db
    for i in reversed(range(config.depth)):
        d_enc = _block_bwd(d_enc, cache["enc_blocks"][i], params, f"enc{i}", grads)
    _embed_bwd(d_enc, cache["embed"], params, config, grads)
    return grads


def _embed_bwd(d_tokens, embed_cache, params, config, grads):
    if config.routing == ROUTING_ENCODER_MASKED:
        grid, bm = embed_cache["grid"], embed_cache["bm"]
        grads["pos_embed"] += d_tokens.sum(axis=0)
        grads["mask_token"] += d_tokens[bm].sum(axis=0)
        # masked rows bypass the projection, so their gradient rows are zero
        d_vis = np.where(bm[..., None], 0.0, d_tokens)
        grads["patch_proj.w"] += np.tensordot(grid, d_vis, axes=((0, 1), (0, 1)))
        grads["patch_proj.b"] += d_vis.sum(axis=(0, 1))
        return
    grid_vis, vis_idx = embed_cache["grid_vis"], embed_cache["vis_idx"]
    grads["patch_proj.w"] += np.tensordot(grid_vis, d_tokens, axes=((0, 1), (0, 1)))
    grads["patch_proj.b"] += d_tokens.sum(axis=(0, 1))
    np.add.at(
        grads["pos_embed"],
        vis_idx.ravel(),
        d_tokens.reshape(-1, config.width),
    )


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------


def save_checkpoint(path, params: dict, config: ArchitectureConfig, meta: dict | None = None):
    """Versioned checkpoint: a JSON header plus named float32 arrays.

    The container is a standard .npz; the ``header`` entry holds the
    format version, architecture config, parameter name order, and any
    caller metadata, so checkpoints load without this package's trainer.
    """
    names = list(parameter_shapes(config))
    missing = [n for n in names if n not in params]
    if missing:
        raise ConfigError(f"parameters missing for checkpoint: {missing}")
    header = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "architecture": config.to_dict(),
        "parameter_order": names,
        "meta": meta or {},
    }
    arrays = {name: params[name].astype("<f4") for name in names}
    np.savez(path, header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
             **arrays)


def load_checkpoint(path) -> tuple[ArchitectureConfig, dict, dict]:
    """Load a checkpoint, returning (config, float64 params, meta)."""
    path = Path(path)
    with np.load(path) as data:
        header = json.loads(bytes(data["header"]).decode())
        if header.get("format_version") != CHECKPOINT_FORMAT_VERSION:
            raise ConfigError(
                f"unsupported checkpoint format version in {path}: "
                f"{header.get('format_version')}"
            )
        config = ArchitectureConfig.from_dict(header["architecture"])
        params = {
            name: data[name].astype(float) for name in header["parameter_order"]
        }
    expected = parameter_shapes(config)
    for name, shape in expected.items():
        if name not in params or params[name].shape != tuple(shape):
            raise ConfigError(f"checkpoint {path} missing or misshapen: {name}")
    return config, params, header.get("meta", {})
