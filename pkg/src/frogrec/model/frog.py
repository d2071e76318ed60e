"""The composed FROG pair scorer and its checkpoint format."""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..encoders import (
    ALL_MODALITIES,
    PAIR_MODALITY,
    FeatureTables,
    ModalitySet,
    ProjectionParams,
    SageParams,
    encode_graph_all,
    project_modality,
    sample_sage_tables,
)
from ..numerics import Parameter, Tensor, no_grad, take_rows
from ..params import ParamStore
from .heads import JointNetParams, LocalNetParams, global_preference, joint_predict, local_preference
from .matching import MatchingParams, pair_similarity

VARIANTS = ("full", "no-matching", "no-local", "no-global")
CHECKPOINT_VERSION = 1


@dataclass
class FrogConfig:
    d: int = 32
    h: int = 32
    m: int | None = None
    modalities: tuple = ALL_MODALITIES
    proj_hidden: int | None = None
    sage_hidden: int | None = None
    sample_sizes: tuple = (10, 5)
    aggregator: str = "mean"
    tie_roles: bool = False
    variant: str = "full"

    def __post_init__(self):
        self.modalities = tuple(self.modalities)
        self.sample_sizes = tuple(int(s) for s in self.sample_sizes)

    def validate(self) -> None:
        for key in ("d", "h"):
            if getattr(self, key) < 1:
                raise ValueError(f"{key} must be >= 1")
        for key in ("m", "proj_hidden", "sage_hidden"):
            v = getattr(self, key)
            if v is not None and v < 1:
                raise ValueError(f"{key} must be >= 1")
        if not self.modalities:
            raise ValueError("at least one modality must be enabled")
        unknown = set(self.modalities) - set(ALL_MODALITIES)
        if unknown:
            raise ValueError(f"unknown modalities {sorted(unknown)}")
        if len(set(self.modalities)) != len(self.modalities):
            raise ValueError("modalities must be distinct")
        if len(self.sample_sizes) != 2 or any(s < 1 for s in self.sample_sizes):
            raise ValueError("sample_sizes must hold 2 entries, each >= 1")
        if self.aggregator not in ("mean", "max"):
            raise ValueError("aggregator must be 'mean' or 'max'")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")

    @property
    def t(self) -> int:
        return len(self.modalities)

    @property
    def hidden(self) -> int:
        return self.proj_hidden or 2 * self.d

    @property
    def joint_width(self) -> int:
        return self.m or self.h

    def to_dict(self) -> dict:
        out = asdict(self)
        out["modalities"] = list(self.modalities)
        out["sample_sizes"] = list(self.sample_sizes)
        return out


def _expect(name: str, tensor: Tensor, shape: tuple) -> None:
    if tensor.shape != shape:
        raise ValueError(f"shape check failed for {name}: got {tensor.shape}, expected {shape}")


class FrogModel:
    """Emb-Net, Matching-Net, Local-Net, Global-Net and Joint-Net over one parameter store."""

    kind = "frog"

    def __init__(self, config: FrogConfig, input_dims: dict[str, int], seed: int = 0):
        config.validate()
        self.config = config
        self.input_dims = {k: int(input_dims[k]) for k in config.modalities if k != "graph"}
        if "graph" in config.modalities:
            self.input_dims["graph"] = int(input_dims.get("graph", input_dims.get("profile")))
        self.seed = seed
        self.params = ParamStore(np.random.default_rng(seed))
        self._build()

    def _build(self) -> None:
        cfg, store = self.config, self.params
        d, hid = cfg.d, cfg.hidden
        self.proj: dict[str, ProjectionParams] = {}
        self.sage: SageParams | None = None
        for mod in cfg.modalities:
            in_dim = self.input_dims[mod]
            if mod == "graph":
                sage_dim = cfg.sage_hidden or 2 * d
                self.sage = SageParams.create(store, "sage", [in_dim, sage_dim, sage_dim], cfg.aggregator)
                in_dim = sage_dim
            self.proj[mod] = ProjectionParams.create(store, f"emb.{mod}", in_dim, (hid, hid), d)
        self.match = {mod: MatchingParams.create(store, f"match.{mod}", d, cfg.tie_roles) for mod in cfg.modalities}
        self.local = LocalNetParams.create(store, cfg.t * d, cfg.h)
        self.A = store.weight("global.A", (1, d), fan_in=d)
        joint_in = {"no-local": d, "no-global": cfg.h}.get(cfg.variant, cfg.h + d)
        self.joint = JointNetParams.create(store, joint_in, cfg.joint_width)

    # -- embedding ---------------------------------------------------------
    @property
    def user_modalities(self) -> tuple[str, ...]:
        return tuple(m for m in self.config.modalities if m != PAIR_MODALITY)

    def sage_tables(self, tables: FeatureTables, seed):
        if "graph" not in self.config.modalities:
            return None
        return sample_sage_tables(tables.graph, self.config.sample_sizes, seed)

    def user_embeddings(self, tables: FeatureTables, ids, sage_tables=None) -> dict[str, Tensor]:
        ids = np.asarray(ids, dtype=np.int64)
        out = {}
        for mod in self.user_modalities:
            if mod == "graph":
                if sage_tables is None:
                    raise ValueError("graph modality needs sampled neighbor tables")
                h = encode_graph_all(tables.user["graph"], self.sage, sage_tables)
                x = take_rows(h, ids)
            else:
                table = tables.user.get(mod)
                if table is None:
                    raise ValueError(f"missing {mod!r} vectors; disable the modality in the config")
                x = table[ids]
            out[mod] = project_modality(x, self.proj[mod])
        return out

    # -- scoring -------------------------------------------------------------
    def score_embeddings(self, Mu: dict, Mv: dict, pair_x=None, trace: dict | None = None) -> Tensor:
        cfg = self.config
        d = cfg.d
        B = None
        E_set = []
        for mod in cfg.modalities:
            if mod == PAIR_MODALITY:
                mu = mv = project_modality(pair_x, self.proj[mod])
            else:
                mu, mv = Mu[mod], Mv[mod]
            B = mu.shape[0]
            _expect(f"M_u[{mod}]", mu, (B, d))
            if cfg.variant == "no-matching":
                e = mu * mv
            elif trace is not None:
                e, parts = pair_similarity(mu, mv, self.match[mod], return_parts=True)
                for key in ("C_u", "C_v", "G"):
                    _expect(f"{key}[{mod}]", parts[key], (B, d, d))
                for key in ("R_fwd", "R_bwd"):
                    _expect(f"{key}[{mod}]", parts[key], (B, d))
                trace.setdefault("parts", {})[mod] = parts
            else:
                e = pair_similarity(mu, mv, self.match[mod])
            _expect(f"E[{mod}]", e, (B, d))
            E_set.append(e)
        D_local = local_preference(E_set, self.local) if cfg.variant != "no-local" else None
        D_global = global_preference(E_set, self.A) if cfg.variant != "no-global" else None
        if D_local is not None:
            _expect("D_local", D_local, (B, cfg.h))
        if D_global is not None:
            _expect("D_global", D_global, (B, d))
        y = joint_predict(D_local, D_global, self.joint)
        _expect("y_hat", y, (B,))
        if trace is not None:
            trace.update(E=E_set, D_local=D_local, D_global=D_global, y_hat=y)
        return y

    def forward(self, tables: FeatureTables, src, dst, pair_feats=None, seed=0, trace: dict | None = None) -> Tensor:
        """Friending probability for each ``(src[i], dst[i])``.

        ``pair_feats`` are raw pair features (recomputed from the graph when
        omitted); ``seed`` fixes the neighbor sampling of the graph encoder.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        B = len(src)
        ids, inv = np.unique(np.concatenate([src, dst]), return_inverse=True)
        emb = self.user_embeddings(tables, ids, self.sage_tables(tables, seed))
        Mu = {k: take_rows(v, inv[:B]) for k, v in emb.items()}
        Mv = {k: take_rows(v, inv[B:]) for k, v in emb.items()}
        pair_x = None
        if PAIR_MODALITY in self.config.modalities:
            pair_x = tables.pair_inputs(src, dst, pair_feats)
        return self.score_embeddings(Mu, Mv, pair_x, trace)

    def make_scorer(self, tables: FeatureTables, seed=0, chunk: int = 8192):
        """Frozen-parameter scorer ``f(src, dst) -> scores`` with user embeddings cached once."""
        with no_grad():
            all_ids = np.arange(tables.n)
            emb = {k: v.data for k, v in self.user_embeddings(tables, all_ids, self.sage_tables(tables, seed)).items()}

        def scorer(src, dst, pair_feats=None) -> np.ndarray:
            src = np.asarray(src, dtype=np.int64)
            dst = np.asarray(dst, dtype=np.int64)
            out = np.empty(len(src), dtype=np.float64)
            with no_grad():
                for s in range(0, len(src), chunk):
                    a, b = src[s : s + chunk], dst[s : s + chunk]
                    Mu = {k: Tensor(v[a]) for k, v in emb.items()}
                    Mv = {k: Tensor(v[b]) for k, v in emb.items()}
                    pf = None if pair_feats is None else pair_feats[s : s + chunk]
                    pair_x = tables.pair_inputs(a, b, pf) if PAIR_MODALITY in self.config.modalities else None
                    out[s : s + chunk] = self.score_embeddings(Mu, Mv, pair_x).data
            return out

        return scorer

    # -- serialization -------------------------------------------------------
    def state(self) -> dict:
        return {
            "kind": self.kind,
            "version": CHECKPOINT_VERSION,
            "config": self.config.to_dict(),
            "input_dims": self.input_dims,
            "seed": self.seed,
        }


def embed_user(user_id: int, model: FrogModel, tables: FeatureTables, seed=0) -> ModalitySet:
    """Projected modality embeddings of one user (pair-level modality excluded)."""
    tables.graph.check_user(user_id)
    with no_grad():
        emb = model.user_embeddings(tables, [user_id], model.sage_tables(tables, seed))
    names = model.user_modalities
    return ModalitySet(names, [emb[k].data[0].copy() for k in names])


def score_pair(u: int, v: int, model: FrogModel, tables: FeatureTables, seed=0) -> float:
    if u == v:
        raise ValueError("cannot score a user against itself")
    tables.graph.check_user(u)
    tables.graph.check_user(v)
    with no_grad():
        return float(model.forward(tables, [u], [v], seed=seed).data[0])


def save_checkpoint(model, path) -> Path:
    """Write an ``.npz`` archive; entries carry a fixed timestamp so equal models give equal bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {f"param::{k}": p.data for k, p in model.params.items()}
    arrays["__state__"] = np.frombuffer(json.dumps(model.state(), sort_keys=True).encode("utf-8"), dtype=np.uint8)
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        for name, arr in arrays.items():
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.ascontiguousarray(arr), allow_pickle=False)
            zf.writestr(zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0)), buf.getvalue())
    return path


def load_checkpoint(path) -> FrogModel:
    with np.load(path, allow_pickle=False) as z:
        state = json.loads(bytes(z["__state__"]).decode("utf-8"))
        if state.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {state.get('version')}")
        values = {k[len("param::"):]: z[k] for k in z.files if k.startswith("param::")}
    if state["kind"] == "frog":
        model = FrogModel(FrogConfig(**state["config"]), state["input_dims"], state["seed"])
    else:
        from ..train_eval.baselines import baseline_from_state

        model = baseline_from_state(state)
    if set(values) != set(model.params):
        raise ValueError("checkpoint parameters do not match the model layout")
    for k, v in values.items():
        p = model.params[k]
        p.data = v.copy()
    return model
