"""Three-branch spline-wavelet edge detector.

Flow for an input image ``I`` (all maps end up at the input resolution):

1. ``I`` is upsampled by 2 and decomposed once into ``cA, cH, cV, cD``.
2. Branch 1: the anti-noise operator on ``cA`` gives ``E_d``.
3. Branch 2: modulus maxima + adaptive threshold on the gradient of ``cA``
   (``E_l``) and on the joint detail modulus (``E_h``); their convex
   combination, merged with ``E_d``, is the mask ``E_m``.
4. Branch 3: window-selected detail maxima, thresholded per band, are
   reconstructed with ``cA`` zeroed and downsampled (``E_r``), refined
   morphologically (``F_d``) and reconstructed against the mask (``G``).
5. ``E_u = alpha * G + (1 - alpha) * E_m``, normalized to ``[0, 1]``.
"""

import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import dwt2d, edgecore, filterbank, morphology
from .errors import DimensionError, EdbswError, ParameterError, StageError

__all__ = [
    "ABLATIONS",
    "ED_FUSION_RULES",
    "PipelineConfig",
    "PipelineTrace",
    "edbsw_detect",
    "ablate",
]

ABLATIONS = ("disable_branch1", "disable_branch2", "disable_selector")
ED_FUSION_RULES = ("max", "ignore", "average")
MIN_SIDE = 16


@dataclass(frozen=True)
class PipelineConfig:
    wavelet: str = "bcssw"
    L: int = filterbank.DEFAULT_L
    taps: int = filterbank.DEFAULT_TAPS
    degree: int = filterbank.DEFAULT_DEGREE
    alpha: float = 0.7
    selector: edgecore.SelectorParams = field(default_factory=edgecore.SelectorParams)
    morph: morphology.MorphConfig = field(default_factory=morphology.MorphConfig)
    ablation: frozenset = frozenset()
    ed_fusion: str = "max"
    reconstruction: str = "dilation"
    upsample: bool = True

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        abl = frozenset(self.ablation)
        unknown = abl - set(ABLATIONS)
        if unknown:
            raise ParameterError(f"unknown ablation switches: {sorted(unknown)}")
        object.__setattr__(self, "ablation", abl)
        if self.ed_fusion not in ED_FUSION_RULES:
            raise ParameterError(f"ed_fusion must be one of {ED_FUSION_RULES}")
        if self.reconstruction not in ("erosion", "dilation"):
            raise ParameterError("reconstruction must be 'erosion' or 'dilation'")
        name = str(self.wavelet).lower()
        if name != "bcssw" and name not in filterbank.STANDARD_NAMES:
            raise ParameterError(f"unknown wavelet {self.wavelet!r}")
        object.__setattr__(self, "wavelet", name)

    def bank(self):
        return filterbank.resolve_bank(self.wavelet, L=self.L, taps=self.taps, degree=self.degree)

    def with_ablation(self, *switches):
        return replace(self, ablation=frozenset(switches))

    # flat key=value text form
    def to_mapping(self):
        sel = self.selector
        return {
            "wavelet": self.wavelet,
            "L": self.L,
            "taps": self.taps,
            "degree": self.degree,
            "alpha": self.alpha,
            "selector.T": sel.T,
            "selector.window": sel.window,
            "selector.stride": sel.stride,
            "selector.mean_gate": sel.mean_gate,
            "selector.coverage": sel.coverage,
            "morph.mu": self.morph.mu,
            "morph.intensity_scale": self.morph.intensity_scale,
            "morph.zero_in_domain": self.morph.zero_in_domain,
            "ablation": tuple(sorted(self.ablation)),
            "ed_fusion": self.ed_fusion,
            "reconstruction": self.reconstruction,
            "upsample": self.upsample,
        }

    def to_text(self):
        lines = []
        for key, value in self.to_mapping().items():
            if isinstance(value, (tuple, list)):
                value = ",".join(str(v) for v in value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_mapping(cls, mapping):
        """Build a config from string or typed values; unknown keys raise."""
        top, sel, morph = {}, {}, {}
        for key, raw in mapping.items():
            key = key.strip()
            if key.startswith("selector."):
                sel[key[9:]] = raw
            elif key.startswith("morph."):
                morph[key[6:]] = raw
            else:
                top[key] = raw
        try:
            sel_kw = {k: _coerce(v, _SELECTOR_TYPES[k]) for k, v in sel.items()}
            morph_kw = {k: _coerce(v, _MORPH_TYPES[k]) for k, v in morph.items()}
            top_kw = {k: _coerce(v, _TOP_TYPES[k]) for k, v in top.items()}
        except KeyError as exc:
            raise ParameterError(f"unknown configuration key {exc.args[0]!r}") from None
        return cls(
            selector=edgecore.SelectorParams(**sel_kw),
            morph=morphology.MorphConfig(**morph_kw),
            **top_kw,
        )

    @classmethod
    def from_text(cls, text):
        mapping = {}
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"line {n}: expected 'key = value'")
            key, value = line.split("=", 1)
            mapping[key.strip()] = value.strip()
        return cls.from_mapping(mapping)


def _parse_bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"not a boolean: {v!r}")


def _tuple_of(kind):
    def conv(v):
        if isinstance(v, str):
            v = [p for p in v.replace("x", ",").split(",") if p.strip()]
        return tuple(kind(p) for p in v)

    return conv


def _coerce(value, kind):
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"cannot parse {value!r}: {exc}") from None


def _ablation_set(v):
    if isinstance(v, str):
        return frozenset(p.strip() for p in v.split(",") if p.strip())
    return frozenset(v)


_TOP_TYPES = {
    "wavelet": str,
    "L": int,
    "taps": int,
    "degree": int,
    "alpha": float,
    "ablation": _ablation_set,
    "ed_fusion": str,
    "reconstruction": str,
    "upsample": _parse_bool,
}
_SELECTOR_TYPES = {
    "T": float,
    "window": _tuple_of(int),
    "stride": _tuple_of(int),
    "mean_gate": _tuple_of(float),
    "coverage": float,
}
_MORPH_TYPES = {
    "mu": float,
    "intensity_scale": _tuple_of(float),
    "zero_in_domain": _parse_bool,
}


@dataclass
class PipelineTrace:
    """Intermediate maps (when retained) and wall time per stage in ms."""

    maps: dict = field(default_factory=dict)
    timings_ms: dict = field(default_factory=dict)
    keep: bool = True

    def record(self, name, grid):
        if self.keep:
            self.maps[name] = np.array(grid, dtype=float)

    def __getitem__(self, name):
        return self.maps[name]


@contextmanager
def _stage(trace, name):
    t0 = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except (EdbswError, ValueError, ArithmeticError, LookupError) as exc:
        raise StageError(name, exc) from exc
    finally:
        trace.timings_ms[name] = trace.timings_ms.get(name, 0.0) + 1e3 * (
            time.perf_counter() - t0
        )


def _to_input(grid, shape, lifted):
    # subband-rate maps go back to the input lattice when no upsampling ran
    if not lifted:
        return grid
    return dwt2d.upsample2(grid)[: shape[0], : shape[1]]


def _branch_edges(modulus, angle):
    return morphology.normalize_max(edgecore.adaptive_threshold(edgecore.nms(modulus, angle)))


def edbsw_detect(img, cfg=None, keep_trace=True):
    """Run the detector on a grayscale ``[0, 1]`` image.

    Returns
    -------
    (ndarray, PipelineTrace)
        Edge map ``E_u`` in ``[0, 1]`` with the input's shape, and the trace.

    Raises
    ------
    StageError
        Wrapping the failure of a named stage.
    """
    cfg = cfg or PipelineConfig()
    trace = PipelineTrace(keep=keep_trace)
    off = cfg.ablation
    alpha = cfg.alpha

    with _stage(trace, "input"):
        image = dwt2d.as_grid(img)
        if min(image.shape) < MIN_SIDE:
            raise DimensionError(f"image sides must be >= {MIN_SIDE}, got {image.shape}")

    with _stage(trace, "decompose"):
        bank = cfg.bank()
        source = dwt2d.upsample2(image) if cfg.upsample else image
        dec = dwt2d.dwt2(source, bank)

    with _stage(trace, "branch1"):
        lift = not cfg.upsample
        E_d = morphology.anti_noise(np.clip(dec.cA, 0.0, 1.0), cfg.morph)
        E_d = _to_input(E_d, image.shape, lift)
        trace.record("E_d", E_d)

    with _stage(trace, "branch2"):
        grad = edgecore.gradient(dec.cA)
        E_l = _to_input(_branch_edges(grad.modulus, grad.angle), image.shape, lift)
        modulus, angle = edgecore.modulus_highfreq(*dec.details)
        E_h = _to_input(_branch_edges(modulus, angle), image.shape, lift)
        if "disable_branch2" in off:
            E_m = E_l
        else:
            E_m = morphology.weighted_fuse(E_h, E_l, alpha)
        if "disable_branch1" not in off:
            if cfg.ed_fusion == "max":
                E_m = np.maximum(E_m, E_d)
            elif cfg.ed_fusion == "average":
                E_m = (E_h + E_l + E_d) / 3.0
        trace.record("E_h", E_h)
        trace.record("E_l", E_l)
        trace.record("E_m", E_m)

    with _stage(trace, "branch3"):
        if "disable_selector" in off:
            selected = [edgecore.nms(np.abs(b), angle) for b in dec.details]
        else:
            selected = list(edgecore.uncertainty_select(dec, cfg.selector))
        for name, band in zip(("CH'", "CV'", "CD'"), selected):
            trace.record(name, band)
        kept = [edgecore.adaptive_threshold(b) for b in selected]
        trace.record("M_f", np.sqrt(sum(b**2 for b in kept)))
        zero = np.zeros_like(dec.cA)
        rebuilt = dwt2d.idwt2(dec.replace(cA=zero, cH=kept[0], cV=kept[1], cD=kept[2]), bank)
        if cfg.upsample:
            rebuilt = dwt2d.downsample2(rebuilt)
        E_r = morphology.normalize_max(np.abs(rebuilt))
        F_d = morphology.refine(E_r, cfg.morph)
        G = morphology.reconstruct(np.minimum(F_d, E_m), E_m, method=cfg.reconstruction)
        trace.record("E_r", E_r)
        trace.record("F_d", F_d)
        trace.record("G", G)

    with _stage(trace, "fuse"):
        E_u = morphology.normalize_max(morphology.weighted_fuse(G, E_m, alpha))
        trace.record("E_u", E_u)
    return E_u, trace


def ablate(img, cfg):
    """Edge map with the branches named in ``cfg.ablation`` switched off.

    An empty switch set reproduces :func:`edbsw_detect` exactly.
    """
    return edbsw_detect(img, cfg, keep_trace=False)[0]


def config_snapshot(cfg):
    """Plain-data snapshot of a config for manifests."""
    snap = asdict(cfg)
    snap["ablation"] = sorted(cfg.ablation)
    return snap
