"""JSON scenario configuration: schema-validated parsing and canonical
(byte-reproducible) emission.

Complex numbers are stored as two-element [re, im] arrays.  Emission is
canonical (sorted keys, fixed indentation), so dump(load(dump(x))) is
byte-identical to dump(x).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .driving import (ConstantLaw, DrivingField, DrivingSpec, HarmonicSumLaw,
                      PeriodicLaw, SpatialProfile)
from .errors import DomainError
from .integrator import IntegratorConfig
from .lattice import DIRICHLET, PERIODIC, ModelParams, NonlinearitySpec

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ScenarioConfig:
    model: ModelParams
    n_sites: int
    bc: str
    driving: DrivingSpec
    integrator: IntegratorConfig
    scenario: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n_sites < 3:
            raise DomainError("lattice needs at least 3 sites")
        if self.bc not in (DIRICHLET, PERIODIC):
            raise DomainError(f"unknown boundary condition {self.bc!r}")


def _complex_pair(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise DomainError(f"expected [re, im] pair, got {v!r}")


def _profile_from_dict(d: dict) -> SpatialProfile:
    kind = d.get("kind")
    if kind == "exponential":
        return SpatialProfile(kind=kind, amplitude=d.get("amplitude", 1.0),
                              rate=d["rate"])
    if kind == "gaussian":
        return SpatialProfile(kind=kind, amplitude=d.get("amplitude", 1.0),
                              width=d["width"])
    if kind == "single_site":
        return SpatialProfile(kind=kind, amplitude=d.get("amplitude", 1.0),
                              site=d.get("site", 0))
    if kind == "custom":
        return SpatialProfile(kind=kind,
                              values=tuple(_complex_pair(v) for v in d["values"]),
                              start=d.get("start", 0))
    raise DomainError(f"unknown profile kind {kind!r}")


def _profile_to_dict(p: SpatialProfile) -> dict:
    if p.kind == "exponential":
        return {"kind": p.kind, "amplitude": p.amplitude, "rate": p.rate}
    if p.kind == "gaussian":
        return {"kind": p.kind, "amplitude": p.amplitude, "width": p.width}
    if p.kind == "single_site":
        return {"kind": p.kind, "amplitude": p.amplitude, "site": p.site}
    return {"kind": p.kind, "start": p.start,
            "values": [[v.real, v.imag] for v in p.values]}


def _law_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "constant":
        return ConstantLaw(value=d.get("value", 1.0))
    if kind == "periodic":
        return PeriodicLaw(period=d["period"], amplitude=d.get("amplitude", 1.0),
                           phase=d.get("phase", 0.0))
    if kind == "harmonic":
        return HarmonicSumLaw(frequencies=tuple(d["frequencies"]),
                              amplitudes=tuple(d["amplitudes"]),
                              phases=tuple(d.get("phases", ())))
    raise DomainError(f"unknown temporal law kind {kind!r}")


def _law_to_dict(law) -> dict:
    if isinstance(law, ConstantLaw):
        return {"kind": "constant", "value": law.value}
    if isinstance(law, PeriodicLaw):
        return {"kind": "periodic", "period": law.period,
                "amplitude": law.amplitude, "phase": law.phase}
    if isinstance(law, HarmonicSumLaw):
        return {"kind": "harmonic", "frequencies": list(law.frequencies),
                "amplitudes": list(law.amplitudes), "phases": list(law.phases)}
    raise DomainError(f"cannot serialize law {law!r}")


def _field_from_dict(d: dict) -> DrivingField:
    return DrivingField(profile=_profile_from_dict(d["profile"]),
                        law=_law_from_dict(d.get("law", {"kind": "constant"})),
                        offset=d.get("offset", 0.0))


def _field_to_dict(f: DrivingField) -> dict:
    return {"profile": _profile_to_dict(f.profile),
            "law": _law_to_dict(f.law), "offset": f.offset}


def config_from_dict(d: dict) -> ScenarioConfig:
    if not isinstance(d, dict):
        raise DomainError("config must be a JSON object")
    version = d.get("version")
    if version != SCHEMA_VERSION:
        raise DomainError(f"unsupported config version {version!r}")
    try:
        m = d["model"]
        nl = m.get("nonlinearity")
        nonlinearity = None
        if nl is not None:
            nonlinearity = NonlinearitySpec(sigma=nl["sigma"],
                                            sign=nl.get("sign", 1),
                                            a=nl.get("a"), b=nl.get("b"))
        model = ModelParams(kappa=m["kappa"], gamma=m["gamma"],
                            nonlinearity=nonlinearity)
        lat = d["lattice"]
        dr = d["driving"]
        g1 = _field_from_dict(dr["g1"]) if "g1" in dr else DrivingField.zero()
        g2 = _field_from_dict(dr["g2"]) if "g2" in dr else DrivingField.zero()
        integ = d.get("integrator", {})
        cfg = IntegratorConfig(
            rtol=integ.get("rtol", 1e-8), atol=integ.get("atol", 1e-11),
            dt_init=integ.get("dt_init", 1e-2),
            dt_min=integ.get("dt_min", 1e-12),
            dt_max=integ.get("dt_max", 1.0),
            sample_stride=integ.get("sample_stride", 0.1))
        return ScenarioConfig(model=model, n_sites=int(lat["n_sites"]),
                              bc=lat.get("bc", DIRICHLET),
                              driving=DrivingSpec(g1=g1, g2=g2),
                              integrator=cfg,
                              scenario=dict(d.get("scenario", {})))
    except KeyError as exc:
        raise DomainError(f"config missing required key {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed config: {exc}") from exc


def config_to_dict(cfg: ScenarioConfig) -> dict:
    nl = cfg.model.nonlinearity
    return {
        "version": SCHEMA_VERSION,
        "model": {
            "kappa": cfg.model.kappa,
            "gamma": cfg.model.gamma,
            "nonlinearity": None if nl is None else {
                "sigma": nl.sigma, "sign": nl.sign, "a": nl.a, "b": nl.b},
        },
        "lattice": {"n_sites": cfg.n_sites, "bc": cfg.bc},
        "driving": {"g1": _field_to_dict(cfg.driving.g1),
                    "g2": _field_to_dict(cfg.driving.g2)},
        "integrator": {
            "rtol": cfg.integrator.rtol, "atol": cfg.integrator.atol,
            "dt_init": cfg.integrator.dt_init, "dt_min": cfg.integrator.dt_min,
            "dt_max": cfg.integrator.dt_max,
            "sample_stride": cfg.integrator.sample_stride,
        },
        "scenario": cfg.scenario,
    }


def dumps_config(cfg: ScenarioConfig) -> str:
    return json.dumps(config_to_dict(cfg), sort_keys=True, indent=2) + "\n"


def loads_config(text: str) -> ScenarioConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON: {exc}") from exc
    return config_from_dict(data)


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_config(fh.read())


def save_config(cfg: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_config(cfg))
