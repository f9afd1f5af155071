"""File-boundary unit conversions and JSON (de)serialization.

External files speak Hz and dBm; the library speaks angular frequencies
(rad/s) and watts. All conversions live here.
"""

from __future__ import annotations

import hashlib
import json
import math

from .model_core import CircuitParams, PumpConfig, PumpTone

SCHEMA_VERSION = 1

TWO_PI = 2.0 * math.pi


def dbm_to_watts(p_dbm: float) -> float:
    return 1e-3 * 10.0 ** (p_dbm / 10.0)


def watts_to_dbm(p_watts: float) -> float:
    if p_watts <= 0:
        return -math.inf
    return 10.0 * math.log10(p_watts / 1e-3)


def circuit_to_dict(params: CircuitParams) -> dict:
    """CircuitParams -> plain dict with frequencies and Kerr in Hz."""
    return {
        "schema_version": SCHEMA_VERSION,
        "circuit": {
            "omega_L_Hz": params.omega_L / TWO_PI,
            "omega_R_Hz": params.omega_R / TWO_PI,
            "J_Hz": params.J / TWO_PI,
            "kappa_Hz": params.kappa / TWO_PI,
            "gamma_Hz": params.gamma / TWO_PI,
            "K_L_Hz": params.K_L / TWO_PI,
            "K_R_Hz": params.K_R / TWO_PI,
            "kappa_R_Hz": params.kappa_R / TWO_PI,
        },
    }


def circuit_from_dict(doc: dict) -> CircuitParams:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"unsupported schema_version {doc.get('schema_version')!r}, expected {SCHEMA_VERSION}"
        )
    try:
        c = doc["circuit"]
        return CircuitParams(
            omega_L=TWO_PI * float(c["omega_L_Hz"]),
            omega_R=TWO_PI * float(c["omega_R_Hz"]),
            J=TWO_PI * float(c["J_Hz"]),
            kappa=TWO_PI * float(c["kappa_Hz"]),
            gamma=TWO_PI * float(c["gamma_Hz"]),
            K_L=TWO_PI * float(c["K_L_Hz"]),
            K_R=TWO_PI * float(c["K_R_Hz"]),
            kappa_R=TWO_PI * float(c.get("kappa_R_Hz", 0.0)),
        )
    except KeyError as exc:
        raise ValueError(f"missing circuit field {exc}") from exc


def _tone_to_dict(tone: PumpTone) -> dict:
    return {
        "frequency_Hz": tone.frequency / TWO_PI,
        "power_dBm": watts_to_dbm(tone.power),
        "phase_rad": tone.phase,
    }


def _tone_from_dict(d: dict) -> PumpTone:
    return PumpTone(
        frequency=TWO_PI * float(d["frequency_Hz"]),
        power=dbm_to_watts(float(d["power_dBm"])),
        phase=float(d.get("phase_rad", 0.0)),
    )


def pump_config_to_dict(cfg: PumpConfig) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "gain_tone": _tone_to_dict(cfg.gain_tone),
        "attenuation_dB": cfg.attenuation_db,
    }
    if cfg.conversion_tone is not None:
        doc["conversion_tone"] = _tone_to_dict(cfg.conversion_tone)
    return doc


def pump_config_from_dict(doc: dict) -> PumpConfig:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"unsupported schema_version {doc.get('schema_version')!r}, expected {SCHEMA_VERSION}"
        )
    conv = doc.get("conversion_tone")
    return PumpConfig(
        gain_tone=_tone_from_dict(doc["gain_tone"]),
        conversion_tone=_tone_from_dict(conv) if conv is not None else None,
        attenuation_db=float(doc.get("attenuation_dB", 0.0)),
    )


def save_json(path, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def config_hash(doc: dict) -> str:
    """Short stable hash of a config document, for output provenance."""
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:12]
