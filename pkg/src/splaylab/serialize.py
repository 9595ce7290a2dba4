"""JSON and CSV wire formats.

State JSON:      {"phases": [...], "model": {"kind": ..., <parameters>}}
Report JSON:     {"eigenvalues": [[re, im], ...], "class": str,
                  "max_re": float, "residual_vs_oracle": float | null}

All floats in CLI output are printed with 17 significant digits, which is
enough to round-trip an IEEE double exactly and keeps output byte-stable
across machines.
"""

from __future__ import annotations

import json
from typing import Any

from .models import Adaptive, Inertia, KuramotoSakaguchi, ModelParams, PhaseConfiguration
from .stability import StabilityReport


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def dumps(value: Any, indent: int = 0) -> str:
    """JSON serialisation with every float at 17 significant digits."""
    pad = " " * indent
    if isinstance(value, dict):
        items = ",\n".join(
            f'{pad}  "{key}": {dumps(val, indent + 2).lstrip()}'
            for key, val in value.items()
        )
        return f"{pad}{{\n{items}\n{pad}}}"
    if isinstance(value, (list, tuple)):
        inner = ", ".join(dumps(v).strip() for v in value)
        return f"{pad}[{inner}]"
    if isinstance(value, bool) or value is None:
        return pad + json.dumps(value)
    if isinstance(value, float):
        return pad + format_float(value)
    if isinstance(value, int):
        return pad + str(value)
    return pad + json.dumps(value)


def params_to_dict(params: ModelParams) -> dict:
    if isinstance(params, KuramotoSakaguchi):
        return {"kind": "ks", "omega": params.omega, "alpha": params.alpha,
                "sigma": params.sigma}
    if isinstance(params, Inertia):
        return {"kind": "inertia", "gamma": params.gamma, "p": params.p,
                "alpha": params.alpha, "sigma": params.sigma,
                "m_inertia": params.m_inertia}
    if isinstance(params, Adaptive):
        return {"kind": "adaptive", "omega": params.omega,
                "epsilon": params.epsilon, "alpha": params.alpha,
                "beta": params.beta, "sigma": params.sigma}
    raise TypeError(f"unknown model parameters {params!r}")


def params_from_dict(data: dict) -> ModelParams:
    kind = data.get("kind")
    fields = {k: v for k, v in data.items() if k != "kind"}
    if kind == "ks":
        return KuramotoSakaguchi(**fields)
    if kind == "inertia":
        return Inertia(**fields)
    if kind == "adaptive":
        return Adaptive(**fields)
    raise ValueError(f"unknown model kind {kind!r}")


def state_to_dict(theta: PhaseConfiguration, params: ModelParams | None = None) -> dict:
    doc: dict[str, Any] = {"phases": [float(p) for p in theta.phases]}
    if params is not None:
        doc["model"] = params_to_dict(params)
    return doc


def state_from_dict(data: dict) -> tuple[PhaseConfiguration, ModelParams | None]:
    theta = PhaseConfiguration(data["phases"])
    params = params_from_dict(data["model"]) if "model" in data else None
    return theta, params


def report_to_dict(report: StabilityReport) -> dict:
    return {
        "eigenvalues": [[z.real, z.imag] for z in report.analytic_eigenvalues],
        "class": report.classification.value,
        "max_re": report.max_real_part,
        "residual_vs_oracle": report.residual_vs_oracle,
    }
