"""Engine configuration: scalar field, coefficient ring, order mode and resource limits."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path
from typing import Union

from .errors import ConfigError, FieldSpecError, RingSpecError
from .exactnum import FieldSpec, RingSpec, parse_field_spec, parse_ring_spec


@dataclass(frozen=True)
class Limits:
    clauses: int = 10_000
    bits: int = 1_000_000
    samples: int = 10_000
    pp_bound: int = 12


@dataclass(frozen=True)
class EngineConfig:
    field: FieldSpec = dc_field(default_factory=FieldSpec.rationals)
    ring: RingSpec = dc_field(default_factory=RingSpec.integers)
    limits: Limits = dc_field(default_factory=Limits)

    @property
    def ordered(self) -> bool:
        return self.field.ordered

    def describe(self) -> str:
        mode = "ordered" if self.ordered else "pure"
        return f"F={self.field.describe()} R={self.ring.describe()} {mode}"

    def with_limits(self, **kw) -> "EngineConfig":
        return replace(self, limits=replace(self.limits, **kw))

    @classmethod
    def from_text(cls, text: str) -> "EngineConfig":
        """Parse flat key=value lines ('#' starts a comment)."""
        kv: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
            k, v = line.split("=", 1)
            kv[k.strip()] = v.strip()
        return cls.from_mapping(kv)

    @classmethod
    def from_mapping(cls, kv: dict[str, str]) -> "EngineConfig":
        known = {"field", "ring", "ordered", "root", "limits.clauses", "limits.bits", "limits.samples", "limits.pp_bound"}
        unknown = sorted(set(kv) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        ordered_txt = kv.get("ordered", "false").lower()
        if ordered_txt not in ("true", "false"):
            raise ConfigError("ordered must be true or false")
        ordered = ordered_txt == "true"
        try:
            root = int(kv.get("root", "-1"))
            fs = parse_field_spec(kv.get("field", "Q"), ordered, 0)
            if fs.minpoly and ordered:
                # default to the largest real root, so Q(a^2-2) orders a as +sqrt(2)
                from .exactnum import _isolate_real_roots

                nroots = len(_isolate_real_roots(fs.minpoly))
                fs = FieldSpec(fs.minpoly, True, root if root >= 0 else nroots - 1)
            ring = parse_ring_spec(kv.get("ring", "Z"))
        except (FieldSpecError, RingSpecError, ValueError) as e:
            raise ConfigError(str(e)) from e
        try:
            limits = Limits(
                clauses=int(kv.get("limits.clauses", Limits.clauses)),
                bits=int(kv.get("limits.bits", Limits.bits)),
                samples=int(kv.get("limits.samples", Limits.samples)),
                pp_bound=int(kv.get("limits.pp_bound", Limits.pp_bound)),
            )
        except ValueError as e:
            raise ConfigError(f"bad limit value: {e}") from e
        return cls(fs, ring, limits)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "EngineConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def default_config() -> EngineConfig:
    return EngineConfig()


def sqrt2_config(ordered: bool = False) -> EngineConfig:
    """F = Q(sqrt 2), R = Z; in ordered mode a is the positive root."""
    fs = FieldSpec.number_field((-2, 0, 1), ordered, 1 if ordered else 0)
    return EngineConfig(fs, RingSpec.integers())
