# models/config.py
import yaml
from typing import Optional, Type
from pathlib import Path
from pydantic import BaseModel
from event_fusion.core.errors import ConfigError
from event_fusion.core.stream_io import read_config

YAML_SUFFIXES = (".yml", ".yaml")


def _field_name_map(model_cls: Type[BaseModel]) -> dict:
    """Map every accepted spelling of a key (field name, alias, dashed form) to the field name."""
    names = {}
    for name, field in model_cls.model_fields.items():
        for key in (name, field.alias, name.rstrip("_")):
            if key:
                names[key] = name
                names[key.replace("_", "-")] = name
    return names


def _normalize(values: dict, model_cls: Type[BaseModel]) -> dict:
    names = _field_name_map(model_cls)
    return {names[k]: v for k, v in values.items() if k in names}


def merge_config(cli: dict, file_config: dict, model: Type[BaseModel]) -> BaseModel:
    """Merge CLI arguments with file configuration and validate against a Pydantic model."""
    # CLI overrides file values; unset flags never do
    cli_values = {k: v for k, v in _normalize(cli, model).items() if v is not None}
    merged = {**file_config, **cli_values}
    # Remove keys explicitly set to None so Pydantic uses defaults
    cleaned = {k: v for k, v in merged.items() if v is not None}
    return model(**cleaned)


def parse_config(
    model_cls: Type[BaseModel],
    config_path: Optional[Path] = None,
    sequence: Optional[str] = None,
) -> dict:
    """
    Combine model defaults with a config file and optional per-sequence overrides.

    Flat `key = value` files are read through stream_io; `.yml`/`.yaml` files may carry a
    `sequences:` mapping whose entries override the top-level keys for one recording.
    """
    defaults = {
        name: field.get_default(call_default_factory=True)
        for name, field in model_cls.model_fields.items()
        if not field.is_required()
    }
    if config_path is None:
        if sequence is not None:
            raise ConfigError(f"--sequence {sequence!r} given without a config file")
        return defaults

    if not config_path.exists():
        raise FileNotFoundError(f"Missing config: {config_path}")

    if config_path.suffix.lower() in YAML_SUFFIXES:
        with config_path.open("r", encoding="utf-8") as f:
            config_file = yaml.safe_load(f) or {}
        if not isinstance(config_file, dict):
            raise ConfigError(f"{config_path}: top level must be a mapping")
        sequences = config_file.pop("sequences", None) or {}
    else:
        config_file = read_config(config_path)
        sequences = {}

    seq_config = {}
    if sequence is not None:
        if sequence not in sequences:
            raise ConfigError(f"Sequence '{sequence}' not found in {config_path}")
        seq_config = sequences[sequence] or {}

    # Merge: defaults -> file -> sequence overrides
    merged_config = defaults.copy()
    merged_config.update(_normalize(config_file, model_cls))
    merged_config.update(_normalize(seq_config, model_cls))
    return merged_config
