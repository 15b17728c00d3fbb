"""
Base models shared by configuration schemas and result records.

Configuration files are validated strictly (unknown keys are rejected) and
every record can be reduced to a plain dictionary for JSON output.
"""

import json
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel, ConfigDict, ValidationError

from ..exceptions import ConfigurationError

T = TypeVar("T", bound="SchemaModel")


class SchemaModel(BaseModel):
    """
    Base model for all configuration and record models.

    Provides strict validation and a standard conversion to simplified
    dictionaries for JSON artifacts.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    @classmethod
    def from_json_file(cls: type[T], path: str | Path) -> T:
        """
        Load and validate a model from a JSON file.

        Args:
            path: Path to the JSON document

        Returns:
            A validated model instance

        Raises:
            ConfigurationError: If the file is unreadable, not JSON, or fails validation
        """
        try:
            raw = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(f"Cannot read config file {path}: {e}") from e
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Config file {path} is not valid JSON: {e}") from e
        return cls.from_dict(data, source=str(path))

    @classmethod
    def from_dict(cls: type[T], data: Any, source: str = "config") -> T:
        """
        Validate a dictionary, converting schema failures to ConfigurationError.
        """
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid {source}: {e}") from e

    def to_simplified_dict(self) -> dict[str, Any]:
        """
        Convert the model to a simplified dictionary for JSON output.

        Returns:
            A dictionary without unset optional fields
        """
        return self.model_dump(mode="json", exclude_none=True)
