"""
Helpers for moving between tabsynth pydantic models and plain dicts.
Usage:
    from tables.models import ContingencyTable
    from common.pydantic_utils import dict_to_pydantic_model, model_to_dict

    table = dict_to_pydantic_model(data_dict, ContingencyTable)
    payload = model_to_dict(table)
"""

from typing import Any, Callable, Dict, Optional, Set, Type, TypeVar

import numpy as np
from loguru import logger
from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from common.errors import ValidationError

T = TypeVar("T", bound=BaseModel)


def model_to_dict(
    model: BaseModel,
    exclude_none: bool = True,
    exclude: Optional[Set[str]] = None,
) -> Dict[str, Any]:
    """
    Convert a model to a JSON-friendly dictionary.
    Args:
        model: The pydantic model to convert
        exclude_none: Whether to exclude None values
        exclude: A set of field names to exclude
    Returns:
        A dictionary with numpy arrays turned into lists
    """
    model_dict = model.model_dump(exclude_none=exclude_none, exclude=exclude or set())
    return _process_dict_for_json(model_dict)


def _process_value(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, dict):
        return _process_dict_for_json(value)
    if isinstance(value, (list, tuple)):
        return [_process_value(item) for item in value]
    return value


def _process_dict_for_json(data: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively convert numpy scalars/arrays inside a dumped model."""
    return {str(key): _process_value(value) for key, value in data.items()}


def dict_to_pydantic_model(
    data: Dict[str, Any],
    model_class: Type[T],
    preprocessor: Optional[Callable[[dict], dict]] = None,
) -> T:
    """
    Convert a dict to a model instance, turning pydantic errors into tabsynth ValidationErrors.
    - preprocessor: function to reshape the raw payload before model instantiation
    """
    try:
        clean_data = preprocessor(dict(data)) if preprocessor else dict(data)
        return model_class(**clean_data)
    except PydanticValidationError as e:
        logger.error(f"Validation error for {model_class.__name__}: {e}")
        raise ValidationError(f"Invalid {model_class.__name__}: {_first_error(e)}") from e


def _first_error(error: PydanticValidationError) -> str:
    details = error.errors()
    if not details:
        return str(error)
    first = details[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    message = first.get("msg", "invalid value")
    return f"{location}: {message}" if location else message
