"""Tool contracts: descriptors, the registry, and argument validation.

Descriptors serialize losslessly to a JSON schema dialect compatible with
OpenAI-style function calling, documented in docs/tool_protocol.md.
Validation checks argument presence and type only; value semantics (ranges,
existence of stations, ...) belong to the handlers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import DuplicateName
from .messages import ToolCall

PARAM_TYPES = ("string", "number", "integer", "boolean", "enum", "object")


@dataclass(frozen=True)
class ToolParam:
    name: str
    type: str  # one of PARAM_TYPES
    required: bool = False
    description: str = ""
    enum_values: tuple[str, ...] | None = None  # only for type == "enum"

    def __post_init__(self):
        if self.type not in PARAM_TYPES:
            raise ValueError(f"unknown parameter type {self.type!r}")
        if self.type == "enum" and not self.enum_values:
            raise ValueError("enum parameter needs enum_values")


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    parameters: tuple[ToolParam, ...] = ()

    def to_schema(self) -> dict[str, Any]:
        """JSON schema shape sent to chat providers."""
        props: dict[str, Any] = {}
        required: list[str] = []
        for p in self.parameters:
            if p.type == "enum":
                props[p.name] = {"type": "string", "enum": list(p.enum_values or ()),
                                 "description": p.description}
            else:
                props[p.name] = {"type": p.type, "description": p.description}
            if p.required:
                required.append(p.name)
        return {
            "name": self.name,
            "description": self.description,
            "parameters": {"type": "object", "properties": props, "required": required},
        }

    @staticmethod
    def from_schema(schema: dict[str, Any]) -> "ToolDescriptor":
        params = []
        spec = schema.get("parameters") or {}
        required = set(spec.get("required") or [])
        for pname, pspec in (spec.get("properties") or {}).items():
            if "enum" in pspec:
                params.append(ToolParam(pname, "enum", pname in required,
                                        pspec.get("description", ""),
                                        tuple(pspec["enum"])))
            else:
                params.append(ToolParam(pname, pspec.get("type", "string"),
                                        pname in required, pspec.get("description", "")))
        return ToolDescriptor(schema["name"], schema.get("description", ""), tuple(params))


def _type_ok(value: Any, param: ToolParam) -> bool:
    # bool is an int subclass; keep boolean arguments out of numeric slots
    if param.type == "string":
        return isinstance(value, str)
    if param.type == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if param.type == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if param.type == "boolean":
        return isinstance(value, bool)
    if param.type == "enum":
        return isinstance(value, str) and value in (param.enum_values or ())
    if param.type == "object":
        return isinstance(value, dict)
    return False


@dataclass
class ValidationReport:
    missing: list[str] = field(default_factory=list)
    invalid: list[dict[str, Any]] = field(default_factory=list)
    unknown: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.missing or self.invalid or self.unknown)

    def error_payload(self, tool_name: str) -> dict[str, Any]:
        """Structured validation-error payload appended as a tool turn.

        This is the signal that drives guided elicitation: the model sees
        exactly which parameters are missing or malformed and is expected to
        ask the user for them.
        """
        parts = []
        if self.missing:
            parts.append("missing required parameter(s): " + ", ".join(self.missing))
        if self.invalid:
            parts.append("invalid parameter(s): " +
                         ", ".join(f"{e['name']} (expected {e['expected']})" for e in self.invalid))
        if self.unknown:
            parts.append("unknown parameter(s): " + ", ".join(self.unknown))
        return {
            "error": "validation_error",
            "tool": tool_name,
            "missing": list(self.missing),
            "invalid": list(self.invalid),
            "unknown": list(self.unknown),
            "message": "; ".join(parts) + ". Please ask the user for the missing details.",
        }


def validate_arguments(descriptor: ToolDescriptor, arguments: dict[str, Any]) -> ValidationReport:
    report = ValidationReport()
    declared = {p.name: p for p in descriptor.parameters}
    for name in arguments:
        if name not in declared:
            report.unknown.append(name)
    for p in descriptor.parameters:
        if p.name not in arguments:
            if p.required:
                report.missing.append(p.name)
            continue
        if not _type_ok(arguments[p.name], p):
            expected = p.type if p.type != "enum" else f"one of {list(p.enum_values or ())}"
            report.invalid.append({"name": p.name, "expected": expected,
                                   "got": type(arguments[p.name]).__name__})
    return report


ToolHandler = Callable[[dict[str, Any]], dict[str, Any]]


class ToolRegistry:
    """Name -> (descriptor, handler) map. Immutable after startup by convention."""

    def __init__(self):
        self._tools: dict[str, tuple[ToolDescriptor, ToolHandler]] = {}

    def register(self, descriptor: ToolDescriptor, handler: ToolHandler) -> None:
        if descriptor.name in self._tools:
            raise DuplicateName(f"tool {descriptor.name!r} already registered")
        self._tools[descriptor.name] = (descriptor, handler)

    def descriptors(self) -> list[ToolDescriptor]:
        return [d for d, _ in self._tools.values()]

    def get(self, name: str) -> tuple[ToolDescriptor, ToolHandler] | None:
        return self._tools.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._tools

    def __len__(self) -> int:
        return len(self._tools)

    def dispatch(self, call: ToolCall) -> dict[str, Any]:
        descriptor, handler = self._tools[call.name]
        report = validate_arguments(descriptor, call.arguments)
        if not report.ok:
            return report.error_payload(call.name)
        return handler(call.arguments)
