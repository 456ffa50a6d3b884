import abc
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union
from xml.sax.saxutils import escape, quoteattr

from pydantic import BaseModel

SVG_NAMESPACE = "http://www.w3.org/2000/svg"


def _num(value: float) -> str:
    """Fixed two-decimal coordinates keep output byte-stable."""
    return f"{value:.2f}"


def _attrs(pairs: Sequence[Tuple[str, Optional[object]]], data: Optional[Dict[str, str]]) -> str:
    parts = []
    for key, value in pairs:
        if value is None:
            continue
        if isinstance(value, float):
            value = _num(value)
        parts.append(f"{key}={quoteattr(str(value))}")
    for key, value in sorted((data or {}).items()):
        parts.append(f"data-{key}={quoteattr(str(value))}")
    return " ".join(parts)


### START: ElementType ###
"""
ElementType Enum
================
Purpose: SVG element kinds used by the report figures
Supported Types:
- RECT: filled cells and backgrounds
- TEXT: labels, titles and in-cell p-values
- LINE: axes and the significance threshold
- POLYLINE: p-value curves
- GROUP: panels and legends
Usage: Tag of every element model
"""
class ElementType(str, Enum):
    """Element kinds for SVG figures."""
    RECT = "rect"
    TEXT = "text"
    LINE = "line"
    POLYLINE = "polyline"
    GROUP = "g"
### END: ElementType ###


class TextAnchor(str, Enum):
    START = "start"
    MIDDLE = "middle"
    END = "end"


### START: SvgElement ###
"""
SvgElement Base Class
=====================
Purpose: Abstract base for all SVG element models
Features:
- Every element serializes itself with to_xml()
- Optional data-* attributes for structural assertions
Use Case: Base class for Rect, Text, Line, Polyline and Group
"""
class SvgElement(BaseModel, abc.ABC):
    """Base model for SVG elements."""
    data: Optional[Dict[str, str]] = None

    @abc.abstractmethod
    def to_xml(self) -> str:
        """Serialize the element."""
        pass
### END: SvgElement ###


class Rect(SvgElement):
    type: ElementType = ElementType.RECT
    x: float
    y: float
    width: float
    height: float
    fill: str = "none"
    stroke: Optional[str] = None

    def to_xml(self) -> str:
        attrs = _attrs(
            [("x", self.x), ("y", self.y), ("width", self.width), ("height", self.height),
             ("fill", self.fill), ("stroke", self.stroke)],
            self.data,
        )
        return f"<rect {attrs}/>"


class Text(SvgElement):
    type: ElementType = ElementType.TEXT
    x: float
    y: float
    text: str
    font_size: int = 12
    anchor: TextAnchor = TextAnchor.START
    weight: Optional[str] = None
    rotate: Optional[float] = None

    def to_xml(self) -> str:
        transform = None
        if self.rotate is not None:
            transform = f"rotate({_num(self.rotate)} {_num(self.x)} {_num(self.y)})"
        attrs = _attrs(
            [("x", self.x), ("y", self.y), ("font-size", self.font_size), ("text-anchor", self.anchor.value),
             ("font-weight", self.weight), ("transform", transform)],
            self.data,
        )
        return f"<text {attrs}>{escape(self.text)}</text>"


class Line(SvgElement):
    type: ElementType = ElementType.LINE
    x1: float
    y1: float
    x2: float
    y2: float
    stroke: str = "#000000"
    stroke_width: float = 1.0
    dash: Optional[str] = None

    def to_xml(self) -> str:
        attrs = _attrs(
            [("x1", self.x1), ("y1", self.y1), ("x2", self.x2), ("y2", self.y2), ("stroke", self.stroke),
             ("stroke-width", self.stroke_width), ("stroke-dasharray", self.dash)],
            self.data,
        )
        return f"<line {attrs}/>"


class Polyline(SvgElement):
    type: ElementType = ElementType.POLYLINE
    points: List[Tuple[float, float]]
    stroke: str = "#000000"
    stroke_width: float = 2.0
    dash: Optional[str] = None

    def to_xml(self) -> str:
        points = " ".join(f"{_num(px)},{_num(py)}" for px, py in self.points)
        attrs = _attrs(
            [("points", points), ("fill", "none"), ("stroke", self.stroke),
             ("stroke-width", self.stroke_width), ("stroke-dasharray", self.dash)],
            self.data,
        )
        return f"<polyline {attrs}/>"


class Group(SvgElement):
    type: ElementType = ElementType.GROUP
    id: Optional[str] = None
    children: List["Element"] = []

    def to_xml(self) -> str:
        attrs = _attrs([("id", self.id)], self.data)
        opening = f"<g {attrs}>" if attrs else "<g>"
        inner = "\n".join(child.to_xml() for child in self.children)
        return f"{opening}\n{inner}\n</g>"


Element = Union[Rect, Text, Line, Polyline, Group]
Group.model_rebuild()


### START: SvgDocument ###
"""
SvgDocument Class
=================
Purpose: Complete SVG 1.1 document with a single root element
Features:
- White background sized to the canvas
- Deterministic serialization (no timestamps, fixed number format)
Attributes:
- width, height: canvas size in pixels
- title: accessible document title
- children: top-level elements
Methods:
- to_xml(): serialize to a standalone SVG string
"""
class SvgDocument(BaseModel):
    """Standalone SVG document."""
    width: int
    height: int
    title: str
    children: List[Element] = []

    def to_xml(self) -> str:
        header = (
            f'<svg xmlns="{SVG_NAMESPACE}" version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" font-family="Helvetica, Arial, sans-serif">'
        )
        background = Rect(x=0.0, y=0.0, width=float(self.width), height=float(self.height), fill="#FFFFFF")
        body = "\n".join(child.to_xml() for child in self.children)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f"{header}\n<title>{escape(self.title)}</title>\n{background.to_xml()}\n{body}\n</svg>\n"
        )
### END: SvgDocument ###
