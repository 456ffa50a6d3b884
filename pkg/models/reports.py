import abc
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from models.errors import RenderWriteError, UnsupportedFormat
from models.models import (
    Adjustment,
    CausalityMatrix,
    GrangerResult,
    LagScanResult,
    OutputFormat,
    RenderOptions,
    SearchResult,
    SeriesTable,
)
from report_blocks.blocks import Element, Group, Line, Polyline, Rect, SvgDocument, Text, TextAnchor
from workflows.search import causality_matrix


# ============================================================================
# NUMBER FORMATTING
# ============================================================================

LISTING_SCIENTIFIC_BELOW = 5e-5


def format_p_verdict(p: float) -> str:
    """Fixed four decimals, as in verdict lines: 'p = 0.2983'."""
    return f"{p:.4f}"


def format_p_listing(p: float) -> str:
    """Four decimals, or a single significant digit below 5e-5 ('0.0000003')."""
    if p == 0.0:
        return "0"
    if p < LISTING_SCIENTIFIC_BELOW:
        return np.format_float_positional(p, precision=1, unique=False, fractional=False, trim="k")
    return f"{p:.4f}"


def _title(text: str) -> List[str]:
    return [text, "=" * len(text), ""]


# ============================================================================
# BASE REPORT MODEL
# ============================================================================

class JsonEnvelope(BaseModel):
    meta: Dict[str, Any]
    rows: List[Dict[str, Any]]


### START: ReportModel ###
"""
Report Model Base Class
=======================
Purpose: Abstract base for everything that renders an analysis result
Features:
- text: the human-readable print layout
- csv / json: one record per row plus result metadata
- svg: a static figure, for results that have one
Use Case: render_granger_result, render_search and render_lag_scan wrap
their result in a report and call render()
"""
class ReportModel(BaseModel, abc.ABC):
    """Base model for result reports."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @abc.abstractmethod
    def to_text(self) -> str:
        """Human-readable report."""
        pass

    @abc.abstractmethod
    def meta(self) -> Dict[str, Any]:
        """Result-level metadata."""
        pass

    @abc.abstractmethod
    def to_records(self) -> List[Dict[str, Any]]:
        """One dict per output row."""
        pass

    def to_svg(self, opts: RenderOptions) -> str:
        raise UnsupportedFormat(OutputFormat.SVG.value, type(self).__name__)

    def to_json(self) -> str:
        return JsonEnvelope(meta=self.meta(), rows=self.to_records()).model_dump_json(indent=2) + "\n"

    def to_csv(self) -> str:
        return pd.DataFrame(self.to_records()).to_csv(index=False, lineterminator="\n")

    def render(self, opts: RenderOptions) -> str:
        if opts.format == OutputFormat.TEXT:
            content = self.to_text()
        elif opts.format == OutputFormat.CSV:
            content = self.to_csv()
        elif opts.format == OutputFormat.JSON:
            content = self.to_json()
        else:
            content = self.to_svg(opts)
        if opts.output_path is not None:
            write_text(opts.output_path, content)
        return content
### END: ReportModel ###


def write_text(path: Union[str, Path], content: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(content)
    except OSError as exc:
        raise RenderWriteError(str(path), exc.strerror or str(exc)) from None


# ============================================================================
# GRANGER TEST REPORT
# ============================================================================

### START: GrangerReport ###
"""
Granger Test Report
===================
Purpose: Print layout and tidy serializations of one pair test
Features:
- Header with observations, lag order and significance level
- One verdict line per direction with p to four decimals
- csv rows are the tidy table with the glance fields appended
"""
class GrangerReport(ReportModel):
    result: GrangerResult

    def _directions(self) -> List[Tuple[str, str, float, float, bool]]:
        r = self.result
        return [
            (r.x_name, r.y_name, r.test_statistic_xy, r.p_value_xy, r.x_causes_y),
            (r.y_name, r.x_name, r.test_statistic_yx, r.p_value_yx, r.y_causes_x),
        ]

    def to_text(self) -> str:
        r = self.result
        lines = _title("Granger Causality Test")
        lines.append(f"Observations: {r.n}, Lag order: {r.lag}, Significance level: {r.alpha:.3f}")
        lines.append("")
        for cause, effect, _, p_value, significant in self._directions():
            verb = "Granger-causes" if significant else "does not Granger-cause"
            lines.append(f"{cause} -> {effect}: {cause} {verb} {effect} (p = {format_p_verdict(p_value)})")
        return "\n".join(lines) + "\n"

    def meta(self) -> Dict[str, Any]:
        r = self.result
        return {
            "lag": r.lag,
            "alpha": r.alpha,
            "n": r.n,
            "x_name": r.x_name,
            "y_name": r.y_name,
            "test": r.test,
            "df_num": r.df_num,
            "df_den": r.df_den,
            "df_convention": r.df_convention.value,
        }

    def to_records(self) -> List[Dict[str, Any]]:
        return [
            {
                "direction": f"{cause} -> {effect}",
                "cause": cause,
                "effect": effect,
                "statistic": statistic,
                "p_value": p_value,
                "significant": significant,
            }
            for cause, effect, statistic, p_value, significant in self._directions()
        ]

    def to_csv(self) -> str:
        glance = {key: self.meta()[key] for key in ("lag", "alpha", "n", "x_name", "y_name")}
        rows = [{**record, **glance} for record in self.to_records()]
        return pd.DataFrame(rows).to_csv(index=False, lineterminator="\n")
### END: GrangerReport ###


# ============================================================================
# SEARCH REPORT
# ============================================================================

### START: SearchReport ###
"""
Search Report
=============
Purpose: Print layout, records and causality-matrix figure of a search
Features:
- Variable list, pairs examined, significant count, sorted rows
- Two side-by-side K x K panels: row causes column, and the reverse
- Cells filled by significance with the p-value printed inside
"""
class SearchReport(ReportModel):
    result: SearchResult
    matrix: CausalityMatrix

    def _lag_phrase(self) -> str:
        lags = self.result.lags_tested
        if len(lags) == 1:
            return f"lag order {lags[0]}"
        return "lag orders " + ", ".join(str(lag) for lag in lags)

    def to_text(self) -> str:
        r = self.result
        adjusted = r.adjustment != Adjustment.NONE
        found = r.n_significant
        noun = "relationship" if found == 1 else "relationships"
        lines = _title("Granger Causality Search Results")
        lines.append(f"{len(r.variables)} variables tested: {', '.join(r.variables)}")
        lines.append(f"{r.pairs_examined} directed pairs examined at {self._lag_phrase()}")
        lines.append(f"{found} significant {noun} found (alpha = {r.alpha:g})")
        if adjusted:
            lines.append(f"p-values adjusted for multiple testing: {r.adjustment.value}")
        lines.append("")
        if not r.rows:
            lines.append("No significant relationships.")
            return "\n".join(lines) + "\n"

        lines.append("Results (sorted by adjusted p-value):" if adjusted else "Results (sorted by p-value):")
        w_cause = max(len("cause"), *(len(row.cause) for row in r.rows))
        w_effect = max(len("effect"), *(len(row.effect) for row in r.rows))
        p_texts = [format_p_listing(row.p_value) for row in r.rows]
        w_p = max(len("p.value"), *(len(text) for text in p_texts))
        header = f"  {'cause':<{w_cause}}  {'effect':<{w_effect}}  {'p.value':>{w_p}}"
        if adjusted:
            adj_texts = [format_p_listing(row.p_adjusted) for row in r.rows]
            w_adj = max(len("p.adjusted"), *(len(text) for text in adj_texts))
            header += f"  {'p.adjusted':>{w_adj}}"
        lines.append(header + "  lag  significant")
        for index, row in enumerate(r.rows):
            line = f"  {row.cause:<{w_cause}}  {row.effect:<{w_effect}}  {p_texts[index]:>{w_p}}"
            if adjusted:
                line += f"  {adj_texts[index]:>{w_adj}}"
            line += f"  {row.lag:>3}  {'TRUE' if row.significant else 'FALSE'}"
            lines.append(line)
        return "\n".join(lines) + "\n"

    def meta(self) -> Dict[str, Any]:
        r = self.result
        return {
            "variables": list(r.variables),
            "lags_tested": list(r.lags_tested),
            "alpha": r.alpha,
            "adjustment": r.adjustment.value,
            "include_insignificant": r.include_insignificant,
            "pairs_examined": r.pairs_examined,
            "n_significant": r.n_significant,
            "n": r.n,
        }

    def to_records(self) -> List[Dict[str, Any]]:
        return [row.model_dump() for row in self.result.rows]

    def to_csv(self) -> str:
        columns = ["cause", "effect", "statistic", "p_value", "p_adjusted", "lag", "significant"]
        return pd.DataFrame(self.to_records(), columns=columns).to_csv(index=False, lineterminator="\n")

    def to_svg(self, opts: RenderOptions) -> str:
        variables = self.matrix.variables
        k = len(variables)
        margin, label_space, top, bottom = 30.0, 60.0, 80.0, 50.0
        panel = min((opts.width_px - 2 * margin - 2 * label_space) / 2.0, opts.height_px - top - bottom)
        panel = max(panel, 10.0 * k)
        cell = panel / k
        font = max(8, min(14, int(cell / 5)))

        children: List[Element] = [
            Text(x=opts.width_px / 2.0, y=28.0, text=f"Granger causality matrix (alpha = {self.matrix.alpha:g})",
                 font_size=16, anchor=TextAnchor.MIDDLE, weight="bold"),
        ]
        panels = (
            ("forward", "Row variables Granger-cause column variables"),
            ("reverse", "Column variables Granger-cause row variables"),
        )
        for index, (panel_id, title) in enumerate(panels):
            left = margin + label_space + index * (panel + label_space + margin)
            items: List[Element] = [
                Text(x=left + panel / 2.0, y=top - 30.0, text=title, font_size=13, anchor=TextAnchor.MIDDLE),
            ]
            for i, name in enumerate(variables):
                items.append(Text(x=left - 6.0, y=top + (i + 0.5) * cell + 4.0, text=name, anchor=TextAnchor.END))
                items.append(Text(x=left + (i + 0.5) * cell, y=top - 8.0, text=name, anchor=TextAnchor.MIDDLE))
            for i, row_name in enumerate(variables):
                for j, col_name in enumerate(variables):
                    if i == j:
                        continue
                    if panel_id == "forward":
                        test = self.matrix.cell(row_name, col_name)
                    else:
                        test = self.matrix.cell(col_name, row_name)
                    if test is None:
                        continue
                    fill = opts.significant_color if test.significant else opts.insignificant_color
                    x, y = left + j * cell, top + i * cell
                    items.append(Rect(x=x, y=y, width=cell, height=cell, fill=fill, stroke="#FFFFFF",
                                      data={"panel": panel_id, "row": row_name, "col": col_name}))
                    items.append(Text(x=x + cell / 2.0, y=y + cell / 2.0 + font / 3.0, text=format_p_listing(test.p_value),
                                      font_size=font, anchor=TextAnchor.MIDDLE))
            items.append(Rect(x=left, y=top, width=panel, height=panel, fill="none", stroke="#666666"))
            children.append(Group(id=f"panel-{panel_id}", children=items))

        legend_y = top + panel + 24.0
        legend_x = margin + label_space
        children.append(Group(id="legend", children=[
            Rect(x=legend_x, y=legend_y - 10.0, width=12.0, height=12.0, fill=opts.significant_color),
            Text(x=legend_x + 18.0, y=legend_y, text=f"significant (p < {self.matrix.alpha:g})"),
            Rect(x=legend_x + 180.0, y=legend_y - 10.0, width=12.0, height=12.0, fill=opts.insignificant_color),
            Text(x=legend_x + 198.0, y=legend_y, text="not significant"),
        ]))
        height = max(opts.height_px, int(legend_y + 20.0))
        return SvgDocument(width=opts.width_px, height=height, title="Granger causality matrix",
                           children=children).to_xml()
### END: SearchReport ###


# ============================================================================
# LAG SCAN REPORT
# ============================================================================

### START: LagScanReport ###
"""
Lag Scan Report
===============
Purpose: Print layout, records and p-value curve of a lag scan
Features:
- Summary of significant lags per direction
- Best lag by minimum p-value, then AIC / BIC per lag
- Figure: p-value against lag, solid x -> y, dashed y -> x,
  dashed horizontal threshold at alpha
"""
class LagScanReport(ReportModel):
    result: LagScanResult

    @staticmethod
    def _summary(count: int, significant_lags: List[int], total: int) -> str:
        if count == total:
            return f"Significant at all {total} lag orders"
        if count == 0:
            return "Never significant"
        listed = ", ".join(str(lag) for lag in significant_lags)
        return f"Significant at {count} of {total} lag orders (lags {listed})"

    def to_text(self) -> str:
        r = self.result
        xy, yx = f"{r.x_name} -> {r.y_name}", f"{r.y_name} -> {r.x_name}"
        total = len(r.lags)
        lines = _title("Granger Lag Selection Analysis")
        lines.append(f"Variables: {xy} (and reverse)")
        lines.append(f"Lag orders tested: {', '.join(str(lag) for lag in r.lags)}")
        lines.append(f"Significance level: {r.alpha:g}")
        lines.append("")
        lines.append("Summary:")
        lines.append(f"  {xy}: " + self._summary(
            r.n_significant_xy, [row.lag for row in r.per_lag if row.significant_xy], total))
        lines.append(f"  {yx}: " + self._summary(
            r.n_significant_yx, [row.lag for row in r.per_lag if row.significant_yx], total))
        lines.append("")
        lines.append("Best lag (by minimum p-value):")
        lines.append(f"  {xy}: lag = {r.best_lag_xy} (p = {format_p_listing(r.best_p_xy)})")
        lines.append(f"  {yx}: lag = {r.best_lag_yx} (p = {format_p_listing(r.best_p_yx)})")
        lines.append("")
        lines.append("Information criteria (VAR residual covariance):")
        lines.append(f"  {'lag':>3}  {'AIC':>10}  {'BIC':>10}")
        for row in r.per_lag:
            lines.append(f"  {row.lag:>3}  {row.aic:>10.4f}  {row.bic:>10.4f}")
        lines.append(f"AIC-preferred lag: {r.aic_lag}, BIC-preferred lag: {r.bic_lag}")
        return "\n".join(lines) + "\n"

    def meta(self) -> Dict[str, Any]:
        r = self.result
        return {
            "x_name": r.x_name,
            "y_name": r.y_name,
            "lags": list(r.lags),
            "alpha": r.alpha,
            "n": r.n,
            "best_lag_xy": r.best_lag_xy,
            "best_lag_yx": r.best_lag_yx,
            "n_significant_xy": r.n_significant_xy,
            "n_significant_yx": r.n_significant_yx,
            "aic_lag": r.aic_lag,
            "bic_lag": r.bic_lag,
        }

    def to_records(self) -> List[Dict[str, Any]]:
        return [row.model_dump() for row in self.result.per_lag]

    def to_svg(self, opts: RenderOptions) -> str:
        r = self.result
        left, right, top, bottom = 70.0, 30.0, 60.0, 70.0
        plot_w = opts.width_px - left - right
        plot_h = opts.height_px - top - bottom
        lo, hi = r.lags[0], r.lags[-1]

        def px(lag: int) -> float:
            if hi == lo:
                return left + plot_w / 2.0
            return left + (lag - lo) / (hi - lo) * plot_w

        def py(p: float) -> float:
            return top + (1.0 - p) * plot_h

        children: List[Element] = [
            Text(x=opts.width_px / 2.0, y=30.0, text=f"Lag selection: {r.x_name} and {r.y_name}",
                 font_size=16, anchor=TextAnchor.MIDDLE, weight="bold"),
            Line(x1=left, y1=top + plot_h, x2=left + plot_w, y2=top + plot_h),
            Line(x1=left, y1=top, x2=left, y2=top + plot_h),
        ]
        for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
            children.append(Line(x1=left - 5.0, y1=py(tick), x2=left, y2=py(tick)))
            children.append(Text(x=left - 8.0, y=py(tick) + 4.0, text=f"{tick:.2f}", anchor=TextAnchor.END))
        for lag in r.lags:
            children.append(Line(x1=px(lag), y1=top + plot_h, x2=px(lag), y2=top + plot_h + 5.0))
            children.append(Text(x=px(lag), y=top + plot_h + 18.0, text=str(lag), anchor=TextAnchor.MIDDLE))
        children.append(Text(x=left + plot_w / 2.0, y=opts.height_px - 20.0, text="Lag order", anchor=TextAnchor.MIDDLE))
        children.append(Text(x=18.0, y=top + plot_h / 2.0, text="p-value", anchor=TextAnchor.MIDDLE, rotate=-90.0))

        children.append(Line(x1=left, y1=py(r.alpha), x2=left + plot_w, y2=py(r.alpha), stroke="#888888",
                             dash="4,4", data={"threshold": f"{r.alpha:g}"}))
        children.append(Polyline(points=[(px(lag), py(p)) for lag, p, _ in r.p_value_curve()], stroke="#4477AA",
                                 data={"direction": "x_to_y"}))
        children.append(Polyline(points=[(px(lag), py(p)) for lag, _, p in r.p_value_curve()], stroke="#CC6677",
                                 dash="6,4", data={"direction": "y_to_x"}))

        legend_x = left + plot_w - 170.0
        children.append(Group(id="legend", children=[
            Line(x1=legend_x, y1=top + 10.0, x2=legend_x + 24.0, y2=top + 10.0, stroke="#4477AA", stroke_width=2.0),
            Text(x=legend_x + 30.0, y=top + 14.0, text=f"{r.x_name} -> {r.y_name}"),
            Line(x1=legend_x, y1=top + 28.0, x2=legend_x + 24.0, y2=top + 28.0, stroke="#CC6677", stroke_width=2.0,
                 dash="6,4"),
            Text(x=legend_x + 30.0, y=top + 32.0, text=f"{r.y_name} -> {r.x_name}"),
            Line(x1=legend_x, y1=top + 46.0, x2=legend_x + 24.0, y2=top + 46.0, stroke="#888888", dash="4,4"),
            Text(x=legend_x + 30.0, y=top + 50.0, text=f"alpha = {r.alpha:g}"),
        ]))
        return SvgDocument(width=opts.width_px, height=opts.height_px, title="Granger lag selection",
                           children=children).to_xml()
### END: LagScanReport ###


# ============================================================================
# RENDER ENTRY POINTS
# ============================================================================

def render_granger_result(result: GrangerResult, opts: Optional[RenderOptions] = None) -> str:
    opts = opts or RenderOptions()
    if opts.format == OutputFormat.SVG:
        raise UnsupportedFormat(OutputFormat.SVG.value, "a single Granger test")
    return GrangerReport(result=result).render(opts)


def render_search(result: SearchResult, opts: Optional[RenderOptions] = None) -> str:
    return SearchReport(result=result, matrix=causality_matrix(result)).render(opts or RenderOptions())


def render_lag_scan(result: LagScanResult, opts: Optional[RenderOptions] = None) -> str:
    return LagScanReport(result=result).render(opts or RenderOptions())


def write_series_csv(table: SeriesTable, path: Optional[Union[str, Path]] = None) -> str:
    """RFC-4180 CSV with full-precision floats; reloads to identical values."""
    content = table.to_frame().to_csv(index=False, lineterminator="\n", float_format=None)
    if path is not None:
        write_text(path, content)
    return content
