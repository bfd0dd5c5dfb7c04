"""Figure rendering for availability-sweep and gap-profile CSV files."""

from figplots.render import FigureSpec, RenderResult, main, read_table, render

__all__ = ["FigureSpec", "RenderResult", "main", "read_table", "render"]
