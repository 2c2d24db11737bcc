"""
File:           plots.py
Author:         Dibyaranjan Sathua
Created on:     14/08/22, 10:21 am
"""
from typing import Dict
from pathlib import Path

import plotly.graph_objects as go

from src.lipschitz.regret_analysis import AggregateResult


def regret_figure(results: Dict[str, AggregateResult], title: str = "Cumulative regret") -> go.Figure:
    """ One line per labelled result: mean cumulative regret against t """
    figure = go.Figure()
    for label, result in results.items():
        curve = result.mean_curve()
        figure.add_trace(go.Scatter(x=curve["t"], y=curve["cum_regret"], mode="lines", name=label))
    figure.update_layout(title=title, xaxis_title="t", yaxis_title="cumulative regret", template="plotly_white")
    return figure


def write_regret_html(results: Dict[str, AggregateResult], filepath: Path, title: str = "Cumulative regret") -> Path:
    regret_figure(results, title).write_html(str(filepath), include_plotlyjs="cdn")
    return filepath
