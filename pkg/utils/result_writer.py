"""
Result serialisation for the command-line tool.

Results are carried as a ResultRecord whose primary table is a pandas
DataFrame; CSV writes that table, JSON writes the whole record with
floats printed as %.17g.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from config.config import Config
from core.exceptions import NonFiniteValueError, RunConfigError
from core.grid import GridSpec

logger = logging.getLogger(__name__)

RESULT_KINDS = ('pairs', 'matrix', 'functions', 'criteria')


@dataclass
class ResultRecord:
    command: str
    grid: Optional[GridSpec]
    params: Dict[str, Any]
    kind: str
    table: pd.DataFrame
    scalars: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in RESULT_KINDS:
            raise RunConfigError(f"unknown result kind '{self.kind}'")


def _split_complex(frame: pd.DataFrame) -> pd.DataFrame:
    """Replace each complex column c by c_re, c_im"""
    columns = {}
    for name in frame.columns:
        series = frame[name]
        if np.iscomplexobj(series.to_numpy()):
            values = series.to_numpy()
            columns[f"{name}_re"] = values.real
            columns[f"{name}_im"] = values.imag
        else:
            columns[name] = series.to_numpy()
    return pd.DataFrame(columns)


def kernel_frame(grid: GridSpec, samples: np.ndarray, lower_only: bool = True) -> pd.DataFrame:
    """Long format x, y, value; only i >= j when ``lower_only``"""
    if lower_only:
        rows, cols = np.tril_indices(grid.size)
    else:
        rows, cols = np.indices((grid.size, grid.size)).reshape(2, -1)
    return pd.DataFrame({
        'x': grid.nodes[rows],
        'y': grid.nodes[cols],
        'value': np.asarray(samples)[rows, cols],
    })


def pairs_frame(points: Sequence[Sequence[float]], values: Sequence[Any]) -> pd.DataFrame:
    return pd.DataFrame({
        'x': [float(p[0]) for p in points],
        'y': [float(p[1]) for p in points],
        'value': np.asarray(values),
    })


def functions_frame(grid: GridSpec, functions: Dict[str, np.ndarray]) -> pd.DataFrame:
    data = {'x': grid.nodes}
    for name, values in functions.items():
        data[name] = np.asarray(values)
    return pd.DataFrame(data)


def _plain(value: Any) -> Any:
    """numpy scalars and arrays to python objects"""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        raise NonFiniteValueError(f"cannot serialise non-finite value {value}")
    return Config.OUTPUT_CONFIG['float_format'] % value


def encode_json(value: Any) -> str:
    """Deterministic JSON text: key order kept, floats as %.17g"""
    value = _plain(value)
    if value is None or isinstance(value, (bool, str)):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, complex):
        return encode_json({'re': value.real, 'im': value.imag})
    if isinstance(value, dict):
        items = [f"{json.dumps(key)}: {encode_json(item)}" for key, item in value.items()]
        return '{' + ', '.join(items) + '}'
    if isinstance(value, list):
        return '[' + ', '.join(encode_json(item) for item in value) + ']'
    raise RunConfigError(f"cannot serialise value of type {type(value).__name__}")


class ResultWriter:
    """Writes a ResultRecord as CSV or JSON"""

    def __init__(self, output_format: Optional[str] = None):
        cfg = Config.OUTPUT_CONFIG
        self.output_format = output_format or cfg['default_format']
        if self.output_format not in cfg['formats']:
            raise RunConfigError(f"unsupported output format '{self.output_format}'")

    def render(self, record: ResultRecord) -> str:
        if self.output_format == 'csv':
            return self.to_csv(record)
        return self.to_json(record)

    def to_csv(self, record: ResultRecord) -> str:
        cfg = Config.OUTPUT_CONFIG
        frame = _split_complex(record.table)
        numeric = frame.select_dtypes(include=[np.number])
        if not np.all(np.isfinite(numeric.to_numpy(dtype=float))):
            raise NonFiniteValueError("result table contains non-finite values")
        return frame.to_csv(index=False, float_format=cfg['float_format'],
                            lineterminator=cfg['line_terminator'])

    def to_json(self, record: ResultRecord) -> str:
        document = {
            'command': record.command,
            'grid': None if record.grid is None else {
                'a': record.grid.a, 'b': record.grid.b, 'n': record.grid.n_intervals},
            'params': record.params,
            'results': {record.kind: self._results_body(record)},
        }
        if record.scalars:
            document['results']['scalars'] = record.scalars
        return encode_json(document) + '\n'

    def _results_body(self, record: ResultRecord) -> Any:
        table = record.table
        if record.kind in ('pairs', 'criteria'):
            # records keep per-column types; a complex value column must not upcast x, y
            return table.to_dict(orient='records')
        if record.kind == 'matrix':
            return self._matrix_body(record)
        return [{'name': name, 'values': table[name].to_numpy()} for name in table.columns]

    def _matrix_body(self, record: ResultRecord) -> Dict[str, Any]:
        """Full row-major matrix; entries missing from a lower-triangular table are zero"""
        grid = record.grid
        table = record.table
        rows = np.rint((table['x'].to_numpy() - grid.a) / grid.step).astype(int)
        cols = np.rint((table['y'].to_numpy() - grid.a) / grid.step).astype(int)
        values = table['value'].to_numpy()
        matrix = np.zeros((grid.size, grid.size), dtype=values.dtype)
        matrix[rows, cols] = values
        return {'rows': grid.size, 'cols': grid.size, 'x': grid.nodes, 'data': matrix.ravel()}

    def write(self, record: ResultRecord, output_path: Optional[str] = None) -> str:
        text = self.render(record)
        if output_path:
            path = Path(output_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding='utf-8', newline='')
            logger.info(f"Wrote {self.output_format} results to {path}")
        return text
