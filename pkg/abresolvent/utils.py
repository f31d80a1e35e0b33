from pathlib import Path
import json
import numpy as np
import yaml
from concurrent.futures import ThreadPoolExecutor
from sklearn.linear_model import LinearRegression
from tqdm import tqdm
from typing import Any, Callable, Dict, Iterable, List, Sequence, Tuple, Union


def dir_exists(path: str) -> bool:
    return Path(path).exists()
# ----------------------------------------------------------------------------------------------------------------------


def ensure_dir(path: str) -> Path:
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    return directory
# ----------------------------------------------------------------------------------------------------------------------


def check_positive(values: Union[float, np.ndarray],
                   name: str):
    if np.any(~(np.asarray(values) > 0)):
        raise ValueError(f"{name} must be positive")
# ----------------------------------------------------------------------------------------------------------------------


def complex_to_dict(value: complex) -> Dict[str, float]:
    return {"re": float(np.real(value)), "im": float(np.imag(value))}
# ----------------------------------------------------------------------------------------------------------------------


def fit_slope(x: Sequence[float],
              y: Sequence[float]) -> Tuple[float, float]:
    """
    fit_slope(x, y)

        Least squares line y ≈ slope·x + intercept

        Parameters
        ----------
        x: Sequence[float]
        y: Sequence[float]

        Returns
        -------
        (slope, intercept)
    """
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    y = np.asarray(y, dtype=float)
    if x.shape[0] < 2:
        raise ValueError("at least two points are needed for a slope fit")
    reg = LinearRegression().fit(x, y)
    return float(reg.coef_[0]), float(reg.intercept_)
# ----------------------------------------------------------------------------------------------------------------------


def load_structured_file(path: str) -> Dict:
    """
    load_structured_file(path)

        Reads JSON (.json) or YAML (.yaml, .yml) file into dict
    """
    if not dir_exists(path):
        raise FileNotFoundError(f"File {path} does not exist")
    suffix = Path(path).suffix.lower()
    with open(path, 'r') as file:
        if suffix == '.json':
            data = json.load(file)
        elif suffix in ('.yaml', '.yml'):
            data = yaml.safe_load(file)
        else:
            raise ValueError(f"Unsupported file format: {suffix}")
    if not isinstance(data, dict):
        raise ValueError(f"{path} must contain a mapping")
    return data
# ----------------------------------------------------------------------------------------------------------------------


def parallel_map(func: Callable,
                 items: Iterable,
                 threads: int = 1,
                 desc: str = '',
                 verbose: bool = True) -> List[Any]:
    """
    parallel_map(func, items, threads, desc, verbose)

        Ordered map of func over items, in a thread pool when threads > 1

        Parameters
        ----------
        func: Callable
        items: Iterable
        threads: int
        desc: str
            progress bar caption
        verbose: bool
            shows tqdm progress bar

        Returns
        -------
        List
    """
    items = list(items)
    if threads <= 1:
        return [func(item) for item in tqdm(items, desc=desc, disable=not verbose)]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(tqdm(executor.map(func, items), total=len(items), desc=desc, disable=not verbose))
# ----------------------------------------------------------------------------------------------------------------------
