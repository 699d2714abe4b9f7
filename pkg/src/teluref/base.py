"""Estimator plumbing: parameter introspection and input validation helpers.

The classifier and samplers follow the scikit-learn protocol (``fit`` /
``predict`` / ``fit_resample`` plus ``get_params`` / ``set_params``) so they
compose with pipelines and grid search, but nothing here imports sklearn.
"""

from __future__ import annotations

import inspect

import numpy as np

from .errors import ValidationError


class ParamsMixin:
    """get_params/set_params driven by the ``__init__`` signature.

    Subclasses must store every constructor argument on ``self`` under the
    same name, the same convention sklearn estimators follow.
    """

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [
            name
            for name, p in sig.parameters.items()
            if name != "self" and p.kind not in (p.VAR_POSITIONAL, p.VAR_KEYWORD)
        ]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters are {sorted(valid)}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


def check_matrix(X, name="X", n_cols=None) -> np.ndarray:
    """Coerce X to a 2-D float64 array, optionally pinning the column count."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise ValidationError(
            f"{name} must have {n_cols} columns, got {arr.shape[1]}"
        )
    return arr


def check_vector(x, name="x", size=None) -> np.ndarray:
    """Coerce x to a 1-D float64 array, optionally pinning its length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if size is not None and arr.size != size:
        raise ValidationError(f"{name} must have length {size}, got {arr.size}")
    return arr


def check_labels(y, n=None, name="y") -> np.ndarray:
    """Coerce labels to a boolean vector of length n."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if n is not None and arr.size != n:
        raise ValidationError(f"{name} must have length {n}, got {arr.size}")
    return arr.astype(bool)


def check_consistent_length(*arrays):
    lengths = {len(a) for a in arrays if a is not None}
    if len(lengths) > 1:
        raise ValidationError(f"inconsistent lengths: {sorted(lengths)}")
