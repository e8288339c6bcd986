"""scikit-learn compatible wrappers around the indicator and assessment engines.

Both estimators are stateless apart from input validation, so ``fit`` only
checks the data and records column names. Inputs are tables with the dataset
columns (``country``, ``period``, ``m0`` ...): a pandas DataFrame, a list of
dicts, or a list of :class:`~marketfunc.core.AggregateObservation`.

Values stay exact decimals (object columns) unless ``as_float=True``.
"""

from __future__ import annotations

from decimal import Decimal
from typing import Any, Iterable

import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .assessment import assess_accumulation, assess_redistribution
from .core import AggregateObservation, Issue, ValidationError, consecutive_pairs
from .indicators import SIGNIFICANCE_MARGIN, compute_indicators
from .io import INDICATOR_FIELDS, indicator_record, report_from_record
from .normalization import CountryProfile, ProfileSet, load_profiles, normalize


def check_observations(X: Any, profiles: ProfileSet | str | None = None) -> list[AggregateObservation]:
    """Validate tabular input and return canonical observations.

    Rows are normalized through the country profiles. Every problem across
    all rows is collected into a single ``ValidationError``.
    """
    if isinstance(profiles, (str, bytes)) or profiles is None or hasattr(profiles, "__fspath__"):
        profiles = load_profiles(profiles)
    if isinstance(X, pd.DataFrame):
        records: Iterable[Any] = X.to_dict(orient="records")
    elif isinstance(X, (list, tuple)):
        records = X
    else:
        raise TypeError(f"expected a DataFrame or a list of records, got {type(X).__name__}")

    out: list[AggregateObservation] = []
    errors: list[Issue] = []
    for row, record in enumerate(records):
        if isinstance(record, AggregateObservation):
            out.append(record)
            continue
        report, issues = report_from_record(dict(record), row)
        if report is None:
            errors.extend(issues)
            continue
        profile = (
            profiles.lookup(report.country)
            if report.country in profiles
            else CountryProfile(report.country, report.country)
        )
        try:
            out.append(normalize(report, profile))
        except ValidationError as exc:
            errors.extend(exc.issues)
    if errors:
        raise ValidationError(errors)
    if not out:
        raise ValidationError([Issue("NoData", "no observations given")])
    return out


def _fit_columns(est: BaseEstimator, X: Any) -> None:
    if isinstance(X, pd.DataFrame):
        est.feature_names_in_ = list(map(str, X.columns))
        est.n_features_in_ = X.shape[1]


class IndicatorTransformer(TransformerMixin, BaseEstimator):
    """Map each observation row to its indicator set.

    Parameters
    ----------
    profiles : path or ProfileSet, optional
        Country profiles used for normalization; bundled ones by default.
    as_float : bool, default False
        Return float columns instead of exact ``Decimal`` objects.
    """

    def __init__(self, profiles=None, as_float: bool = False):
        self.profiles = profiles
        self.as_float = as_float

    def fit(self, X, y=None):
        check_observations(X, self.profiles)
        _fit_columns(self, X)
        self.fitted_ = True
        return self

    def transform(self, X) -> pd.DataFrame:
        check_is_fitted(self, "fitted_")
        observations = check_observations(X, self.profiles)
        rows = []
        for obs in observations:
            record = indicator_record(compute_indicators(obs))
            record["warnings"] = [w["code"] for w in record["warnings"]]
            rows.append(record)
        frame = pd.DataFrame(rows)
        numeric = [c for c in frame.columns if c not in ("country", "period", "m3_source", "warnings")]
        for col in numeric:
            if self.as_float:
                frame[col] = frame[col].map(lambda v: float(v) if v is not None else float("nan"))
            else:
                frame[col] = frame[col].map(lambda v: Decimal(v) if v is not None else None)
        return frame

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "fitted_")
        return ["country", "period", "m3_source", *INDICATOR_FIELDS, "warnings"]


class FunctionAssessor(BaseEstimator):
    """Predict whether the accumulation and redistribution functions are performed.

    ``predict`` returns one row per consecutive-year pair found in ``X``
    (grouped by country) with columns ``country``, ``prior``, ``current``,
    ``accumulation`` and ``redistribution``. Verdicts are ``True``/``False``,
    or ``None`` when redistribution lacks structural indicators.

    Parameters
    ----------
    margin : Decimal, default 10
        Percentage points above inflation that count as significant growth.
        Only affects the reported significance classes, not the verdicts.
    profiles : path or ProfileSet, optional
    """

    def __init__(self, margin: Decimal = SIGNIFICANCE_MARGIN, profiles=None):
        self.margin = margin
        self.profiles = profiles

    def fit(self, X, y=None):
        check_observations(X, self.profiles)
        _fit_columns(self, X)
        self.fitted_ = True
        return self

    def _pairs(self, X):
        check_is_fitted(self, "fitted_")
        pairs = consecutive_pairs(check_observations(X, self.profiles))
        if not pairs:
            raise ValidationError([Issue("InsufficientPeriods", "no consecutive-year pair in input")])
        return pairs

    def assess(self, X) -> list[tuple[Any, Any, Any]]:
        """Full verdict objects: ``(pair, accumulation, redistribution)`` per pair."""
        margin = Decimal(self.margin)
        return [
            (p, assess_accumulation(p, margin=margin), assess_redistribution(p, margin=margin))
            for p in self._pairs(X)
        ]

    def predict(self, X) -> pd.DataFrame:
        rows = [
            {
                "country": p.country,
                "prior": p.prior.period,
                "current": p.current.period,
                "accumulation": acc.performed,
                "redistribution": red.performed,
            }
            for p, acc, red in self.assess(X)
        ]
        return pd.DataFrame(rows)
