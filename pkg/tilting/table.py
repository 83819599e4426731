import pandas as pd

from distributions.pmf import Pmf
from tilting.tilt import LimitSide, limit_result, tilt


def parameter_table(P: Pmf) -> pd.DataFrame:
    """
    Three reference rows of the utility family: w = -inf, 0, +inf.

    Columns: omega, lambda, alpha, beta, then one column per label.
    The w = 0 row has beta = sum p_i^2 and U* = P; the limit rows have
    beta = p_max / p_min and U* concentrated on those symbols.
    """
    rows = []
    for result in (limit_result(P, LimitSide.MINUS), tilt(P, 0.0), limit_result(P, LimitSide.PLUS)):
        row = {
            "omega": result.omega,
            # -0.0 would print as "-0"
            "lambda": 0.0 if result.omega == 0 else -result.omega,
            "alpha": result.alpha,
            "beta": result.beta,
        }
        row.update(dict(zip(P.labels, result.utility.probs)))
        rows.append(row)
    df = pd.DataFrame(rows, columns=["omega", "lambda", "alpha", "beta", *P.labels])
    return df
