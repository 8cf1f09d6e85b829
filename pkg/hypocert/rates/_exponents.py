r"""
    Symbolic classification of decay envelopes and numerical exponent fits.
"""

from __future__ import annotations # See https://peps.python.org/pep-0563/

from dataclasses import dataclass
import math
from typing import Optional, Tuple
from typing_extensions import Literal

import numpy as np
import numpy.typing as npt
from scipy import stats
from typing_validation import validate

from ..model import ConfigurationError, KineticKind, Model, PotentialKind

ExponentKind = Literal["exponential", "stretched-exp", "algebraic", "algebraic-minus"]
r"""
    Decay classes: :math:`e^{-\lambda t}`, :math:`e^{-ct^r}`, :math:`t^{-r}`
    and :math:`t^{-r+\varepsilon}` for every :math:`\varepsilon>0`.
"""

_STRENGTH = {"algebraic-minus": 0, "algebraic": 1, "stretched-exp": 2, "exponential": 3}

@dataclass(frozen=True)
class ExponentClass:
    r"""
        A decay class with its exponent :math:`r>0` (unused for the exponential class).

        >>> ExponentClass("algebraic", 0.5).symbol
        't^-0.5'
    """

    kind: ExponentKind
    r: Optional[float] = None

    def __post_init__(self) -> None:
        validate(self.kind, ExponentKind)
        if self.kind != "exponential" and (self.r is None or not 0.0 < self.r < math.inf):
            raise ConfigurationError(f"Error constructing exponent class {self.kind!r}: exponent must be positive "
                                     f"(found {self.r!r}).")

    @property
    def symbol(self) -> str:
        r""" Compact textual form, used in tables. """
        if self.kind == "exponential":
            return "exp(-lambda t)"
        r = f"{self.r:.6g}"
        if self.kind == "stretched-exp":
            return f"exp(-c t^{r})"
        if self.kind == "algebraic":
            return f"t^-{r}"
        return f"t^-{r}-"

    @property
    def fit_kind(self) -> ExponentKind:
        r""" The kind used when fitting: algebraic-minus envelopes are fitted as algebraic. """
        return "algebraic" if self.kind == "algebraic-minus" else self.kind

    def strength(self) -> Tuple[int, float]:
        r""" Sort key: faster decay compares greater. """
        return _STRENGTH[self.kind], (math.inf if self.r is None else self.r)

def _spatial_class(kind: PotentialKind, param: float) -> Tuple[str, float]:
    if kind == "log":
        return "log", param
    return ("strong", param) if param >= 1.0 else ("weak", param)

def _velocity_class(kind: KineticKind, param: float) -> Tuple[str, float]:
    if kind == "gaussian":
        return "strong", 2.0
    return _spatial_class(kind, param)

def table1_exponent(potential_kind: PotentialKind, potential_param: float,
                    kinetic_kind: KineticKind, kinetic_param: Optional[float] = None) -> ExponentClass:
    r"""
        The decay class of :math:`\|h(t)\|^2` for a pair of benchmark energies.

        >>> table1_exponent("log", 2.0, "log", 2.0)
        ExponentClass(kind='algebraic', r=0.3333333333333333)
        >>> table1_exponent("subexp", 0.5, "subexp", 0.5).r
        0.2

        :raises ConfigurationError: if the kinds are not benchmark kinds
    """
    # pylint: disable = too-many-return-statements
    validate(potential_kind, PotentialKind)
    validate(kinetic_kind, KineticKind)
    if kinetic_kind != "gaussian" and kinetic_param is None:
        raise ConfigurationError(f"Error classifying decay: kinetic kind {kinetic_kind!r} needs a parameter.")
    x, a = _spatial_class(potential_kind, float(potential_param))
    v, d = _velocity_class(kinetic_kind, 2.0 if kinetic_param is None else float(kinetic_param))
    if x == "strong":
        if v == "strong":
            return ExponentClass("exponential")
        if v == "weak":
            return ExponentClass("stretched-exp", d/(2.0-d))
        return ExponentClass("algebraic", d/2.0)
    if x == "weak":
        if v == "strong":
            return ExponentClass("stretched-exp", a/(2.0-a))
        if v == "weak":
            return ExponentClass("stretched-exp", a*d/(2.0*a+2.0*d-3.0*a*d))
        return ExponentClass("algebraic-minus", d/2.0)
    if v == "strong":
        return ExponentClass("algebraic", a/2.0)
    if v == "weak":
        return ExponentClass("algebraic-minus", a/2.0)
    return ExponentClass("algebraic", a*d/(4.0+2.0*a+2.0*d))

def model_exponent(model: Model) -> ExponentClass:
    r""" :func:`table1_exponent` for the energies of a model. """
    validate(model, Model)
    kin = model.kinetic
    return table1_exponent(model.potential.kind, model.potential.param, kin.kind,  # type: ignore[arg-type]
                           None if kin.kind == "gaussian" else kin.param)

def overdamped_exponent(potential_kind: PotentialKind, potential_param: float) -> ExponentClass:
    r"""
        The decay class of the overdamped dynamics with the same potential.

        >>> overdamped_exponent("subexp", 0.5).r
        0.3333333333333333
    """
    validate(potential_kind, PotentialKind)
    x, a = _spatial_class(potential_kind, float(potential_param))
    if x == "strong":
        return ExponentClass("exponential")
    if x == "weak":
        return ExponentClass("stretched-exp", a/(2.0-a))
    return ExponentClass("algebraic", a/2.0)

def fit_exponent(t: npt.ArrayLike, F: npt.ArrayLike, kind: ExponentKind, *, decades: float = 2.0) -> float:
    r"""
        Least-squares exponent of an envelope over the last ``decades`` decades of its time range:
        the slope of :math:`-\log F` against :math:`\log t` (algebraic kinds),
        of :math:`\log(-\log F)` against :math:`\log t` (stretched exponentials),
        or of :math:`-\log F` against :math:`t` (exponential: the rate).

        >>> t = np.geomspace(1.0, 1e4, 50)
        >>> round(fit_exponent(t, t**-1.5, "algebraic"), 10)
        1.5

        :raises ConfigurationError: if fewer than 3 usable samples remain
    """
    validate(kind, ExponentKind)
    t = np.asarray(t, dtype=np.float64)
    F = np.asarray(F, dtype=np.float64)
    if t.shape != F.shape or t.ndim != 1:
        raise ConfigurationError("Error fitting exponent: times and values must be 1-D arrays of equal length.")
    t_hi = float(np.max(t))
    mask = (t >= t_hi*10.0**-decades) & (t > 0.0) & (F > 0.0) & np.isfinite(F)
    if kind == "stretched-exp":
        mask &= F < 1.0
    if int(np.count_nonzero(mask)) < 3:
        raise ConfigurationError(f"Error fitting exponent: only {int(np.count_nonzero(mask))} usable samples.")
    ts, Fs = t[mask], F[mask]
    if kind == "exponential":
        return float(stats.linregress(ts, -np.log(Fs)).slope)
    if kind == "stretched-exp":
        return float(stats.linregress(np.log(ts), np.log(-np.log(Fs))).slope)
    return float(-stats.linregress(np.log(ts), np.log(Fs)).slope)

__all__ = ("ExponentKind", "ExponentClass", "table1_exponent", "model_exponent", "overdamped_exponent",
           "fit_exponent")
