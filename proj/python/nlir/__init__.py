"""Nonlinear-interferometer infrared gas spectroscopy.

Thin wrapper over the C++ core. Maps and spectra expose numpy arrays; errors raise
subclasses of ``nlir.Error``.
"""

from ._core import (
    ConfigError,
    DomainError,
    Error,
    IncompatibleDataError,
    InterferogramMap,
    IoError,
    LineList,
    ParseError,
    RetrievedSpectrum,
    RunConfig,
    SpectralLine,
    absorption_spectrum,
    alpha_from_visibility,
    doppler_halfwidth,
    faddeeva,
    format_hitran_record,
    idler_wavelength,
    kk_index,
    load_config,
    load_line_list,
    parse_hitran_record,
    read_map,
    retrieve,
    signal_wavelength,
    simulate,
    summarize,
    visibility,
    voigt_profile,
    write_map,
)

__all__ = [name for name in dir() if not name.startswith("_")]
