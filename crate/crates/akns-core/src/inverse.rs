//! Inverse scattering transform (in progress).
