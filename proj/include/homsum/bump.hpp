#pragma once

namespace homsum {

/// Smooth cutoff: 1 on [0, r], exp(1 - 1/(1 - (s/r - 1)^2)) on (r, 2r), 0 beyond.
/// Evaluated at s = |z - z_k|^2 it is a bump of radius sqrt(2r) around z_k.
double psi_r(double r, double s);

/// m(r) = integral of psi_r(z^2) over the real line.
double mass_m(double r);

/// v(r) = m(r)^{-1} * integral of z^2 psi_r(z^2).
double variance_v(double r);

}  // namespace homsum
