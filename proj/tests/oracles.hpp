#pragma once

// Reference values used across the test binaries. Everything here is either
// a closed form or a quadrature reference computed with an independent
// method at much higher accuracy than any tolerance that consumes it.

namespace oracles {

// For w0 = 2y - sin(2*pi*x - y):
//   int int w0 wx/wy dx dy = 2*pi*(2/sqrt(3) - 1).
// The inner x-integral reduces to a complete integral of cos^2/(2 + cos),
// which is elementary.
inline constexpr double kE1Exact = 0.9720121497572859;
inline constexpr double kPoleE1 = 1.028793724697477;  // 1 / kE1Exact

// Same profile, weighted by u^2. No closed form; Gauss-Legendre reference
// (160x160 panels, degree 20), stable to ~1e-13 under panel refinement.
inline constexpr double kE2Continuum = 0.24810968989287;

// v0 = sin(2*pi*x)(2a - 1) + 0.05 sin(4*pi*x), ha0 = 1 - 0.3 cos(2*pi*x)(2a - 1):
// the continuum first functional is pi/10; on 64 x-nodes and 65 label nodes
// the trapezoid rule inflates the quadratic label profile by exactly 2/4096.
inline constexpr double kSlWaveE1Exact = 0.3141592653589793;
inline constexpr double kSlWaveE1Na65 = 0.31431266343776787;

// sqrt(e): the p -> 0 limit of the p-norms of exp(x) on (0,1).
inline constexpr double kRootE = 1.6487212707001282;

}  // namespace oracles
