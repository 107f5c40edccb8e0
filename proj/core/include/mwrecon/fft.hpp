#pragma once

#include "mwrecon/kspace.hpp"

namespace mwrecon {

// Centered, orthonormal 2-D transforms. DC sits at (ny/2, nx/2) with
// integer division, and both directions scale by 1/sqrt(ny*nx).

MultiCoilKSpace fft2c(const CoilImage& image);
CoilImage ifft2c(const MultiCoilKSpace& kspace);

}  // namespace mwrecon
