#pragma once

#include <cstdint>

#include "mwrecon/grappa.hpp"
#include "mwrecon/kspace.hpp"
#include "mwrecon/sampling.hpp"

namespace oracle {

// k-space whose missing rows are, by construction, a fixed shift-invariant
// linear combination of the acquired neighbors.
//
// The acquired rows hold a sum of as many unit-modulus plane waves as the
// kernel has source taps, each with its own random coil profile. On such a
// signal every target is an exact linear function of its source patch at
// every position; solving the modal system gives that kernel. Missing rows
// are then produced by applying it with zero padding outside the grid, so
// calibration on the ACS and interpolation must both reproduce them.
struct PlantedData {
  mwrecon::MultiCoilKSpace full;       // every row
  mwrecon::MultiCoilKSpace measured;   // missing rows zeroed
  mwrecon::SamplingPattern pattern;
  mwrecon::GrappaKernel kernel;
};

PlantedData make_planted(std::size_t n_coils, std::size_t ny, std::size_t nx, const mwrecon::KernelGeometry& geom,
                         std::size_t acs, std::uint64_t seed);

}  // namespace oracle
