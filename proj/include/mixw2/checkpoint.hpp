#pragma once

#include <string>

#include "mixw2/dynamics.hpp"
#include "mixw2/snn.hpp"

namespace mixw2 {
namespace checkpoint {

/// JSON checkpoint: architecture header plus per-layer flat arrays in
/// full double precision.
void save_snn(const std::string& path, const snn::SNNParams& params);
snn::SNNParams load_snn(const std::string& path);

/// Joint checkpoint of the dynamics reconstruction (deterministic rhs
/// network + stochastic transition network + the loss weight used).
void save_reconstruction(const std::string& path, const dynamics::MLPParams& nn1,
                         const snn::SNNParams& snn2, double lambda);
struct ReconstructionCheckpoint {
  dynamics::MLPParams nn1;
  snn::SNNParams snn2;
  double lambda = 1.0;
};
ReconstructionCheckpoint load_reconstruction(const std::string& path);

}  // namespace checkpoint
}  // namespace mixw2
