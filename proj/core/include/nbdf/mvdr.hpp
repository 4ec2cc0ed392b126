#pragma once

#include <vector>

#include "nbdf/spectrogram.hpp"
#include "nbdf/types.hpp"

namespace nbdf {

struct MvdrOptions {
  double loading = 1e-6;      // diagonal loading relative to trace / M
  double max_loading = 1e-2;  // escalation limit (x10 per attempt)
};

struct MvdrResult {
  Spectrogram output;            // 1 channel
  ComplexMatrix weights;         // [M x K]
  ComplexMatrix steering;        // [M x K], unit reference component
  std::vector<double> loading;   // relative loading used at each bin
};

/// Static oracle MVDR from the true speech and noise components. The
/// steering vector is the principal eigenvector of the speech covariance
/// scaled to a unit reference component; weights are
/// Phi_n^-1 d / (d^H Phi_n^-1 d). Throws std::runtime_error if the loaded
/// noise covariance stays singular up to `max_loading`.
MvdrResult oracle_mvdr(const Spectrogram& mixture, const Spectrogram& speech, const Spectrogram& noise, int ref_index,
                       const MvdrOptions& options = {});

}  // namespace nbdf
