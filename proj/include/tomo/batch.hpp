#pragma once

#include "tomo/inversion.hpp"

#include <vector>

namespace tomo {

/// Worker count used when a caller passes threads <= 0: the TOMO_THREADS
/// environment variable if set, otherwise the OpenMP default.
[[nodiscard]] int default_thread_count();

/// Inverts every pixel with one shared Inverter. Results are indexed by
/// pixel and independent of the worker count. When pixels fail, the
/// exception of the lowest-index failing pixel is rethrown after the
/// parallel region.
[[nodiscard]] std::vector<PixelEstimate> invert_batch(const Inverter& inverter,
                                                      const std::vector<CVector>& pixels,
                                                      int known_order,
                                                      const std::vector<double>& noise_sigma,
                                                      int threads);

/// Serial reference with the same contract as invert_batch.
[[nodiscard]] std::vector<PixelEstimate> invert_batch_serial(const Inverter& inverter,
                                                             const std::vector<CVector>& pixels,
                                                             int known_order,
                                                             const std::vector<double>& noise_sigma);

}  // namespace tomo
