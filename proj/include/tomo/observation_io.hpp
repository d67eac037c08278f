#pragma once

#include "tomo/core_model.hpp"
#include "tomo/inversion.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace tomo {

inline constexpr const char* kObservationFormatTag = "tomo-observations";

/// A stack of simulated or measured pixels sharing one geometry.
///
/// Text format: header lines starting with '#' as "# key value...", keys
/// format, seed, geometry_hash, wavelength, slant_range, baselines,
/// snr_db; then one line per pixel "index re_1 im_1 ... re_N im_N".
struct ObservationSet {
  AcquisitionGeometry geometry;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  std::vector<CVector> pixels;
};

void write_observations(const ObservationSet& set, std::ostream& out);
[[nodiscard]] ObservationSet read_observations(std::istream& in);
[[nodiscard]] ObservationSet load_observations(const std::filesystem::path& path);

/// Header plus one row per pixel: pixel, order, s1, s2, eig1, eig2,
/// root_mod1, root_mod2, converged. Missing values are written as nan.
void write_estimates(const std::vector<PixelEstimate>& estimates, std::ostream& out);

}  // namespace tomo
