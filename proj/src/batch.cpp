#include "tomo/batch.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>

namespace tomo {

int default_thread_count() {
  if (const char* env = std::getenv("TOMO_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    throw TomoError(std::string("TOMO_THREADS must be a positive integer, got '") + env + "'");
  }
  return omp_get_max_threads();
}

namespace {

void check_sigma_count(const std::vector<double>& noise_sigma, std::size_t pixels) {
  if (noise_sigma.size() > 1 && noise_sigma.size() != pixels) {
    throw TomoError("noise sigma list has " + std::to_string(noise_sigma.size()) +
                    " entries for " + std::to_string(pixels) + " pixels");
  }
}

double sigma_at(const std::vector<double>& noise_sigma, std::size_t p) {
  if (noise_sigma.empty()) return 0.0;
  if (noise_sigma.size() == 1) return noise_sigma.front();
  return noise_sigma.at(p);
}

}  // namespace

std::vector<PixelEstimate> invert_batch(const Inverter& inverter, const std::vector<CVector>& pixels,
                                        int known_order, const std::vector<double>& noise_sigma,
                                        int threads) {
  check_sigma_count(noise_sigma, pixels.size());
  const int workers = threads > 0 ? threads : default_thread_count();
  std::vector<PixelEstimate> out(pixels.size());
  std::exception_ptr error;
  long long error_pixel = -1;
  const auto count = static_cast<long long>(pixels.size());
#pragma omp parallel for num_threads(workers) schedule(dynamic, 4)
  for (long long p = 0; p < count; ++p) {
    try {
      const auto i = static_cast<std::size_t>(p);
      out[i] = inverter.invert(pixels[i], known_order, sigma_at(noise_sigma, i));
    } catch (...) {
#pragma omp critical(tomo_batch_error)
      if (error_pixel < 0 || p < error_pixel) {
        error = std::current_exception();
        error_pixel = p;
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<PixelEstimate> invert_batch_serial(const Inverter& inverter,
                                               const std::vector<CVector>& pixels, int known_order,
                                               const std::vector<double>& noise_sigma) {
  check_sigma_count(noise_sigma, pixels.size());
  std::vector<PixelEstimate> out;
  out.reserve(pixels.size());
  for (std::size_t p = 0; p < pixels.size(); ++p) {
    out.push_back(inverter.invert(pixels[p], known_order, sigma_at(noise_sigma, p)));
  }
  return out;
}

}  // namespace tomo
