#pragma once

#include "tomo/inversion.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tomo {

/// RMSE between equally sized estimate and truth lists after the best
/// assignment (K <= 2; K = 1 is the absolute error).
[[nodiscard]] double paired_rmse(const std::vector<double>& estimates,
                                 const std::vector<double>& truths);

/// paired_rmse for unequal counts: extra estimates are dropped in the best
/// way, missing ones are filled by repeating the last estimate. Requires
/// at least one estimate.
[[nodiscard]] double matched_rmse(std::vector<double> estimates, const std::vector<double>& truths);

/// True iff two estimates were returned and, after the best pairing, each
/// lies strictly within d_s/2 of its truth.
[[nodiscard]] bool effective_detection(const std::vector<double>& estimates,
                                       const std::vector<double>& truths, double d_s);

enum class Scenario {
  kSingleSweep,
  kDoubleFixedSep,
  kSeparationSweep,
  kOffgridSweep,
  kJitterSweep,
  kBaselineCountSweep,
};

[[nodiscard]] std::string scenario_name(Scenario s);

/// One Monte-Carlo experiment. The JSON schema is documented in README.
struct ExperimentSpec {
  std::string name = "experiment";
  Scenario scenario = Scenario::kSingleSweep;
  AcquisitionGeometry geometry = AcquisitionGeometry::uniform(-150.0, 150.0, 20, 0.031, 7.0e5);
  std::vector<double> snr_db{10.0};
  int trials = 500;
  std::uint64_t rng_seed = 1;
  std::vector<Method> methods{Method::kGridless};
  int k = 1;                       ///< jitter and baseline-count scenarios
  double center = 0.0;             ///< elevation of the scene center (m)
  double alpha = 2.0;              ///< K = 2 separation in Rayleigh units
  std::vector<double> alpha_d;     ///< separation sweep
  std::vector<double> sigma_b;     ///< jitter sweep (m)
  std::vector<int> n_baselines;    ///< baseline-count sweep
  Interval offgrid_range{-20.0, 20.0};
  std::vector<double> amplitudes{1.0, 1.0};
  bool random_phase = true;
  bool estimate_order = false;
  InversionConfig inversion;

  void validate() const;
};

/// Parses a single experiment object or {"experiments": [...]}. Relative
/// weight paths resolve against `base_dir`.
[[nodiscard]] std::vector<ExperimentSpec> parse_experiments(const std::string& text,
                                                            const std::filesystem::path& base_dir);
[[nodiscard]] std::vector<ExperimentSpec> load_experiments(const std::filesystem::path& path);

struct RunOptions {
  int threads = 0;                      ///< <= 0: default_thread_count()
  bool timing = false;                  ///< measure per-pixel wall time
  std::optional<int> trials;            ///< overrides spec.trials
  std::optional<std::uint64_t> seed;    ///< overrides spec.rng_seed
  std::optional<std::vector<Method>> methods;
  std::optional<std::filesystem::path> weights;
  bool keep_trials = false;             ///< retain per-trial records
};

struct TrialRecord {
  std::vector<double> truth;
  std::vector<double> estimates;
  int order = 0;
  double rmse = 0.0;  ///< NaN on failure
  bool detected = false;
  bool failed = false;
};

struct ResultRow {
  std::string experiment;
  Scenario scenario = Scenario::kSingleSweep;
  std::string param_name;  ///< "-", "alpha_d", "sigma_b" or "n"
  double param = 0.0;
  Method method = Method::kGridless;
  int k = 1;
  double snr_db = 0.0;
  int trials = 0;
  int failures = 0;
  double rmse_mean = 0.0;
  double rmse_std = 0.0;
  double rmse_rms = 0.0;
  double pd = 0.0;  ///< NaN for K = 1
  double est_mean[2]{};
  double est_std[2]{};
  double crlb[2]{};
  double time_ms = 0.0;  ///< NaN unless timing was requested
  std::vector<TrialRecord> records;
};

struct SkippedRun {
  std::string experiment;
  Method method;
  std::string param_name;
  double param;
  std::string reason;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SkippedRun> skipped;
};

[[nodiscard]] ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options);

/// Tab-separated table with a header line.
void write_result_table(const ExperimentResult& result, std::ostream& out);
/// JSON summary of the rows and skipped runs.
void write_result_summary(const ExperimentResult& result, const std::vector<ExperimentSpec>& specs,
                          std::ostream& out);
/// One line per trial and method (requires keep_trials).
void write_trial_table(const ExperimentResult& result, std::ostream& out);

/// Baseline subset (N below the nominal count, endpoints kept) or
/// random insertion within the nominal span (N above), sorted ascending.
[[nodiscard]] AcquisitionGeometry resize_geometry(const AcquisitionGeometry& nominal, int count,
                                                  Rng& rng);

}  // namespace tomo
