#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "varcharts/calibrate.hpp"

namespace varcharts {

/// Directory of append-only CSV result files plus the limit cache
/// (limits.csv).  Limits are persisted with 17 significant digits, so a cache
/// hit returns the bitwise-identical double.
class ResultsStore : public LimitCache {
 public:
  explicit ResultsStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<CalibrationResult> lookup(
      const ChartConfig& config, const ProcessSpec& process,
      const CalibrationTarget& target) const override;
  void store(const ChartConfig& config, const ProcessSpec& process,
             const CalibrationTarget& target,
             const CalibrationResult& result) override;

  /// Appends one CSV row, writing the header first when the file is new.
  void append_row(const std::string& filename, const std::string& header,
                  const std::string& row);

  static std::string limit_key(const ChartConfig& config,
                               const ProcessSpec& process,
                               const CalibrationTarget& target);

 private:
  struct CachedLimit {
    double limit;
    double achieved_arl;
    double achieved_std_err;
    std::int64_t achieved_reps;
    std::int64_t achieved_censored;
    int iterations;
  };

  void load_limits();

  std::filesystem::path dir_;
  std::map<std::string, CachedLimit> limits_;
};

}  // namespace varcharts
