#include "varcharts/results_store.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "varcharts/version.hpp"

namespace varcharts {

namespace {

constexpr const char* kLimitsFile = "limits.csv";
constexpr const char* kLimitsHeader =
    "scheme,delta_star,process,target_arl,reps,seed,cap,limit,achieved_arl,"
    "achieved_std_err,achieved_reps,achieved_censored,iterations,version";

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

ResultsStore::ResultsStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  load_limits();
}

std::string ResultsStore::limit_key(const ChartConfig& config,
                                    const ProcessSpec& process,
                                    const CalibrationTarget& target) {
  std::ostringstream os;
  os << to_string(config.scheme) << ','
     << (config.delta_star ? g17(*config.delta_star) : "-") << ','
     << process.fingerprint() << ',' << g17(target.target_arl) << ','
     << target.reps << ',' << target.seed << ',' << target.effective_cap();
  return os.str();
}

void ResultsStore::load_limits() {
  std::ifstream in(dir_ / kLimitsFile);
  if (!in) return;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto fields = split_csv(line);
    if (fields.size() < 13) continue;
    std::string key;
    for (int i = 0; i < 7; ++i) key += (i ? "," : "") + fields[i];
    CachedLimit entry;
    entry.limit = std::strtod(fields[7].c_str(), nullptr);
    entry.achieved_arl = std::strtod(fields[8].c_str(), nullptr);
    entry.achieved_std_err = std::strtod(fields[9].c_str(), nullptr);
    entry.achieved_reps = std::strtoll(fields[10].c_str(), nullptr, 10);
    entry.achieved_censored = std::strtoll(fields[11].c_str(), nullptr, 10);
    entry.iterations = static_cast<int>(std::strtol(fields[12].c_str(), nullptr, 10));
    limits_[key] = entry;
  }
}

std::optional<CalibrationResult> ResultsStore::lookup(
    const ChartConfig& config, const ProcessSpec& process,
    const CalibrationTarget& target) const {
  const auto it = limits_.find(limit_key(config, process, target));
  if (it == limits_.end()) return std::nullopt;
  CalibrationResult result;
  result.limit = it->second.limit;
  result.achieved.mean = it->second.achieved_arl;
  result.achieved.std_err = it->second.achieved_std_err;
  result.achieved.reps = it->second.achieved_reps;
  result.achieved.censored = it->second.achieved_censored;
  result.iterations = it->second.iterations;
  return result;
}

void ResultsStore::store(const ChartConfig& config, const ProcessSpec& process,
                         const CalibrationTarget& target,
                         const CalibrationResult& result) {
  const std::string key = limit_key(config, process, target);
  if (limits_.count(key) != 0) return;
  limits_[key] = {result.limit,          result.achieved.mean,
                  result.achieved.std_err, result.achieved.reps,
                  result.achieved.censored, result.iterations};
  std::ostringstream row;
  row << key << ',' << g17(result.limit) << ',' << g17(result.achieved.mean)
      << ',' << g17(result.achieved.std_err) << ',' << result.achieved.reps
      << ',' << result.achieved.censored << ',' << result.iterations << ','
      << kVersion;
  append_row(kLimitsFile, kLimitsHeader, row.str());
}

void ResultsStore::append_row(const std::string& filename,
                              const std::string& header,
                              const std::string& row) {
  const auto path = dir_ / filename;
  const bool fresh =
      !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw ValidationError("cannot open results file " + path.string());
  }
  if (fresh) out << header << '\n';
  out << row << '\n';
}

}  // namespace varcharts
