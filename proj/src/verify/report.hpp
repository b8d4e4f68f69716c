#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include <ranconv/json_io.hpp>

namespace ranconv::verify {

enum class TrialStatus { Pass, Fail, Error };

inline const char* statusName(TrialStatus s) {
  switch (s) {
    case TrialStatus::Pass: return "pass";
    case TrialStatus::Fail: return "fail";
    default: return "error";
  }
}

/// One property-check trial. Failing trials always carry a witness object
/// with enough data to replay the violation by hand.
struct TrialRecord {
  int trial = 0;
  TrialStatus status = TrialStatus::Pass;
  double deviation = 0.0;
  std::string message;
  Json witness;  // null unless the trial produced replay data worth keeping

  static TrialRecord pass(int trial, double deviation) {
    TrialRecord r;
    r.trial = trial;
    r.deviation = deviation;
    return r;
  }

  static TrialRecord fail(int trial, double deviation, std::string message, Json witness) {
    TrialRecord r;
    r.trial = trial;
    r.status = TrialStatus::Fail;
    r.deviation = deviation;
    r.message = std::move(message);
    r.witness = std::move(witness);
    return r;
  }

  static TrialRecord error(int trial, std::string message, Json witness = Json::object()) {
    TrialRecord r;
    r.trial = trial;
    r.status = TrialStatus::Error;
    r.message = std::move(message);
    r.witness = std::move(witness);
    return r;
  }
};

struct Report {
  std::string suite;
  std::vector<TrialRecord> records;

  int failures() const {
    return static_cast<int>(std::count_if(records.begin(), records.end(), [](const TrialRecord& r) {
      return r.status != TrialStatus::Pass;
    }));
  }

  double maxDeviation() const {
    double worst = 0.0;
    for (const auto& r : records) worst = std::max(worst, r.deviation);
    return worst;
  }

  bool allPassed() const { return failures() == 0; }
};

/// One JSON object per line: every trial, then a summary line.
inline void writeJsonl(const Report& rep, std::ostream& os) {
  for (const auto& r : rep.records) {
    Json line{{"suite", rep.suite}, {"trial", r.trial}, {"status", statusName(r.status)},
              {"deviation", jsonNumber(r.deviation)}};
    if (!r.message.empty()) line["message"] = r.message;
    if (!r.witness.is_null()) line["witness"] = r.witness;
    os << line.dump() << '\n';
  }
  const Json summary{{"suite", rep.suite},
                     {"trials", static_cast<int>(rep.records.size())},
                     {"failures", rep.failures()},
                     {"max_deviation", jsonNumber(rep.maxDeviation())}};
  os << summary.dump() << '\n';
}

}  // namespace ranconv::verify
