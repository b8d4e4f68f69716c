#pragma once

#include <string>
#include <vector>

#include "verify/report.hpp"
#include "verify/scenario.hpp"

namespace ranconv::verify {

/// Names of all property suites, in documentation order.
const std::vector<std::string>& suiteNames();

/// Run the scenario's suite: one seeded trial per record, deterministic for a
/// fixed scenario. Unknown suites and invalid scenarios raise ConfigError.
Report runSuite(const Scenario& sc);

}  // namespace ranconv::verify
