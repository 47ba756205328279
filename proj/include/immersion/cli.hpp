#pragma once

#include <string>
#include <vector>

namespace immersion {

/// Exit codes: 0 success/valid, 1 invalid certificate, 2 hypotheses not
/// met at the attempted scale, 3 usage or input error.
int run_cli(const std::vector<std::string>& args);

} // namespace immersion
