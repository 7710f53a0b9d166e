#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"

namespace mcfar::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 configuration error.
int cmd_validate(const RunConfig& cfg, std::ostream& out);
int cmd_bench_mean(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
int cmd_detect(const RunConfig& cfg, SweepKind sweep, const std::string& out_dir,
               std::ostream& log);
int cmd_influence(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);

}  // namespace mcfar::cli
