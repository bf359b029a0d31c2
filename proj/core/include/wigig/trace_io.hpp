#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "wigig/link_model.hpp"

namespace wigig {

inline constexpr std::string_view kTraceHeader = "t_ms,q,throughput_mbps";

std::string trace_to_csv(const Trace& trace);

/// Parses `t_ms,q[,throughput_mbps]` rows. The header line is optional.
/// Timestamps must advance by exactly 1 ms and q must be an integer in 0..10.
/// Throws InputError naming `source` and the offending line.
Trace read_trace_csv(std::istream& in, std::string_view source = "<stream>");

/// Throws ConfigError when the file cannot be opened.
Trace load_trace_csv(const std::filesystem::path& path);

}  // namespace wigig
