#include "wigig/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "wigig/csv.hpp"

namespace wigig {

std::string trace_to_csv(const Trace& trace) {
  std::string out;
  out.reserve(trace.size() * 14 + 32);
  out += kTraceHeader;
  out += '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(trace.time_at(i));
    out += ',';
    out += std::to_string(trace.q[i]);
    out += ',';
    if (trace.has_throughput()) {
      out += std::to_string(trace.throughput_mbps[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

Trace read_trace_csv(std::istream& in, std::string_view source) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  bool with_throughput = false;

  auto fail = [&](const std::string& msg) {
    std::ostringstream os;
    os << source << ':' << line_no << ": " << msg;
    throw InputError(os.str());
  };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (line_no == 1 && text.substr(0, 4) == "t_ms") continue;

    const auto fields = split_fields(text);
    if (fields.size() < 2 || fields.size() > 3) {
      fail("expected 2 or 3 fields, got " + std::to_string(fields.size()));
    }
    TimeMs t = 0;
    int q = 0;
    if (!parse_int(fields[0], t)) fail("bad timestamp '" + std::string(fields[0]) + "'");
    if (!parse_int(fields[1], q)) fail("bad q '" + std::string(fields[1]) + "'");
    if (q < 0 || q > 10) fail("q out of range 0..10: " + std::to_string(q));

    const bool has_tp = fields.size() == 3 && !trim(fields[2]).empty();
    int tp = 0;
    if (has_tp && !parse_int(fields[2], tp)) {
      fail("bad throughput '" + std::string(fields[2]) + "'");
    }
    if (first_row) {
      trace.start_ms = t;
      with_throughput = has_tp;
      first_row = false;
    } else {
      if (t != trace.time_at(trace.size())) {
        fail("expected t_ms " + std::to_string(trace.time_at(trace.size())) + ", got " +
             std::to_string(t));
      }
      if (has_tp != with_throughput) fail("throughput column present on some rows only");
    }
    trace.q.push_back(q);
    if (has_tp) trace.throughput_mbps.push_back(tp);
  }
  return trace;
}

Trace load_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open trace file " + path.string());
  }
  return read_trace_csv(in, path.string());
}

}  // namespace wigig
