#include "kropina/report.hpp"

#include <cstdio>
#include <fstream>

#include "kropina/errors.hpp"

namespace kropina {

int Report::failed() const {
  int f = 0;
  for (const CheckRecord& r : records)
    if (!r.pass) ++f;
  return f;
}

std::map<std::string, double> Report::max_residuals() const {
  // Gated records only; diagnostics (threshold 0) would drown the maxima
  // in counters and norms that are not residuals.
  std::map<std::string, double> m;
  for (const CheckRecord& r : records) {
    if (r.threshold <= 0) continue;
    auto [it, fresh] = m.try_emplace(r.check_id, r.value);
    if (!fresh && r.value > it->second) it->second = r.value;
  }
  for (const CheckRecord& r : records)
    m.try_emplace(r.check_id, r.value);
  return m;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// Strings we emit are identifiers and fixed messages; escape defensively.
std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string render_report(const Report& r) {
  std::string out;
  out.reserve(256 + 128 * r.records.size());
  out += "{\n";
  out += "  \"scenario\": " + quoted(r.scenario_name) + ",\n";
  out += "  \"scenario_hash\": " + quoted(hex64(r.scenario_hash)) + ",\n";
  out += "  \"seed\": " + std::to_string(r.seed) + ",\n";
  out += "  \"tool_version\": " + quoted(r.tool_version) + ",\n";
  out += "  \"points_total\": " + std::to_string(r.points_total) + ",\n";
  out += "  \"points_rejected\": " + std::to_string(r.points_rejected) + ",\n";
  out += "  \"records\": [\n";
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const CheckRecord& c = r.records[i];
    out += "    {\"check\": " + quoted(c.check_id) +
           ", \"point\": " + std::to_string(c.point_index) +
           ", \"residual\": " + quoted(c.residual_name) +
           ", \"value\": " + format_g17(c.value) +
           ", \"threshold\": " + format_g17(c.threshold) +
           ", \"pass\": " + (c.pass ? "true" : "false") + "}";
    out += i + 1 < r.records.size() ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"summary\": {\n";
  out += "    \"total\": " + std::to_string(r.total()) + ",\n";
  out += "    \"failed\": " + std::to_string(r.failed()) + ",\n";
  out += "    \"max_residuals\": {";
  const auto maxima = r.max_residuals();
  bool first = true;
  for (const auto& [id, v] : maxima) {
    if (!first) out += ", ";
    first = false;
    out += quoted(id) + ": " + format_g17(v);
  }
  out += "},\n";
  out += "    \"wall_time_s\": " + format_g17(r.wall_time_s) + "\n";
  out += "  }\n";
  out += "}\n";
  return out;
}

void write_report(const Report& r, const std::string& path) {
  std::ofstream outf(path, std::ios::binary);
  if (!outf) throw Error("cannot write report file: " + path);
  outf << render_report(r);
}

}  // namespace kropina
