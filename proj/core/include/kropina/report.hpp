#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Machine-readable run results.  Rendering is hand-rolled so that key order,
// number formatting (%.17g), and record ordering are fixed: two runs of the
// same scenario and seed must produce byte-identical output up to the wall
// time, which is therefore the last line of the document.
namespace kropina {

struct CheckRecord {
  std::string check_id;
  int point_index = 0;
  std::string residual_name;
  double value = 0;
  double threshold = 0;
  bool pass = false;
};

struct Report {
  std::string scenario_name;
  std::uint64_t scenario_hash = 0;
  std::uint64_t seed = 0;
  std::string tool_version;
  int points_total = 0;
  int points_rejected = 0;
  std::vector<CheckRecord> records;  // sorted by (point, check, residual)
  double wall_time_s = 0;

  int total() const { return static_cast<int>(records.size()); }
  int failed() const;
  std::map<std::string, double> max_residuals() const;  // per check id
  bool all_pass() const { return failed() == 0; }
};

std::string format_g17(double v);

// JSON text of the whole report; deterministic except for the trailing
// wall_time_s member.
std::string render_report(const Report& r);

void write_report(const Report& r, const std::string& path);

}  // namespace kropina
