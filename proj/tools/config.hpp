#pragma once

#include "ftc/coherence.hpp"
#include "ftc/curves.hpp"
#include "ftc/fields.hpp"
#include "ftc/flows.hpp"
#include "ftc/grid_io.hpp"
#include "ftc/segmentation.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ftc::app {

/// Flat sectioned key/value configuration:
///
///     # comment
///     [section]
///     key = value
///
/// Keys are addressed as `section.key`. Only keys in the schema are accepted; list keys
/// may repeat and accumulate. Later assignments of scalar keys replace earlier ones.
class RunConfig {
 public:
  void load(const std::filesystem::path& path);
  void parse(std::istream& in, const std::string& origin = "<config>");

  /// Replaces a scalar key or the whole list of a list key.
  void set(const std::string& key, const std::string& value);
  void set_list(const std::string& key, const std::vector<std::string>& values);
  /// `section.key=value` form used by --set.
  void set_assignment(const std::string& assignment);

  bool has(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<std::string> list(const std::string& key) const;
  /// All `params.*` entries as name -> value.
  std::map<std::string, double> params() const;

  static bool known_key(const std::string& key);
  static bool list_key(const std::string& key);

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

FlowSystem flow_from_config(const RunConfig& cfg);
Epoch epoch_from_config(const RunConfig& cfg);
/// `grid.nx`/`grid.ny` over the flow's bounds.
GridSpec grid_from_config(const RunConfig& cfg, const FlowSystem& flow);
FieldSettings field_settings_from_config(const RunConfig& cfg);
GrowingSettings growing_from_config(const RunConfig& cfg);
AlphaSettings alpha_from_config(const RunConfig& cfg);

/// Worker count: `run.threads`, else $FTC_THREADS, else hardware concurrency.
int thread_count(const RunConfig& cfg);

/// `x0,y0:x1,y1`.
std::pair<Point2, Point2> parse_slice_line(const std::string& text);
/// `NXxNY`.
std::pair<int, int> parse_grid_size(const std::string& text);
/// `x,y`.
Point2 parse_point(const std::string& text);

}  // namespace ftc::app
