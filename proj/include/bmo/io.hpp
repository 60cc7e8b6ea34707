#pragma once

#include <string>
#include <vector>

#include "bmo/maps.hpp"
#include "bmo/oscillation.hpp"
#include "bmo/space.hpp"
#include "bmo/uchiyama.hpp"

namespace bmo {

/// Decimal with 17 significant digits; round-trips doubles exactly.
std::string fmt17(double v);

/// Space file layout, version line first:
///   bmo-space 1
///   label: <text>
///   n: <count>
///   weights: w0 .. w_{n-1}
///   dist:
///   <row i of the lower triangle, entries d(i,0) .. d(i,i-1)>
/// or the generator form, re-built on load:
///   bmo-space 1
///   generator: <name> <params...>
void save_space(const Space& X, const std::string& path);
Space load_space(const std::string& path);

/// Generators: grid_1d n [power] [normalize], grid_2d nx ny [power]
/// [normalize], path n [normalize], tree depth [normalize].
Space space_from_generator(const std::string& name,
                           const std::vector<std::string>& params);

/// Field file: one "id value" pair per line, every id exactly once.
void save_field(const Field& f, const std::string& path);
Field load_field(const Space& X, const std::string& path);

/// Set file: one id per line.
void save_set(const std::vector<int>& ids, const std::string& path);
PointSet load_set(const Space& X, const std::string& path);

/// Map file: one "source image" pair per line, every source exactly once.
void save_map(const PointMap& F, const std::string& path);
PointMap load_map(const Space& X, const std::string& path);

/// Ordered key-value report with embedded tab-separated tables.
class Report {
 public:
  explicit Report(const std::string& title);
  void kv(const std::string& key, const std::string& value);
  void table(const std::string& name, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return buf_; }
  void save(const std::string& path) const;

 private:
  std::string buf_;
};

}  // namespace bmo
