#pragma once

#include <cstdint>
#include <string>

namespace cubeval::cli {

/// Everything a run depends on. Serializes to a plain key=value file; unset
/// optional numbers keep their defaults.
struct ExperimentConfig {
  std::string command;
  std::string form = "1,0,0,2";
  uint64_t x = 100;
  double y = 0;  // 0: pick per command
  uint64_t q = 1;
  int64_t a1 = 0;
  int64_t a2 = 0;
  double z = 1.0;
  std::string mode = "omega";
  uint64_t pmax = 10'000;
  uint64_t dmax = 30;
  double umax = 5.0;
  double step = 1.0 / 64;
  unsigned threads = 0;
  bool coprime = false;
  uint64_t bound = 0;
  unsigned kmax = 3;
  uint64_t p = 0;
  unsigned k = 1;
  int64_t g1 = 0;
  int64_t g2 = 0;
  bool restricted = false;
  uint64_t gmax = 0;
  std::string level = "quick";
  std::string csv;
  uint64_t seed = 1;

  // key=value lines, one per field, fixed order. Doubles use 17 significant
  // digits so parse(serialize(c)) == c.
  std::string serialize() const;
  // Unknown keys, malformed numbers or duplicate keys raise InvalidInput.
  static ExperimentConfig parse(const std::string& text);
  // Applies the keys present in `text` on top of this config.
  void merge(const std::string& text);

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

}  // namespace cubeval::cli
