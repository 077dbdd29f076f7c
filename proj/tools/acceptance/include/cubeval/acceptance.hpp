#pragma once

#include <functional>
#include <string>
#include <vector>

namespace cubeval::acceptance {

enum class Level { kQuick, kFull };

// "quick" or "full"; throws InvalidInput otherwise.
Level parse_level(const std::string& text);

struct Outcome {
  int id = 0;
  std::string title;
  bool passed = false;
  bool skipped = false;
  std::string detail;
  double seconds = 0;
};

// Quick runs the exact and oracle checks (1-6) and skips the large-grid
// trends. Each outcome is handed to `report` as soon as it is known.
std::vector<Outcome> run(Level level, unsigned threads,
                         const std::function<void(const Outcome&)>& report = {});

// "[PASS] 3 exponential sums: ..." style single line.
std::string format_line(const Outcome& outcome);

}  // namespace cubeval::acceptance
