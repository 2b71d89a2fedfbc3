#pragma once

#include <string>
#include <vector>

namespace maglev {

// One checked condition of a gain or parameter validator. The margin is
// positive when the condition holds and shows how much slack is left.
struct Check {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::string validator;
  std::vector<Check> checks;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  void add(std::string name, bool pass, double margin, std::string detail = {}) {
    checks.push_back({std::move(name), pass, margin, std::move(detail)});
  }
};

}  // namespace maglev
