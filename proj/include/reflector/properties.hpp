#pragma once

// Invariant checks of every module, run against one focal field.

#include <cstdint>
#include <string>
#include <vector>

#include "reflector/reflector.hpp"

namespace refl {

struct PropertyResult {
  std::string name;
  bool passed;
  double value;
  double threshold;
};

struct SuiteOptions {
  int level = 3;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int subadditivity_pairs = 1000;
  int refined_triples = 100;
  int reflect_pairs = 100000;
  int decomposition_points = 10;
};

/// Runs the grid, paraboloid, reflector, validity, directrix and optics invariants on p.
/// The result depends only on p and the options.
std::vector<PropertyResult> run_property_suite(const FocalField& p, const SuiteOptions& opt);

}  // namespace refl
