#pragma once

// Self-checks of the constructive lemmas, shared by the CLI and the test
// suites.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "latcover/intmat.hpp"

namespace latcover {

struct LemmaCheck {
  std::string name;
  bool passed = false;
  std::vector<std::pair<std::string, double>> metrics;
  std::string note;
};

struct LemmaCheckOptions {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  int translation_trials = 200;
  std::uint64_t translation_samples = 10'000;
  std::uint64_t chi_square_samples = 100'000;
  std::uint64_t containment_samples = 100'000;
};

/// Lattice points of B_R against a box scan, and the parallelepiped count
/// against C_pt(d), for hex at 4/sqrt 3, Z^2 at 2 sqrt 2 and Z^1 at 2.
LemmaCheck check_point_counts(const LemmaCheckOptions& opts = {});
LemmaCheck check_translation_mean(const LemmaCheckOptions& opts = {});
LemmaCheck check_torus_maps(const LemmaCheckOptions& opts = {});
LemmaCheck check_product_containment(const LemmaCheckOptions& opts = {});

std::vector<LemmaCheck> run_lemma_checks(const LemmaCheckOptions& opts = {});

/// Product of random elementary row operations and sign flips; always
/// unimodular.
IntMatrix random_unimodular(int d, std::uint64_t seed, int steps = 12);

/// True iff x -> M x mod denominator permutes (Z/denominator)^d.
bool torus_grid_bijective(const IntMatrix& M, std::int64_t denominator);

}  // namespace latcover
