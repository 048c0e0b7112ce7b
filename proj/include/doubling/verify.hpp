#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "doubling/potential.hpp"

namespace doubling {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::size_t cases = 0;
  std::string detail;
};

struct IdentitySuiteOptions {
  std::size_t conjugacy_prefixes = 1000;
  std::size_t max_prefix_length = 256;
  std::size_t restriction_seeds = 100;
  std::size_t restriction_box = 10000;
  std::size_t cocycle_tuples = 100;
  std::size_t determinant_samples = 20;
  std::size_t determinant_steps = 10000;
  std::size_t roundtrip_fractions = 40;
  std::size_t shift_cases = 200;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

std::vector<CheckResult> conjugacy_check(unsigned base, const IdentitySuiteOptions& options);
std::vector<CheckResult> restriction_check(const PotentialSpec& spec,
                                           const IdentitySuiteOptions& options);
std::vector<CheckResult> cocycle_check(const PotentialSpec& spec,
                                       const IdentitySuiteOptions& options);
std::vector<CheckResult> determinant_check(const PotentialSpec& spec,
                                           const IdentitySuiteOptions& options);
std::vector<CheckResult> roundtrip_check(unsigned base, const IdentitySuiteOptions& options);
std::vector<CheckResult> shift_composition_check(unsigned base,
                                                 const IdentitySuiteOptions& options);

/// Structural identities of the model: coding-map conjugacy, half-line
/// restriction, cocycle property, determinant reconstruction, encode/evaluate
/// round trip and shift composition.
std::vector<CheckResult> run_identity_suite(const PotentialSpec& spec,
                                            const IdentitySuiteOptions& options = {});

}  // namespace doubling
