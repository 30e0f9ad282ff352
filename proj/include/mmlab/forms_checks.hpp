#ifndef MMLAB_FORMS_CHECKS_HPP
#define MMLAB_FORMS_CHECKS_HPP

#include <cstdint>
#include <string>

#include "mmlab/forms.hpp"

namespace mml::forms::checks {

struct CheckResult {
    bool pass = true;
    int checks = 0;
    double worst = 0.0;       // worst deviation seen
    std::string detail;       // one line per sub-check, plus failures
};

/// The general alternating-sum form reproduces each explicitly printed form
/// (with its stated -i factor) pointwise at random patch points.
CheckResult specialization_suite(uint64_t seed, int points_per_form = 50, double tol = 1e-12);

/// Path integrals of the exact 1-forms match the endpoint differences of
/// their potentials (D, L3, L4) on random smooth paths.
CheckResult stokes_suite(uint64_t seed, int paths_per_pair = 20, double tol = 1e-9);

/// The differential chain: each printed form's exterior derivative matches
/// the next form in the chain, by finite differences on random patches.
CheckResult dchain_suite(uint64_t seed, int patches_per_identity = 50, double rel_tol = 1e-5);

}  // namespace mml::forms::checks

#endif
