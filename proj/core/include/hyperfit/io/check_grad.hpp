#pragma once

#include <cstdint>

#include "hyperfit/io/family.hpp"

namespace hyperfit::io {

struct GradCheckResult {
    Family family = Family::cauchy;
    int n = 1;
    int m = 1;
    int trials = 0;
    double max_rel_error = 0.0;
    double threshold = 1e-5;

    bool passed() const { return max_rel_error < threshold; }
};

/// Compares each family's analytic Riemannian gradient with central finite
/// differences of its loss along random geodesics, on `trials` random
/// (parameter, dataset, direction) triples. `m` is used by the matrix family only.
GradCheckResult check_grad(Family family, int n, int m, int trials, std::uint64_t seed = 1);

}  // namespace hyperfit::io
