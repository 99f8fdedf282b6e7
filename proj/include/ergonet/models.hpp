#pragma once

#include "ergonet/operators.hpp"

namespace ergonet::models {

using ops::Mat;
using ops::Vec;

/// [[0,1],[1,0]]: the involution behind most worked examples.
Mat swap2();

/// Row-stochastic [[.5,.5],[.25,.75]] (the transpose of the column-stochastic
/// chain acting on functions); stationary distribution (1/3, 2/3).
Mat stochastic_on_functions();

Mat random_unitary(Rng& rng, int d);

/// Gaussian matrix rescaled so its induced norm in ctx is `target` (< 1 for a
/// strict contraction).
Mat random_scaled_contraction(Rng& rng, int d, const space::NormContext& ctx,
                              double target = 0.9);

/// 2-norm contraction Q (D ⊕ C) Q^H with a planted eigenvalue 1, at least one
/// unimodular eigenvalue away from 1 (semisimple peripheral spectrum), and a
/// strictly contractive (generally non-normal) block C.
Mat random_peripheral_contraction(Rng& rng, int d);

/// k commuting generators V D_i V^-1 (shared, mildly non-normal V): some
/// jointly fixed eigendirections, some unimodular, some strictly inside.
std::vector<Mat> random_commuting_bounded(Rng& rng, int d, int k);

Vec random_vector(Rng& rng, int d);

}  // namespace ergonet::models
