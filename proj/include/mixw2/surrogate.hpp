#pragma once

#include "mixw2/mixed.hpp"
#include "mixw2/tape.hpp"

namespace mixw2 {

/// Forward value round(v), backward gradient 1 (identity pass-through),
/// built as v - detach(v - round(v)).
inline Var straight_through_round(Tape& t, Var v) {
  return t.sub(v, t.detach(t.sub(v, t.round(v))));
}

/// Differentiable surrogate of the categorical penalty for a ground-truth
/// integer y against a continuous prediction. Quadratic c*(y - yhat)^2 for
/// |y - yhat| <= 1/2 (closed condition); otherwise the value is 1 and the
/// gradient flows through the straight-through rounding, pulling yhat
/// toward y.
inline Var surrogate_delta(Tape& t, int y, Var yhat, double c) {
  const double u = static_cast<double>(y) - t.value_scalar(yhat);
  if (std::abs(u) <= 0.5) {
    return t.scale(t.square(t.add_scalar(t.scale(yhat, -1.0), static_cast<double>(y))), c);
  }
  constexpr double two_pi = 2.0 * M_PI;
  Var st = straight_through_round(t, yhat);
  Var dist = t.abs(t.add_scalar(t.scale(st, -1.0), static_cast<double>(y)));
  Var arg = t.add_scalar(t.scale(dist, two_pi), M_PI / 2.0);
  return t.add_scalar(t.scale(t.cos(arg), -1.0 / two_pi), 1.0);
}

/// Differentiable surrogate of the squared mixed norm between an observed
/// sample and a d-component prediction node. Equals mixed_norm_sq of the
/// difference whenever all categorical slots of the prediction are integers.
inline Var surrogate_cost_sq(Tape& t, const MixedSample& y, Var yhat,
                             const MixedMetricConfig& cfg) {
  if (t.value(yhat).rows() != cfg.d || t.value(yhat).cols() != 1)
    throw std::invalid_argument("surrogate_cost_sq: prediction shape mismatch");
  Var total = t.scalar(0.0);
  if (cfg.d1 > 0) {
    Var diff = t.sub(t.constant(y.cont), t.slice_rows(yhat, 0, cfg.d1));
    total = t.scale(t.sum(t.square(diff)), cfg.lambda);
  }
  for (int j = 0; j < cfg.cat_dims(); ++j) {
    Var slot = t.coeff(yhat, cfg.d1 + j);
    total = t.add(total, surrogate_delta(t, y.cat[j], slot, cfg.c));
  }
  return total;
}

}  // namespace mixw2
