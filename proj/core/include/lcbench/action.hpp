#pragma once

#include <array>

namespace lcbench {

// Resolve the discrete lane command from the two action weights.
// Ties go to "stay" (0).
inline int resolve_discrete(double k_stay, double k_change) {
  return k_change > k_stay ? 1 : 0;
}

// One continuous acceleration command plus the weights of the two discrete
// choices {0: stay, 1: change lane} and the resolved choice itself.
struct HybridAction {
  double a_cont = 0.0;
  std::array<double, 2> k_weights{1.0, 0.0};
  int discrete = 0;

  static HybridAction from_parts(double a_cont, double k_stay, double k_change) {
    return HybridAction{a_cont, {k_stay, k_change}, resolve_discrete(k_stay, k_change)};
  }
  static HybridAction stay(double a_cont) { return from_parts(a_cont, 1.0, 0.0); }
  static HybridAction change(double a_cont) { return from_parts(a_cont, 0.0, 1.0); }
};

}  // namespace lcbench
