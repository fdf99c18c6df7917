#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace normsim {

struct VTraceResult {
  std::vector<double> vs;          // baseline targets per step
  std::vector<double> advantages;  // rho_t (r_t + gamma_t vs_{t+1} - V_t)
  std::vector<double> rhos;        // clipped importance ratios
};

// Standard V-Trace recursion with clipped importance ratios rho_bar = c_bar.
// `dones[t]` marks episode termination after step t (gamma zeroes across the
// boundary). `bootstrap_value` is V of the state after the last step.
inline VTraceResult vtrace_targets(const std::vector<double>& rewards,
                                   const std::vector<double>& values, double bootstrap_value,
                                   const std::vector<double>& behavior_logp,
                                   const std::vector<double>& target_logp,
                                   const std::vector<uint8_t>& dones, double gamma,
                                   double rho_bar = 1.0, double c_bar = 1.0) {
  const int L = static_cast<int>(rewards.size());
  VTraceResult out;
  out.vs.assign(L, 0.0);
  out.advantages.assign(L, 0.0);
  out.rhos.assign(L, 0.0);

  double vs_next = bootstrap_value;
  double v_next = bootstrap_value;
  for (int t = L - 1; t >= 0; --t) {
    const double ratio = std::exp(target_logp[t] - behavior_logp[t]);
    const double rho = std::min(rho_bar, ratio);
    const double c = std::min(c_bar, ratio);
    const double g = dones[t] ? 0.0 : gamma;
    const double delta = rho * (rewards[t] + g * v_next - values[t]);
    const double vs_t = values[t] + delta + g * c * (vs_next - v_next);
    out.rhos[t] = rho;
    out.advantages[t] = rho * (rewards[t] + g * vs_next - values[t]);
    out.vs[t] = vs_t;
    vs_next = vs_t;
    v_next = values[t];
  }
  return out;
}

}  // namespace normsim
