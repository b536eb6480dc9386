// Serial vs OpenMP timing of the per-step kernels on a sparse random network.
//   dybm_kernel_bench [n_units] [fan_in] [steps]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "dybm/kernels.hpp"
#include "dybm/validation.hpp"

using namespace dybm;

namespace {

struct Timing {
  double probs_ms = 0, advance_ms = 0, grad_ms = 0;
  double checksum = 0;
};

Timing run(const ModelConfig& c, const Parameters& p, const Series& xs, Backend backend) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };
  Timing t;
  auto state = init_state(c);
  auto grad = Gradient::zeros(c);
  std::vector<double> probs(c.n_units());
  for (const auto& x : xs) {
    const auto t0 = clock::now();
    kernels::fire_probabilities(p, state, c, probs, backend);
    const auto t1 = clock::now();
    kernels::accumulate_step_gradient(state, c, x, probs, grad, backend);
    const auto t2 = clock::now();
    kernels::advance(state, c, x, backend);
    const auto t3 = clock::now();
    t.probs_ms += ms(t0, t1);
    t.grad_ms += ms(t1, t2);
    t.advance_ms += ms(t2, t3);
  }
  t.checksum = grad.norm();
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 512;
  const std::size_t fan_in = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 64;
  const std::size_t steps = argc > 3 ? std::strtoul(argv[3], nullptr, 10) : 200;

  Rng rng(1);
  std::vector<Synapse> syn;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t f = 0; f < fan_in && f < n; ++f) {
      syn.push_back({(j + 1 + f * 13) % n, j, 1 + static_cast<int>(rng.below(8))});
    }
  }
  // Drop duplicate pairs produced by the stride when fan_in is close to n.
  std::sort(syn.begin(), syn.end(), [](const Synapse& a, const Synapse& b) {
    return a.post != b.post ? a.post < b.post : a.pre < b.pre;
  });
  syn.erase(std::unique(syn.begin(), syn.end(),
                        [](const Synapse& a, const Synapse& b) { return a.pre == b.pre && a.post == b.post; }),
            syn.end());
  const auto c = ModelConfig::create(n, {0.5, 0.8, 0.95}, {0.25, 0.5, 0.9}, syn);
  const auto p = validation::random_parameters(rng, c, 0.5, 0.1);
  const auto xs = validation::random_series(rng, n, steps, 0.2);

  std::printf("units %zu, pairs %zu, steps %zu, threads %d\n", n, c.num_pairs(), steps, omp_get_max_threads());
  const auto serial = run(c, p, xs, Backend::kSerial);
  const auto parallel = run(c, p, xs, Backend::kOpenMP);
  std::printf("%-10s %12s %12s %12s\n", "backend", "probs ms", "gradient ms", "advance ms");
  std::printf("%-10s %12.2f %12.2f %12.2f\n", "serial", serial.probs_ms, serial.grad_ms, serial.advance_ms);
  std::printf("%-10s %12.2f %12.2f %12.2f\n", "openmp", parallel.probs_ms, parallel.grad_ms, parallel.advance_ms);
  const double total_s = serial.probs_ms + serial.grad_ms + serial.advance_ms;
  const double total_p = parallel.probs_ms + parallel.grad_ms + parallel.advance_ms;
  std::printf("speedup %.2fx, results %s\n", total_s / total_p,
              serial.checksum == parallel.checksum ? "identical" : "DIFFER");
  return serial.checksum == parallel.checksum ? 0 : 1;
}
