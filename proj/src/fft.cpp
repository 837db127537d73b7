#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "hypokit/errors.hpp"
#include "hypokit/grid.hpp"

namespace hypokit::detail {

namespace {

using PlanKey = std::tuple<std::vector<int>, std::vector<std::size_t>, int>;

// fftw_execute_dft is thread-safe; planning is not.
std::mutex plan_mutex;

struct PlanCache {
  std::map<PlanKey, fftw_plan> plans;
  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

fftw_plan get_plan(std::span<const int> shape, std::span<const std::size_t> axes, int sign) {
  PlanKey key{std::vector<int>(shape.begin(), shape.end()),
              std::vector<std::size_t>(axes.begin(), axes.end()), sign};
  std::lock_guard lock(plan_mutex);
  auto& plans = cache().plans;
  if (auto it = plans.find(key); it != plans.end()) return it->second;

  const int rank = static_cast<int>(shape.size());
  std::vector<int> strides(rank, 1);
  for (int a = rank - 2; a >= 0; --a) strides[a] = strides[a + 1] * shape[a + 1];

  std::vector<bool> transformed(rank, false);
  for (auto a : axes) transformed[a] = true;

  std::vector<fftw_iodim> dims;
  std::vector<fftw_iodim> loops;
  for (int a = 0; a < rank; ++a) {
    fftw_iodim d{shape[a], strides[a], strides[a]};
    (transformed[a] ? dims : loops).push_back(d);
  }

  std::size_t total = 1;
  for (int n : shape) total *= static_cast<std::size_t>(n);
  std::vector<cplx> scratch(total);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_guru_dft(static_cast<int>(dims.size()), dims.data(),
                                      static_cast<int>(loops.size()), loops.data(), buf, buf,
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw Error("fftw: failed to create plan");
  plans.emplace(std::move(key), plan);
  return plan;
}

}  // namespace

void dft_axes(std::span<cplx> data, std::span<const int> shape, std::span<const std::size_t> axes,
              int sign) {
  if (axes.empty() || data.empty()) return;
  fftw_plan plan = get_plan(shape, axes, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace hypokit::detail
