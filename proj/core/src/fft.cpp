#include "fft_detail.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

#include "osclab/errors.hpp"

namespace osclab::detail {
namespace {

struct PlanSlot {
  fftw_plan plan = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  std::size_t count = 0;

  ~PlanSlot() {
    if (plan) fftw_destroy_plan(plan);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int>, PlanSlot> slots;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void dft(int dimension, int modes_per_axis, int sign,
         std::vector<std::complex<double>>& data) {
  if (dimension != 1 && dimension != 2)
    throw UsageError("dft supports d = 1 and d = 2");
  if (sign != 1 && sign != -1) throw UsageError("dft sign must be +1 or -1");
  const std::size_t m = static_cast<std::size_t>(modes_per_axis);
  const std::size_t count = dimension == 2 ? m * m : m;
  if (data.size() != count) throw UsageError("dft data size does not match grid");

  PlanCache& c = cache();
  std::lock_guard<std::mutex> lock(c.mutex);
  PlanSlot& slot = c.slots[{dimension, modes_per_axis, sign}];
  if (!slot.plan) {
    slot.count = count;
    slot.in = fftw_alloc_complex(count);
    slot.out = fftw_alloc_complex(count);
    if (!slot.in || !slot.out) throw ScaleError("dft buffer allocation failed");
    const int dir = sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD;
    slot.plan = dimension == 2
                    ? fftw_plan_dft_2d(modes_per_axis, modes_per_axis, slot.in,
                                       slot.out, dir, FFTW_ESTIMATE)
                    : fftw_plan_dft_1d(modes_per_axis, slot.in, slot.out, dir,
                                       FFTW_ESTIMATE);
    if (!slot.plan) throw ScaleError("dft plan creation failed");
  }
  std::memcpy(slot.in, data.data(), count * sizeof(fftw_complex));
  fftw_execute(slot.plan);
  std::memcpy(data.data(), slot.out, count * sizeof(fftw_complex));
}

}  // namespace osclab::detail
