#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace wavecoh::detail {
namespace {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// fftw_plan_dft_1d is not thread-safe; fftw_execute_dft on distinct buffers is.
std::mutex g_plan_mutex;
std::map<std::size_t, PlanPair>& plan_cache() {
    static auto* cache = new std::map<std::size_t, PlanPair>();
    return *cache;
}

PlanPair plans_for(std::size_t n) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair p;
    p.forward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.backward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p.forward == nullptr || p.backward == nullptr) {
        throw std::runtime_error("FFT plan creation failed");
    }
    cache.emplace(n, p);
    return p;
}

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void fft_forward(std::span<std::complex<double>> data) {
    if (!is_pow2(data.size())) throw std::invalid_argument("FFT length must be a power of two");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_for(data.size()).forward, buf, buf);
}

void fft_inverse(std::span<std::complex<double>> data) {
    if (!is_pow2(data.size())) throw std::invalid_argument("FFT length must be a power of two");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plans_for(data.size()).backward, buf, buf);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& z : data) z *= scale;
}

}  // namespace wavecoh::detail
