#include "wavecoh/significance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "coherence_detail.hpp"
#include "wavecoh/errors.hpp"

namespace wavecoh {
namespace {

constexpr std::size_t kMinRuns = 100;
constexpr std::size_t kBurnIn = 100;
constexpr double kPhiCap = 0.999;

void check_options(const SignificanceOptions& opt) {
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) {
        throw InvalidParameterError("alpha must lie strictly between 0 and 1");
    }
    if (opt.runs < kMinRuns) {
        throw InvalidParameterError("surrogate runs must be at least " + std::to_string(kMinRuns));
    }
}

std::size_t quantile_index(double alpha, std::size_t m) {
    // Empirical (1−alpha) quantile as an order statistic, 0-based.
    const double pos = std::ceil((1.0 - alpha) * static_cast<double>(m)) - 1.0;
    if (pos <= 0.0) return 0;
    return std::min(m - 1, static_cast<std::size_t>(pos));
}

// Column indices whose cone boundary exceeds the row's scale, i.e. the
// edge-safe region. Shared by pooling and by nothing else; the observed
// mask intentionally covers every column.
std::vector<std::vector<std::size_t>> edge_safe_columns(const CoherenceResult& observed) {
    std::vector<std::vector<std::size_t>> cols(observed.magnitude.rows());
    for (std::size_t j = 0; j < observed.magnitude.rows(); ++j) {
        for (std::size_t i = 0; i < observed.magnitude.cols(); ++i) {
            if (observed.edge_safe(j, i)) cols[j].push_back(i);
        }
    }
    return cols;
}

// Shared driver: `run_field(r)` produces the surrogate magnitude field for
// run r; NaN entries are skipped when pooling. Deterministic slot placement
// keeps the pools identical under any scheduling.
template <typename RunField>
SignificanceField significance_from_runs(const CoherenceResult& observed,
                                         const SignificanceOptions& opt, RunField&& run_field) {
    const auto safe_cols = edge_safe_columns(observed);
    const std::size_t rows = observed.magnitude.rows();

    std::vector<std::vector<double>> pool(rows);
    for (std::size_t j = 0; j < rows; ++j) {
        pool[j].assign(opt.runs * safe_cols[j].size(), std::numeric_limits<double>::quiet_NaN());
    }

    unsigned workers = opt.threads != 0 ? opt.threads : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, opt.runs));

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto work = [&] {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= opt.runs) return;
            try {
                const Field<double> mag = run_field(r);
                for (std::size_t j = 0; j < rows; ++j) {
                    const auto& idx = safe_cols[j];
                    double* slot = pool[j].data() + r * idx.size();
                    for (std::size_t k = 0; k < idx.size(); ++k) slot[k] = mag(j, idx[k]);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(opt.runs);
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    SignificanceField out;
    out.alpha = opt.alpha;
    out.runs = opt.runs;
    out.seed = opt.seed;
    out.row_threshold.assign(rows, 1.0);
    for (std::size_t j = 0; j < rows; ++j) {
        auto& p = pool[j];
        p.erase(std::remove_if(p.begin(), p.end(), [](double v) { return std::isnan(v); }),
                p.end());
        if (p.empty()) continue;  // no edge-safe support at this scale
        const std::size_t q = quantile_index(opt.alpha, p.size());
        std::nth_element(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(q), p.end());
        out.row_threshold[j] = p[q];
    }

    out.mask = Field<std::uint8_t>(rows, observed.magnitude.cols(), 0);
    for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t i = 0; i < observed.magnitude.cols(); ++i) {
            const double v = observed.magnitude(j, i);
            out.mask(j, i) = (!std::isnan(v) && v > out.row_threshold[j]) ? 1 : 0;
        }
    }
    return out;
}

}  // namespace

Ar1Model fit_ar1(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 8) throw SeriesTooShortError("AR(1) fit needs at least 8 points");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    double c0 = 0.0;
    double c1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - mean;
        c0 += d * d;
        if (i + 1 < n) c1 += d * (x[i + 1] - mean);
    }
    if (c0 == 0.0) throw DegenerateSeriesError("constant series has no AR(1) structure");

    Ar1Model m;
    m.mean = mean;
    m.phi = std::clamp(c1 / c0, 0.0, kPhiCap);
    const double variance = c0 / static_cast<double>(n - 1);
    m.sigma = std::sqrt(variance * (1.0 - m.phi * m.phi));
    return m;
}

std::vector<double> ar1_surrogate(const Ar1Model& model, std::size_t n, Rng& rng) {
    if (!(model.phi >= 0.0 && model.phi < 1.0)) {
        throw InvalidParameterError("surrogate requires phi in [0, 1)");
    }
    if (!(model.sigma >= 0.0) || !std::isfinite(model.sigma)) {
        throw InvalidParameterError("surrogate requires finite non-negative sigma");
    }
    double u = 0.0;
    for (std::size_t i = 0; i < kBurnIn; ++i) u = model.phi * u + model.sigma * rng.normal();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        u = model.phi * u + model.sigma * rng.normal();
        out[i] = model.mean + u;
    }
    return out;
}

SignificanceField coherence_significance(const CoherenceResult& observed,
                                         std::span<const double> x, std::span<const double> y,
                                         const SignificanceOptions& opt) {
    check_options(opt);
    if (x.size() != y.size() || x.size() != observed.magnitude.cols()) {
        throw LengthMismatchError("series lengths do not match the observed coherence field");
    }
    const Ar1Model mx = fit_ar1(x);
    const Ar1Model my = fit_ar1(y);
    const std::size_t n = x.size();
    const Smoother sm(observed.grid, observed.dt, n);

    return significance_from_runs(observed, opt, [&](std::size_t r) {
        Rng rng = Rng::substream(opt.seed, r);
        const std::vector<double> sx = ar1_surrogate(mx, n, rng);
        const std::vector<double> sy = ar1_surrogate(my, n, rng);
        return detail::coherence_magnitude(sx, sy, observed.dt, observed.grid, sm);
    });
}

SignificanceField partial_coherence_significance(const CoherenceResult& observed,
                                                 std::span<const double> x,
                                                 std::span<const double> y,
                                                 std::span<const double> z, PartialForm form,
                                                 const SignificanceOptions& opt) {
    check_options(opt);
    if (x.size() != y.size() || x.size() != z.size() || x.size() != observed.magnitude.cols()) {
        throw LengthMismatchError("series lengths do not match the observed coherence field");
    }
    const Ar1Model mx = fit_ar1(x);
    const Ar1Model my = fit_ar1(y);
    const Ar1Model mz = fit_ar1(z);
    const std::size_t n = x.size();

    return significance_from_runs(observed, opt, [&](std::size_t r) {
        Rng rng = Rng::substream(opt.seed, r);
        const std::vector<double> sx = ar1_surrogate(mx, n, rng);
        const std::vector<double> sy = ar1_surrogate(my, n, rng);
        const std::vector<double> sz = ar1_surrogate(mz, n, rng);
        return partial_coherence(sx, sy, sz, observed.dt, observed.grid, form).magnitude;
    });
}

}  // namespace wavecoh
