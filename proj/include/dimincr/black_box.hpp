#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace dimincr {

// Batched point-evaluation contract. Evaluations must be pure (same point,
// same value); the counter tracks total samples consumed and is shared
// between copies so every handle sees the same accounting.
class BlackBox {
  public:
    // points: row-major (npoints x d); out: npoints values
    using Evaluator = std::function<void(std::span<const double> points, std::size_t npoints,
                                         std::span<std::complex<double>> out)>;

    BlackBox() = default;
    BlackBox(int d, Evaluator fn, bool concurrency_safe = true)
        : d_(d), fn_(std::move(fn)), safe_(concurrency_safe),
          counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

    int dimension() const { return d_; }
    bool concurrency_safe() const { return safe_; }
    std::uint64_t evaluations() const { return counter_->load(); }

    std::vector<std::complex<double>> evaluate_batch(std::span<const double> points) const {
        const std::size_t npoints = points.size() / static_cast<std::size_t>(d_);
        std::vector<std::complex<double>> out(npoints);
        fn_(points, npoints, out);
        counter_->fetch_add(npoints);
        return out;
    }

    std::complex<double> evaluate(std::span<const double> point) const {
        return evaluate_batch(point)[0];
    }

  private:
    int d_ = 0;
    Evaluator fn_;
    bool safe_ = true;
    std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

} // namespace dimincr
