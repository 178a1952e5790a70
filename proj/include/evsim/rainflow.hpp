#pragma once

// Streaming three-point rainflow counter (ASTM E1049 style, residue kept
// between calls). Samples are pushed one at a time; turning points are
// detected on the fly and every closed half-cycle is reported through a
// callback as (depth, mean).

#include <cmath>
#include <cstddef>
#include <vector>

namespace evsim {

struct HalfCycle {
  double depth = 0.0;
  double mean = 0.0;
};

class StreamingRainflow {
 public:
  /// Feeds one sample. `on_half_cycle(HalfCycle)` is invoked for each
  /// half-cycle closed by this sample; a full cycle is reported twice.
  template <class OnHalfCycle>
  void push(double x, OnHalfCycle&& on_half_cycle) {
    if (residue_.empty()) {
      residue_.push_back(x);
      return;
    }
    if (direction_ == 0) {
      if (x == residue_.back()) return;
      candidate_ = x;
      direction_ = x > residue_.back() ? 1 : -1;
      return;
    }
    const double step = x - candidate_;
    if (step == 0.0) return;
    if ((step > 0.0) == (direction_ > 0)) {
      candidate_ = x;  // still travelling the same way
      return;
    }
    // Reversal: the candidate is a confirmed turning point.
    residue_.push_back(candidate_);
    candidate_ = x;
    direction_ = -direction_;
    extract(on_half_cycle);
  }

  /// Closes the residue: every remaining range, the open one included, is
  /// counted as a half-cycle. Leaves the counter empty.
  template <class OnHalfCycle>
  void flush(OnHalfCycle&& on_half_cycle) {
    if (direction_ != 0) {
      residue_.push_back(candidate_);
      extract(on_half_cycle);
    }
    for (std::size_t i = 1; i < residue_.size(); ++i) {
      emit(residue_[i - 1], residue_[i], on_half_cycle);
    }
    residue_.clear();
    direction_ = 0;
  }

  /// Confirmed turning points not yet closed into cycles.
  const std::vector<double>& residue() const noexcept { return residue_; }
  bool has_open_range() const noexcept { return direction_ != 0; }

 private:
  template <class OnHalfCycle>
  static void emit(double a, double b, OnHalfCycle& on_half_cycle) {
    const double depth = std::fabs(b - a);
    if (depth > 0.0) on_half_cycle(HalfCycle{depth, 0.5 * (a + b)});
  }

  template <class OnHalfCycle>
  void extract(OnHalfCycle& on_half_cycle) {
    while (residue_.size() >= 3) {
      const std::size_t n = residue_.size();
      const double x = std::fabs(residue_[n - 1] - residue_[n - 2]);
      const double y = std::fabs(residue_[n - 2] - residue_[n - 3]);
      if (x < y) break;
      if (n == 3) {
        // Range y contains the starting point: half-cycle, drop the start.
        emit(residue_[0], residue_[1], on_half_cycle);
        residue_.erase(residue_.begin());
      } else {
        emit(residue_[n - 3], residue_[n - 2], on_half_cycle);
        emit(residue_[n - 2], residue_[n - 3], on_half_cycle);
        residue_.erase(residue_.end() - 3, residue_.end() - 1);
      }
    }
  }

  std::vector<double> residue_;
  double candidate_ = 0.0;
  int direction_ = 0;
};

}  // namespace evsim
