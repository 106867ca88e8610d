#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <utility>

#include "ast/error.hpp"
#include "ast/grassmann.hpp"

namespace ast {

/// FIFO memory of object models. A new model is admitted when the bag is
/// empty or at least `update_period` frames have passed since the previous
/// admission; at capacity the oldest model is dropped first.
class ModelBag {
 public:
  explicit ModelBag(std::size_t capacity = 10, std::size_t update_period = 5)
      : capacity_(capacity), update_period_(update_period) {
    if (capacity_ < 1) throw InvalidInput("bag capacity must be >= 1");
    if (update_period_ < 1) throw InvalidInput("bag update period must be >= 1");
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t update_period() const noexcept { return update_period_; }
  std::size_t size() const noexcept { return models_.size(); }
  bool empty() const noexcept { return models_.empty(); }

  /// Oldest first.
  const std::deque<AffineSubspace>& all_models() const noexcept { return models_; }

  /// Frames elapsed since the last admission, or nullopt before the first.
  std::optional<std::size_t> frames_since_update(std::size_t frame_index) const noexcept {
    if (!last_update_ || frame_index < *last_update_) return std::nullopt;
    return frame_index - *last_update_;
  }

  bool update_due(std::size_t frame_index) const noexcept {
    if (models_.empty() || !last_update_) return true;
    return frame_index >= *last_update_ && frame_index - *last_update_ >= update_period_;
  }

  /// Returns true when the model was admitted.
  bool maybe_update(AffineSubspace model, std::size_t frame_index) {
    if (!models_.empty() && model.ambient_dim() != models_.front().ambient_dim()) {
      throw InvalidInput("model dimension does not match the bag");
    }
    if (!update_due(frame_index)) return false;
    if (models_.size() == capacity_) models_.pop_front();
    models_.push_back(std::move(model));
    last_update_ = frame_index;
    return true;
  }

 private:
  std::size_t capacity_;
  std::size_t update_period_;
  std::deque<AffineSubspace> models_;
  std::optional<std::size_t> last_update_;
};

}  // namespace ast
