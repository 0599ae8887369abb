#pragma once

#include <optional>
#include <utility>

#include "sco/common.hpp"

namespace sco {

/// An n x d data matrix (rows are instances) with optional per-instance targets.
class Dataset {
 public:
  Dataset() = default;

  explicit Dataset(Matrix values, std::optional<Vector> targets = std::nullopt)
      : values_(std::move(values)), targets_(std::move(targets)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
      throw ValidationError("dataset needs at least one row and one column");
    }
    if (!all_finite(values_)) throw ValidationError("dataset contains non-finite values");
    if (targets_) {
      if (targets_->size() != values_.rows()) {
        throw ValidationError("targets length must equal the number of rows");
      }
      if (!all_finite(*targets_)) throw ValidationError("targets contain non-finite values");
    }
  }

  const Matrix& values() const noexcept { return values_; }
  const std::optional<Vector>& targets() const noexcept { return targets_; }
  Index row_count() const noexcept { return values_.rows(); }
  Index feature_count() const noexcept { return values_.cols(); }

 private:
  Matrix values_;
  std::optional<Vector> targets_;
};

}  // namespace sco
