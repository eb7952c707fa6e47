#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>

#include "casim/error.hpp"

namespace casim {

/// Comparison tolerance shared by every normalization and equality check.
inline constexpr double kTolerance = 1e-9;

/// Finite discrete probability law over ordered outcomes.
///
/// Outcomes are kept in a std::map so iteration order is canonical and two
/// distributions compare equal iff they carry the same outcome/mass pairs.
/// A distribution is either proper (mass sums to 1 within kTolerance) or an
/// explicitly flagged sub-distribution; `require_normalized` rejects the
/// latter.
template <class T>
class Distribution {
 public:
  using Map = std::map<T, double>;

  Distribution() = default;

  static Distribution point(T outcome) {
    Distribution d;
    d.mass_.emplace(std::move(outcome), 1.0);
    return d;
  }

  /// Validating constructor: masses must be finite and non-negative and, unless
  /// `sub` is set, sum to 1.
  static Distribution from(Map mass, bool sub = false) {
    Distribution d;
    d.mass_ = std::move(mass);
    d.sub_ = sub;
    d.validate();
    return d;
  }

  static Distribution sub_distribution(Map mass) { return from(std::move(mass), true); }

  /// Accumulates `p` onto `outcome`.
  void add(const T& outcome, double p) { mass_[outcome] += p; }

  double operator[](const T& outcome) const {
    auto it = mass_.find(outcome);
    return it == mass_.end() ? 0.0 : it->second;
  }

  double total() const {
    double sum = 0.0;
    for (const auto& [_, p] : mass_) sum += p;
    return sum;
  }

  bool empty() const { return mass_.empty(); }
  std::size_t size() const { return mass_.size(); }
  bool is_sub() const { return sub_; }
  void mark_sub(bool sub) { sub_ = sub; }

  bool is_normalized(double tol = kTolerance) const {
    return !mass_.empty() && std::abs(total() - 1.0) <= tol;
  }

  void validate() const {
    for (const auto& [_, p] : mass_) {
      if (!std::isfinite(p) || p < 0.0) {
        throw Error(ErrorKind::kInvalidModel, "probability must be finite and non-negative, got " +
                                                  std::to_string(p));
      }
    }
    if (!sub_) require_normalized("distribution");
  }

  void require_normalized(const std::string& what) const {
    if (!is_normalized()) {
      throw Error(ErrorKind::kInvalidModel,
                  what + " is not normalized: total mass " + std::to_string(total()));
    }
  }

  /// Outcomes with strictly positive mass.
  template <class F>
  void for_each_positive(F&& f) const {
    for (const auto& [x, p] : mass_) {
      if (p > 0.0) f(x, p);
    }
  }

  const Map& masses() const { return mass_; }
  auto begin() const { return mass_.begin(); }
  auto end() const { return mass_.end(); }

  bool operator==(const Distribution&) const = default;

 private:
  Map mass_;
  bool sub_ = false;
};

/// Pushes a distribution through a function, summing mass on collisions.
template <class U, class T, class F>
Distribution<U> map_outcomes(const Distribution<T>& d, F&& f) {
  Distribution<U> out;
  for (const auto& [x, p] : d) out.add(f(x), p);
  out.mark_sub(d.is_sub());
  return out;
}

}  // namespace casim
