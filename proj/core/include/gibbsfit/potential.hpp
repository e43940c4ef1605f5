#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "gibbsfit/sft.hpp"
#include "gibbsfit/words.hpp"

namespace gibbsfit {

using SftPtr = std::shared_ptr<const Sft>;

/// Finite-range potential: a real table (natural-log units) on the admissible
/// r-words of a shift. f(x) depends on x_0 .. x_{r-1} only.
class Potential {
public:
  /// Validates that the table covers every admissible r-word with a finite
  /// value and contains no inadmissible keys.
  Potential(SftPtr sft, int range, std::unordered_map<std::string, double> table);

  static Potential zero(SftPtr sft) { return constant(std::move(sft), 0.0); }
  static Potential constant(SftPtr sft, double c);
  /// (1-t)*a + t*b on a shared table shape. Throws ShapeMismatch.
  static Potential affine(const Potential& a, const Potential& b, double t);

  const Sft& sft() const { return *sft_; }
  const SftPtr& sft_ptr() const { return sft_; }
  int range() const { return range_; }

  double value(WordView rword) const;
  double max_value() const { return max_value_; }
  double min_value() const { return min_value_; }

  /// Admissible r-words in lexicographic order, aligned with values().
  const std::vector<Word>& domain() const { return domain_; }
  const std::vector<double>& values() const { return values_; }

  /// sup-norm distance over the (shared) domain. Throws ShapeMismatch.
  double sup_diff(const Potential& other) const;
  /// Same domain and bitwise-identical values.
  bool identical_table(const Potential& other) const;

  /// Potential with the same table re-hosted on a compatible presentation of
  /// the same shift (used after re-blocking).
  Potential rehosted(SftPtr sft) const;

  /// Birkhoff sum over m windows of a word of length >= m + range - 1.
  double birkhoff_sum(WordView w, int m) const;

private:
  SftPtr sft_;
  int range_;
  std::vector<Word> domain_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
  double max_value_ = 0.0;
  double min_value_ = 0.0;
};

}  // namespace gibbsfit
