#include "gibbsfit/potential.hpp"

#include <algorithm>
#include <cmath>

#include "gibbsfit/errors.hpp"

namespace gibbsfit {

Potential::Potential(SftPtr sft, int range, std::unordered_map<std::string, double> table)
    : sft_(std::move(sft)), range_(range) {
  if (range_ < 1) throw DomainError("potential range must be >= 1");
  domain_ = sft_->words(range_);
  values_.reserve(domain_.size());
  for (std::size_t i = 0; i < domain_.size(); ++i) {
    const std::string key = word_to_string(domain_[i]);
    auto it = table.find(key);
    if (it == table.end()) {
      throw ShapeMismatch("potential table missing admissible word '" + key + "'");
    }
    if (!std::isfinite(it->second)) {
      throw DomainError("potential value at '" + key + "' is not finite");
    }
    values_.push_back(it->second);
    index_.emplace(key, i);
    table.erase(it);
  }
  if (!table.empty()) {
    throw DomainError("potential table has inadmissible key '" + table.begin()->first + "'");
  }
  max_value_ = *std::max_element(values_.begin(), values_.end());
  min_value_ = *std::min_element(values_.begin(), values_.end());
}

Potential Potential::constant(SftPtr sft, double c) {
  std::unordered_map<std::string, double> table;
  for (const Word& w : sft->words(1)) table.emplace(word_to_string(w), c);
  return Potential(std::move(sft), 1, std::move(table));
}

Potential Potential::affine(const Potential& a, const Potential& b, double t) {
  if (a.range_ != b.range_ || a.domain_ != b.domain_) {
    throw ShapeMismatch("affine combination requires identically shaped tables");
  }
  std::unordered_map<std::string, double> table;
  for (std::size_t i = 0; i < a.domain_.size(); ++i) {
    table.emplace(word_to_string(a.domain_[i]), (1.0 - t) * a.values_[i] + t * b.values_[i]);
  }
  return Potential(a.sft_, a.range_, std::move(table));
}

double Potential::value(WordView rword) const {
  auto it = index_.find(word_to_string(rword));
  if (it == index_.end()) {
    throw DomainError("potential evaluated off its admissible domain: '" +
                      word_to_string(rword) + "'");
  }
  return values_[it->second];
}

double Potential::sup_diff(const Potential& other) const {
  if (range_ != other.range_ || domain_ != other.domain_) {
    throw ShapeMismatch("sup_diff requires identically shaped tables");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    d = std::max(d, std::abs(values_[i] - other.values_[i]));
  }
  return d;
}

bool Potential::identical_table(const Potential& other) const {
  return range_ == other.range_ && domain_ == other.domain_ && values_ == other.values_;
}

Potential Potential::rehosted(SftPtr sft) const {
  std::unordered_map<std::string, double> table;
  for (std::size_t i = 0; i < domain_.size(); ++i) {
    table.emplace(word_to_string(domain_[i]), values_[i]);
  }
  return Potential(std::move(sft), range_, std::move(table));
}

double Potential::birkhoff_sum(WordView w, int m) const {
  if (static_cast<int>(w.size()) < m + range_ - 1) {
    throw LengthMismatch("word too short for a length-" + std::to_string(m) + " Birkhoff sum");
  }
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    acc += value(w.subspan(static_cast<std::size_t>(k), static_cast<std::size_t>(range_)));
  }
  return acc;
}

}  // namespace gibbsfit
