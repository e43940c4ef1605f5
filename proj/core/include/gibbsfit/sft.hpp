#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "gibbsfit/words.hpp"

namespace gibbsfit {

/// A mixing shift of finite type over a finite alphabet, presented as a
/// first-order chain on admissible blocks of length max(order-1, 1).
///
/// Instances are immutable after construction and safe to share across
/// threads. Construction prunes blocks that cannot occur in a bi-infinite
/// sequence and verifies primitivity of the block-transition matrix.
class Sft {
public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t kDefaultWordCap = std::size_t{1} << 26;

  /// Builds the shift with forbidden words over {0..alphabet_size-1}.
  /// Throws EmptyShift if pruning removes every block, NotMixing if the
  /// pruned transition matrix is not primitive.
  static Sft build(int alphabet_size, std::vector<Word> forbidden);

  /// Same shift presented on blocks of length at least min_block_len
  /// (used to re-block before solving higher-range potentials).
  static Sft build(int alphabet_size, std::vector<Word> forbidden, int min_block_len);

  /// Mixing check without constructing: least N with A^N > 0 after pruning,
  /// or nullopt if no such N exists (bound B^2 - 2B + 2).
  static std::optional<int> mixing_power_of(int alphabet_size, std::vector<Word> forbidden);

  int alphabet_size() const { return alphabet_size_; }
  int order() const { return order_; }
  int block_len() const { return block_len_; }
  int mixing_power() const { return mixing_power_; }
  const std::vector<Word>& forbidden() const { return forbidden_; }

  std::size_t block_count() const { return block_count_; }
  WordView block(std::size_t id) const;
  /// Index of an admissible block, npos otherwise. Inverse of block().
  std::size_t block_id(WordView w) const;
  bool transition(std::size_t u, std::size_t v) const { return transition_[u * block_count_ + v] != 0; }
  /// Block reached by shifting u one step and appending s; npos if inadmissible.
  std::size_t advance(std::size_t u, Symbol s) const { return successor_[u * alphabet_size_ + s]; }

  bool is_word_admissible(WordView w) const;

  /// All admissible words of length m in lexicographic order.
  /// Throws ResourceLimit if alphabet_size^m exceeds the candidate cap.
  std::vector<Word> words(int m, std::size_t cap = kDefaultWordCap) const;
  void for_each_word(int m, const std::function<void(WordView)>& visit,
                     std::size_t cap = kDefaultWordCap) const;
  /// |L_m| computed by path counting (exact while below 2^53).
  double word_count(int m) const;

  /// This shift re-presented with block_len >= range-1, so that a potential
  /// of the given range becomes block-compatible.
  Sft reblocked_for_range(int range) const;

private:
  Sft() = default;

  int alphabet_size_ = 0;
  int order_ = 0;
  int block_len_ = 0;
  int mixing_power_ = 0;
  std::vector<Word> forbidden_;          // normalized to common length = order_
  std::size_t block_count_ = 0;
  std::vector<Symbol> block_symbols_;    // block_count_ x block_len_
  std::vector<std::uint8_t> transition_; // block_count_ x block_count_
  std::vector<std::size_t> successor_;   // block_count_ x alphabet_size_

  friend struct SftBuilder;
};

}  // namespace gibbsfit
