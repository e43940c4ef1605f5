#include "gibbsfit/sft.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "gibbsfit/errors.hpp"

namespace gibbsfit {

namespace {

// Hash of a word for forbidden-factor lookup.
struct WordHash {
  std::size_t operator()(const Word& w) const {
    std::size_t h = 1469598103934665603ull;
    for (Symbol s : w) {
      h ^= s;
      h *= 1099511628211ull;
    }
    return h;
  }
};

using WordSet = std::unordered_set<Word, WordHash>;

bool contains_factor(WordView w, const WordSet& bad, int flen) {
  if (flen <= 0 || static_cast<int>(w.size()) < flen) return false;
  Word window(static_cast<std::size_t>(flen));
  for (std::size_t i = 0; i + flen <= w.size(); ++i) {
    std::copy(w.begin() + i, w.begin() + i + flen, window.begin());
    if (bad.count(window)) return true;
  }
  return false;
}

void check_candidate_budget(int alphabet_size, int length, std::size_t cap, const char* what) {
  const double bits = length * std::log2(static_cast<double>(alphabet_size));
  if (bits > std::log2(static_cast<double>(cap)) + 1e-9) {
    throw ResourceLimit(std::string(what) + ": " + std::to_string(alphabet_size) + "^" +
                        std::to_string(length) + " candidates exceed cap " + std::to_string(cap));
  }
}

// Least N <= B^2 - 2B + 2 with A^N entrywise positive (Wielandt bound).
std::optional<int> primitivity_power(const std::vector<std::uint8_t>& adj, std::size_t n) {
  if (n == 0) return std::nullopt;
  const std::size_t bound = n * n - 2 * n + 2;
  std::vector<std::uint8_t> power = adj;
  std::vector<std::uint8_t> next(n * n);
  for (std::size_t step = 1; step <= bound; ++step) {
    if (std::all_of(power.begin(), power.end(), [](std::uint8_t b) { return b != 0; })) {
      return static_cast<int>(step);
    }
    if (step == bound) break;
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        if (!power[i * n + k]) continue;
        const std::uint8_t* row = adj.data() + k * n;
        std::uint8_t* out = next.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) out[j] |= row[j];
      }
    }
    power.swap(next);
  }
  return std::nullopt;
}

struct PrunedPresentation {
  int order = 0;
  int block_len = 0;
  std::vector<Word> forbidden;
  std::vector<Word> blocks;
  std::vector<std::uint8_t> transition;
};

PrunedPresentation prune_presentation(int alphabet_size, std::vector<Word> forbidden,
                                      int min_block_len) {
  if (alphabet_size < 2 || alphabet_size > kMaxAlphabet) {
    throw DomainError("alphabet_size must be in [2, 36], got " + std::to_string(alphabet_size));
  }
  for (const Word& w : forbidden) {
    if (w.empty()) throw DomainError("forbidden words must have length >= 1");
    for (Symbol s : w) {
      if (s >= alphabet_size) {
        throw DomainError("forbidden word uses symbol " + std::to_string(int(s)) +
                          " outside alphabet of size " + std::to_string(alphabet_size));
      }
    }
  }

  PrunedPresentation out;

  // Normalize forbidden words to a common length: right-extensions of a
  // shorter word cover every occurrence in a bi-infinite sequence.
  int order = 0;
  for (const Word& w : forbidden) order = std::max<int>(order, static_cast<int>(w.size()));
  WordSet bad;
  if (order > 0) {
    check_candidate_budget(alphabet_size, order, Sft::kDefaultWordCap, "forbidden-word expansion");
    for (const Word& w : forbidden) {
      const int pad = order - static_cast<int>(w.size());
      Word ext = w;
      ext.resize(static_cast<std::size_t>(order), 0);
      // enumerate all pads
      std::function<void(int)> rec = [&](int pos) {
        if (pos == pad) {
          bad.insert(ext);
          return;
        }
        for (int s = 0; s < alphabet_size; ++s) {
          ext[w.size() + static_cast<std::size_t>(pos)] = static_cast<Symbol>(s);
          rec(pos + 1);
        }
      };
      rec(0);
    }
  }
  out.order = order;
  out.forbidden.assign(bad.begin(), bad.end());
  std::sort(out.forbidden.begin(), out.forbidden.end());

  const int block_len = std::max({order - 1, 1, min_block_len});
  out.block_len = block_len;

  check_candidate_budget(alphabet_size, block_len, Sft::kDefaultWordCap, "block enumeration");

  // Candidate blocks in lexicographic order, skipping forbidden factors.
  std::vector<Word> blocks;
  Word cur(static_cast<std::size_t>(block_len), 0);
  std::function<void(int)> gen = [&](int pos) {
    if (pos == block_len) {
      if (!contains_factor(cur, bad, order)) blocks.push_back(cur);
      return;
    }
    for (int s = 0; s < alphabet_size; ++s) {
      cur[static_cast<std::size_t>(pos)] = static_cast<Symbol>(s);
      gen(pos + 1);
    }
  };
  gen(0);

  auto admissible_step = [&](const Word& u, const Word& v) {
    for (int i = 0; i + 1 < block_len; ++i) {
      if (u[static_cast<std::size_t>(i + 1)] != v[static_cast<std::size_t>(i)]) return false;
    }
    Word joined = u;
    joined.push_back(v.back());
    return !contains_factor(joined, bad, order);
  };

  std::size_t b = blocks.size();
  std::vector<std::uint8_t> trans(b * b, 0);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      trans[i * b + j] = admissible_step(blocks[i], blocks[j]) ? 1 : 0;
    }
  }

  // Prune to the maximal subshift: drop blocks with an empty row or column
  // until a fixpoint; survivors all lie on bi-infinite paths.
  std::vector<std::uint8_t> alive(b, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < b; ++i) {
      if (!alive[i]) continue;
      bool has_out = false, has_in = false;
      for (std::size_t j = 0; j < b && !(has_out && has_in); ++j) {
        if (alive[j] && trans[i * b + j]) has_out = true;
        if (alive[j] && trans[j * b + i]) has_in = true;
      }
      if (!has_out || !has_in) {
        alive[i] = 0;
        changed = true;
      }
    }
  }

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < b; ++i) {
    if (alive[i]) keep.push_back(i);
  }
  if (keep.empty()) throw EmptyShift("every block was pruned; the shift space is empty");

  out.blocks.reserve(keep.size());
  for (std::size_t i : keep) out.blocks.push_back(blocks[i]);
  out.transition.assign(keep.size() * keep.size(), 0);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    for (std::size_t j = 0; j < keep.size(); ++j) {
      out.transition[i * keep.size() + j] = trans[keep[i] * b + keep[j]];
    }
  }
  return out;
}

}  // namespace

Sft Sft::build(int alphabet_size, std::vector<Word> forbidden) {
  return build(alphabet_size, std::move(forbidden), 1);
}

Sft Sft::build(int alphabet_size, std::vector<Word> forbidden, int min_block_len) {
  PrunedPresentation p = prune_presentation(alphabet_size, std::move(forbidden), min_block_len);
  const auto mixing = primitivity_power(p.transition, p.blocks.size());
  if (!mixing) {
    throw NotMixing("block-transition matrix is not primitive (" +
                    std::to_string(p.blocks.size()) + " blocks)");
  }

  Sft sft;
  sft.alphabet_size_ = alphabet_size;
  sft.order_ = p.order;
  sft.block_len_ = p.block_len;
  sft.mixing_power_ = *mixing;
  sft.forbidden_ = std::move(p.forbidden);
  sft.block_count_ = p.blocks.size();
  sft.block_symbols_.reserve(sft.block_count_ * static_cast<std::size_t>(p.block_len));
  for (const Word& blk : p.blocks) {
    sft.block_symbols_.insert(sft.block_symbols_.end(), blk.begin(), blk.end());
  }
  sft.transition_ = std::move(p.transition);

  sft.successor_.assign(sft.block_count_ * static_cast<std::size_t>(alphabet_size), npos);
  for (std::size_t u = 0; u < sft.block_count_; ++u) {
    Word next(sft.block(u).begin() + 1, sft.block(u).end());
    next.push_back(0);
    for (int s = 0; s < alphabet_size; ++s) {
      next.back() = static_cast<Symbol>(s);
      const std::size_t v = sft.block_id(next);
      if (v != npos && sft.transition(u, v)) {
        sft.successor_[u * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(s)] = v;
      }
    }
  }
  return sft;
}

std::optional<int> Sft::mixing_power_of(int alphabet_size, std::vector<Word> forbidden) {
  PrunedPresentation p = prune_presentation(alphabet_size, std::move(forbidden), 1);
  return primitivity_power(p.transition, p.blocks.size());
}

WordView Sft::block(std::size_t id) const {
  return WordView(block_symbols_.data() + id * static_cast<std::size_t>(block_len_),
                  static_cast<std::size_t>(block_len_));
}

std::size_t Sft::block_id(WordView w) const {
  if (static_cast<int>(w.size()) != block_len_) return npos;
  // blocks are stored in lexicographic order
  std::size_t lo = 0, hi = block_count_;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const WordView b = block(mid);
    if (std::lexicographical_compare(b.begin(), b.end(), w.begin(), w.end())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < block_count_) {
    const WordView b = block(lo);
    if (std::equal(b.begin(), b.end(), w.begin(), w.end())) return lo;
  }
  return npos;
}

bool Sft::is_word_admissible(WordView w) const {
  if (w.empty()) return true;
  for (Symbol s : w) {
    if (s >= alphabet_size_) return false;
  }
  if (static_cast<int>(w.size()) < block_len_) {
    // a short word occurs iff it is a factor of some admissible block
    for (std::size_t u = 0; u < block_count_; ++u) {
      const WordView b = block(u);
      for (std::size_t off = 0; off + w.size() <= b.size(); ++off) {
        if (std::equal(w.begin(), w.end(), b.begin() + off)) return true;
      }
    }
    return false;
  }
  std::size_t u = block_id(w.subspan(0, static_cast<std::size_t>(block_len_)));
  if (u == npos) return false;
  for (std::size_t k = static_cast<std::size_t>(block_len_); k < w.size(); ++k) {
    u = advance(u, w[k]);
    if (u == npos) return false;
  }
  return true;
}

void Sft::for_each_word(int m, const std::function<void(WordView)>& visit, std::size_t cap) const {
  if (m < 1) throw DomainError("word length must be >= 1");
  check_candidate_budget(alphabet_size_, m, cap, "word enumeration");

  if (m < block_len_) {
    std::set<Word> factors;
    for (std::size_t u = 0; u < block_count_; ++u) {
      const WordView b = block(u);
      for (std::size_t off = 0; off + static_cast<std::size_t>(m) <= b.size(); ++off) {
        factors.emplace(b.begin() + off, b.begin() + off + m);
      }
    }
    for (const Word& w : factors) visit(w);
    return;
  }

  Word w(static_cast<std::size_t>(m));
  std::vector<std::size_t> path(static_cast<std::size_t>(m - block_len_) + 1);
  std::function<void(std::size_t, int)> dfs = [&](std::size_t u, int depth) {
    if (depth == m) {
      visit(w);
      return;
    }
    for (int s = 0; s < alphabet_size_; ++s) {
      const std::size_t v = advance(u, static_cast<Symbol>(s));
      if (v == npos) continue;
      w[static_cast<std::size_t>(depth)] = static_cast<Symbol>(s);
      dfs(v, depth + 1);
    }
  };
  for (std::size_t u = 0; u < block_count_; ++u) {
    std::copy(block(u).begin(), block(u).end(), w.begin());
    dfs(u, block_len_);
  }
}

std::vector<Word> Sft::words(int m, std::size_t cap) const {
  std::vector<Word> out;
  for_each_word(m, [&](WordView w) { out.emplace_back(w.begin(), w.end()); }, cap);
  return out;
}

double Sft::word_count(int m) const {
  if (m < 1) throw DomainError("word length must be >= 1");
  if (m < block_len_) {
    std::set<Word> factors;
    for (std::size_t u = 0; u < block_count_; ++u) {
      const WordView b = block(u);
      for (std::size_t off = 0; off + static_cast<std::size_t>(m) <= b.size(); ++off) {
        factors.emplace(b.begin() + off, b.begin() + off + m);
      }
    }
    return static_cast<double>(factors.size());
  }
  std::vector<double> v(block_count_, 1.0);
  std::vector<double> next(block_count_);
  for (int step = 0; step < m - block_len_; ++step) {
    for (std::size_t u = 0; u < block_count_; ++u) {
      double acc = 0.0;
      for (std::size_t w = 0; w < block_count_; ++w) {
        if (transition_[u * block_count_ + w]) acc += v[w];
      }
      next[u] = acc;
    }
    v.swap(next);
  }
  double total = 0.0;
  for (double x : v) total += x;
  return total;
}

Sft Sft::reblocked_for_range(int range) const {
  if (range < 1) throw DomainError("potential range must be >= 1");
  if (range <= block_len_ + 1) return *this;
  return build(alphabet_size_, forbidden_, range - 1);
}

}  // namespace gibbsfit
