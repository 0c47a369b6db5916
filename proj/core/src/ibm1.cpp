#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ppp/errors.hpp"
#include "ppp/text_features.hpp"

namespace ppp {

Ibm1Table Ibm1Table::train(const std::vector<Pair>& pairs, int iterations) {
  if (pairs.empty()) throw ArgumentError("IBM1: no sentence pairs");
  if (iterations < 1) throw ArgumentError("IBM1: iterations must be >= 1");

  Ibm1Table tab;
  tab.iterations_ = iterations;
  tab.source_ids_.emplace(std::string(kNull), 0);
  tab.source_words_.emplace_back(kNull);

  auto source_id = [&](const std::string& w) {
    const auto [it, ins] = tab.source_ids_.emplace(w, static_cast<Id>(tab.source_words_.size()));
    if (ins) tab.source_words_.push_back(w);
    return it->second;
  };
  auto target_id = [&](const std::string& w) {
    const auto [it, ins] = tab.target_ids_.emplace(w, static_cast<Id>(tab.target_ids_.size()));
    return it->second;
  };

  struct Encoded {
    std::vector<Id> src;  // includes null at position 0
    std::vector<Id> tgt;
  };
  std::vector<Encoded> data;
  data.reserve(pairs.size());
  for (const auto& [src, tgt] : pairs) {
    Encoded e;
    e.src.push_back(0);
    for (const auto& w : src) e.src.push_back(source_id(w));
    for (const auto& w : tgt) e.tgt.push_back(target_id(w));
    data.push_back(std::move(e));
  }
  if (tab.target_ids_.empty()) throw ArgumentError("IBM1: all target sentences are empty");

  const double uniform = 1.0 / static_cast<double>(tab.target_ids_.size());
  for (const auto& e : data) {
    for (Id f : e.tgt) {
      for (Id s : e.src) tab.table_.emplace(key(s, f), uniform);
    }
  }

  std::unordered_map<std::uint64_t, double> counts;
  std::vector<double> totals;
  for (int it = 0; it < iterations; ++it) {
    counts.clear();
    totals.assign(tab.source_words_.size(), 0.0);
    for (const auto& e : data) {
      for (Id f : e.tgt) {
        double denom = 0;
        for (Id s : e.src) denom += tab.table_[key(s, f)];
        for (Id s : e.src) {
          const double frac = tab.table_[key(s, f)] / denom;
          counts[key(s, f)] += frac;
          totals[s] += frac;
        }
      }
    }
    for (auto& [k, v] : tab.table_) {
      const auto c = counts.find(k);
      const double total = totals[static_cast<Id>(k >> 32)];
      v = (c != counts.end() && total > 0) ? c->second / total : 0.0;
    }
  }
  return tab;
}

double Ibm1Table::t(std::string_view target, std::string_view source) const {
  const auto s = source_ids_.find(std::string(source));
  const auto f = target_ids_.find(std::string(target));
  if (s == source_ids_.end() || f == target_ids_.end()) return 0.0;
  const auto it = table_.find(key(s->second, f->second));
  return it == table_.end() ? 0.0 : it->second;
}

double Ibm1Table::log_prob(const Tokens& source, const Tokens& target) const {
  std::vector<Id> src{0};
  for (const auto& w : source) {
    const auto it = source_ids_.find(w);
    if (it != source_ids_.end()) src.push_back(it->second);
  }
  const double norm = static_cast<double>(source.size() + 1);
  double lp = 0;
  for (const auto& w : target) {
    double sum = 0;
    const auto f = target_ids_.find(w);
    if (f != target_ids_.end()) {
      for (Id s : src) {
        const auto it = table_.find(key(s, f->second));
        if (it != table_.end()) sum += it->second;
      }
    }
    lp += std::log(std::max(sum / norm, kFloor));
  }
  return lp;
}

double Ibm1Table::source_mass(std::string_view source) const {
  const auto s = source_ids_.find(std::string(source));
  if (s == source_ids_.end()) return 0.0;
  double mass = 0;
  for (const auto& [w, f] : target_ids_) {
    const auto it = table_.find(key(s->second, f));
    if (it != table_.end()) mass += it->second;
  }
  return mass;
}

std::vector<std::string> Ibm1Table::sources() const { return source_words_; }

}  // namespace ppp
