#include "asd/types.hpp"

#include <algorithm>
#include <stdexcept>

#include "asd/rng.hpp"

namespace asd {

NameSet::NameSet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j]) throw std::invalid_argument("duplicate name '" + names_[i] + "'");
}

std::size_t NameSet::index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::out_of_range("unknown name '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

bool NameSet::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

LabelSet::LabelSet(std::vector<std::string> labels) : NameSet(std::move(labels)) {
  if (size() == 0) throw std::invalid_argument("label set must not be empty");
}

StateSet::StateSet(std::vector<std::string> states) : NameSet(std::move(states)) {
  if (size() < 2) throw std::invalid_argument("state set needs at least two states");
}

DegreeVector::DegreeVector(std::vector<std::int32_t> c) : counts(std::move(c)) {
  for (auto x : counts)
    if (x < 0) throw std::invalid_argument("negative degree entry");
}

std::int64_t DegreeVector::total() const {
  std::int64_t s = 0;
  for (auto x : counts) s += x;
  return s;
}

std::size_t DegreeVectorHash::operator()(const DegreeVector& d) const {
  std::uint64_t h = d.counts.size();
  for (auto x : d.counts) h = hash_combine(h, static_cast<std::uint64_t>(x));
  return static_cast<std::size_t>(h);
}

}  // namespace asd
