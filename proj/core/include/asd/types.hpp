#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace asd {

using NodeId = std::int32_t;

// Ordered list of unique names; the position of a name is its canonical index.
class NameSet {
 public:
  NameSet() = default;
  explicit NameSet(std::vector<std::string> names);
  NameSet(std::initializer_list<std::string> names) : NameSet(std::vector<std::string>(names)) {}

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t index(const std::string& name) const;
  bool contains(const std::string& name) const;

  bool operator==(const NameSet&) const = default;

 private:
  std::vector<std::string> names_;
};

class LabelSet : public NameSet {
 public:
  LabelSet() : NameSet({"default"}) {}
  explicit LabelSet(std::vector<std::string> labels);
  LabelSet(std::initializer_list<std::string> labels)
      : LabelSet(std::vector<std::string>(labels)) {}
};

class StateSet : public NameSet {
 public:
  StateSet() = default;
  explicit StateSet(std::vector<std::string> states);
  StateSet(std::initializer_list<std::string> states)
      : StateSet(std::vector<std::string>(states)) {}
};

struct DegreeVector {
  std::vector<std::int32_t> counts;

  DegreeVector() = default;
  explicit DegreeVector(std::size_t labels) : counts(labels, 0) {}
  explicit DegreeVector(std::vector<std::int32_t> c);
  DegreeVector(std::initializer_list<std::int32_t> c) : DegreeVector(std::vector<std::int32_t>(c)) {}

  std::size_t size() const { return counts.size(); }
  std::int32_t operator[](std::size_t i) const { return counts[i]; }
  std::int32_t& operator[](std::size_t i) { return counts[i]; }
  std::int64_t total() const;

  auto operator<=>(const DegreeVector&) const = default;
};

struct DegreeVectorHash {
  std::size_t operator()(const DegreeVector& d) const;
};

}  // namespace asd
