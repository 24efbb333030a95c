#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace litter {

// Opaque identifier for images and annotations. COCO documents use integers,
// other sources may use strings; both are kept verbatim. Ordering is
// numeric when both sides are non-negative integers, lexicographic otherwise.
class Id {
 public:
  Id() = default;
  explicit Id(std::string text);
  explicit Id(std::int64_t value);

  const std::string& str() const noexcept { return text_; }
  bool numeric() const noexcept { return numeric_; }
  bool empty() const noexcept { return text_.empty(); }

  friend bool operator==(const Id& a, const Id& b) noexcept { return a.text_ == b.text_; }
  friend std::strong_ordering operator<=>(const Id& a, const Id& b) noexcept;

 private:
  std::string text_;
  bool numeric_ = false;
};

// Accepts a JSON number (integral) or string. Throws Error(malformed_json).
Id id_from_json(const nlohmann::json& value, const char* what);
nlohmann::ordered_json id_to_json(const Id& id);

}  // namespace litter

template <>
struct std::hash<litter::Id> {
  std::size_t operator()(const litter::Id& id) const noexcept { return std::hash<std::string>{}(id.str()); }
};
