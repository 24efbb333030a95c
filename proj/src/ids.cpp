#include "litter/ids.hpp"

#include <algorithm>
#include <cctype>

#include "litter/error.hpp"

namespace litter {

namespace {

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

Id::Id(std::string text) : text_(std::move(text)), numeric_(all_digits(text_) && (text_.size() == 1 || text_[0] != '0')) {}

Id::Id(std::int64_t value) : Id(std::to_string(value)) {}

std::strong_ordering operator<=>(const Id& a, const Id& b) noexcept {
  if (a.numeric_ && b.numeric_) {
    if (auto c = a.text_.size() <=> b.text_.size(); c != 0) return c;
    return a.text_ <=> b.text_;
  }
  if (a.numeric_ != b.numeric_) return a.numeric_ ? std::strong_ordering::less : std::strong_ordering::greater;
  return a.text_ <=> b.text_;
}

Id id_from_json(const nlohmann::json& value, const char* what) {
  if (value.is_number_integer()) return Id(value.get<std::int64_t>());
  if (value.is_string()) return Id(value.get<std::string>());
  throw Error(Errc::malformed_json, std::string(what) + " must be an integer or string");
}

nlohmann::ordered_json id_to_json(const Id& id) {
  if (id.numeric() && id.str().size() < 19) return std::stoll(id.str());
  return id.str();
}

}  // namespace litter
