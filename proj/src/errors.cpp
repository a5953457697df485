#include "hiacc/errors.hpp"

namespace hiacc {

namespace {

std::string join(const std::vector<std::string>& problems) {
  std::string out = "validation failed";
  for (const auto& p : problems) {
    out += "\n  ";
    out += p;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(join(problems)), problems_(std::move(problems)) {}

}  // namespace hiacc
