#include "rbcscan/box.hpp"

#include <array>
#include <utility>

#include "rbcscan/errors.hpp"

namespace rbcscan {
namespace {

constexpr std::array<std::pair<ReceiverClass, std::string_view>, 4> kClassNames{{
    {ReceiverClass::kSmartphone, "smartphone"},
    {ReceiverClass::kLaptop, "laptop"},
    {ReceiverClass::kLamp, "lamp"},
    {ReceiverClass::kIotDevice, "iot_device"},
}};

}  // namespace

std::string_view to_string(ReceiverClass c) noexcept {
  for (const auto& [value, name] : kClassNames) {
    if (value == c) return name;
  }
  return "unknown";
}

ReceiverClass receiver_class_from_string(std::string_view name) {
  for (const auto& [value, n] : kClassNames) {
    if (n == name) return value;
  }
  throw SchemaError("unknown receiver class '" + std::string(name) + "'");
}

}  // namespace rbcscan
