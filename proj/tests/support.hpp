#pragma once

#include <optional>

#include "maxent/error.hpp"

// The ErrorKind thrown by f, or nullopt if it returned normally.
template <typename F>
std::optional<maxent::ErrorKind> kind_of(F&& f) {
  try {
    f();
  } catch (const maxent::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}
