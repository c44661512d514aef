#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace tsnac {

template <typename E>
struct Unexpected {
  E error;
};

template <typename E>
Unexpected<E> unexpected(E e) {
  return Unexpected<E>{std::move(e)};
}

// Minimal value-or-error carrier.
template <typename T, typename E>
class Expected {
 public:
  Expected(T value) : storage_(std::in_place_index<0>, std::move(value)) {}
  Expected(Unexpected<E> err) : storage_(std::in_place_index<1>, std::move(err.error)) {}

  bool has_value() const noexcept { return storage_.index() == 0; }
  explicit operator bool() const noexcept { return has_value(); }

  const T& value() const& {
    if (!has_value()) throw std::logic_error("Expected::value() on error state");
    return std::get<0>(storage_);
  }
  T& value() & {
    if (!has_value()) throw std::logic_error("Expected::value() on error state");
    return std::get<0>(storage_);
  }
  T&& value() && {
    if (!has_value()) throw std::logic_error("Expected::value() on error state");
    return std::get<0>(std::move(storage_));
  }

  const E& error() const {
    if (has_value()) throw std::logic_error("Expected::error() on value state");
    return std::get<1>(storage_);
  }

  const T& operator*() const& { return value(); }
  T& operator*() & { return value(); }
  const T* operator->() const { return &value(); }
  T* operator->() { return &value(); }

 private:
  std::variant<T, E> storage_;
};

}  // namespace tsnac
