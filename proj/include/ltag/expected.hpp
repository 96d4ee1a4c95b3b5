#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace ltag {

template <class E>
struct Failure {
  E error;
};

template <class E>
Failure<std::decay_t<E>> fail(E&& e) {
  return {std::forward<E>(e)};
}

/// Value-or-error result for operations whose failure is an ordinary outcome
/// (unification clash, rejected adjunction) rather than a programming error.
template <class T, class E>
class Expected {
 public:
  Expected(T value) : state_(std::in_place_index<0>, std::move(value)) {}
  Expected(Failure<E> f) : state_(std::in_place_index<1>, std::move(f.error)) {}

  bool ok() const { return state_.index() == 0; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw std::logic_error("Expected::value() on failure");
    return std::get<0>(state_);
  }
  T& value() & {
    if (!ok()) throw std::logic_error("Expected::value() on failure");
    return std::get<0>(state_);
  }
  T&& value() && {
    if (!ok()) throw std::logic_error("Expected::value() on failure");
    return std::get<0>(std::move(state_));
  }
  const E& error() const {
    if (ok()) throw std::logic_error("Expected::error() on success");
    return std::get<1>(state_);
  }

  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

 private:
  std::variant<T, E> state_;
};

}  // namespace ltag
