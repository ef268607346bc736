#pragma once

// Minimal value-or-error carrier for pipeline stages whose failures are data
// (they feed funnel classification) rather than exceptional conditions.

#include <cassert>
#include <utility>
#include <variant>

namespace lmplint {

template <class T, class E>
class result {
public:
    result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
    result(E error) : v_(std::in_place_index<1>, std::move(error)) {}

    bool ok() const { return v_.index() == 0; }
    explicit operator bool() const { return ok(); }

    T& value() {
        assert(ok());
        return std::get<0>(v_);
    }
    const T& value() const {
        assert(ok());
        return std::get<0>(v_);
    }
    E& error() {
        assert(!ok());
        return std::get<1>(v_);
    }
    const E& error() const {
        assert(!ok());
        return std::get<1>(v_);
    }

private:
    std::variant<T, E> v_;
};

}  // namespace lmplint
