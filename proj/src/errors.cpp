#include "cheeger/errors.hpp"

namespace cheeger {

UnsupportedOrderError::UnsupportedOrderError(int order)
    : ConfigError("unsupported C^p order " + std::to_string(order) +
                  " (supported orders: 0, 1)"),
      order_(order) {}

}  // namespace cheeger
