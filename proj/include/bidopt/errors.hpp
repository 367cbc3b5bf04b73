#pragma once

#include <stdexcept>
#include <string>

namespace bidopt {

// Malformed or inconsistent user input (instance files, MPS text, CLI values).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bidopt
