//
// Project LigPose - Copyright 2026 The LigPose Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LIGPOSE_ERROR_H_
#define LIGPOSE_ERROR_H_

#include <stdexcept>

namespace ligpose {

// Malformed or unsupported user input (files, manifests, config keys).
class InputError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError: public InputError {
public:
  using InputError::InputError;
};

}  // namespace ligpose

#endif  // LIGPOSE_ERROR_H_
